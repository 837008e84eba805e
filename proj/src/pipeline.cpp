#include "particle_prep/pipeline.hpp"

#include "particle_prep/cleaner.hpp"
#include "particle_prep/confinement.hpp"
#include "particle_prep/levelset.hpp"
#include "particle_prep/parallel.hpp"
#include "particle_prep/relaxation.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>
#include <vector>

namespace pprep {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError("key '" + key + "': '" + text + "' is not a finite number");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "on" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "off" || text == "0" || text == "no") return false;
  throw ConfigError("key '" + key + "': '" + text + "' is not a boolean");
}

Vec parse_point(const std::string& key, const std::string& text) {
  Vec p = Vec::Zero();
  std::stringstream ss(text);
  std::string item;
  int n = 0;
  while (std::getline(ss, item, ',')) {
    if (n == 3) throw ConfigError("key '" + key + "': more than three coordinates");
    p[n++] = parse_double(key, trim(item));
  }
  if (n < 2) throw ConfigError("key '" + key + "': expected 'x,y' or 'x,y,z'");
  return p;
}

std::string point_text(const Vec& p, int dim) {
  std::string s = fmt(p.x()) + "," + fmt(p.y());
  if (dim == 3) s += "," + fmt(p.z());
  return s;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "input.path",       "input.format",         "domain",       "domain.min",      "domain.max",
      "levelset.lc",      "particles.dx",         "clean.enabled", "clean.max_passes", "clean.epsilon",
      "confinement.enabled", "confinement.epsilon", "relax.iterations", "relax.p0",    "relax.dt_max",
      "output.dir",       "threads",              "builtin.name"};
  return keys;
}

/// Artifact written as "<name>.incomplete" and renamed once the run succeeds.
class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    const fs::path tmp = dir_ / (name + ".incomplete");
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    body(out);
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    pending_.push_back(name);
  }

  void commit() {
    for (const auto& name : pending_) {
      std::error_code ec;
      fs::rename(dir_ / (name + ".incomplete"), dir_ / name, ec);
      if (ec) throw IoError("cannot rename artifact '" + name + "': " + ec.message());
    }
    pending_.clear();
  }

 private:
  fs::path dir_;
  std::vector<std::string> pending_;
};

}  // namespace

ConfigMap ConfigMap::parse(std::istream& in, const std::string& source_name) {
  ConfigMap map;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source_name + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError(source_name + ":" + std::to_string(lineno) + ": empty key");
    map.set(key, trim(t.substr(eq + 1)));
  }
  return map;
}

ConfigMap ConfigMap::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  return parse(in, path.string());
}

std::optional<std::string> ConfigMap::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

PipelineConfig PipelineConfig::from_map(const ConfigMap& map) {
  const auto& keys = known_keys();
  for (const auto& [key, value] : map.values()) {
    const bool builtin_param = key.rfind("builtin.", 0) == 0 && key != "builtin.name";
    if (!builtin_param && std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError("unknown configuration key '" + key + "'");
  }

  PipelineConfig c;
  auto str = [&](const std::string& k) { return map.get(k); };
  auto num = [&](const std::string& k, double& out) {
    if (auto v = str(k)) out = parse_double(k, *v);
  };
  auto integer = [&](const std::string& k, int& out) {
    if (auto v = str(k)) out = parse_int(k, *v);
  };
  auto flag = [&](const std::string& k, bool& out) {
    if (auto v = str(k)) out = parse_bool(k, *v);
  };

  if (auto v = str("input.path")) c.input_path = *v;
  if (auto v = str("input.format")) c.input_format = *v;
  if (auto v = str("builtin.name")) c.builtin_name = *v;
  if (c.input_path.empty() == c.builtin_name.empty())
    throw ConfigError("exactly one of input.path and builtin.name must be set");
  if (!c.builtin_name.empty()) {
    builtin_defaults(c.builtin_name);  // rejects unknown names
    for (const auto& [key, value] : map.values())
      if (key.rfind("builtin.", 0) == 0 && key != "builtin.name")
        c.builtin_params[key.substr(8)] = parse_double(key, value);
  } else {
    for (const auto& [key, value] : map.values())
      if (key.rfind("builtin.", 0) == 0) throw ConfigError("'" + key + "' requires builtin.name");
  }
  if (c.input_format != "auto") parse_surface_format(c.input_format);

  const auto domain_mode = str("domain").value_or("auto");
  if (domain_mode != "auto" && domain_mode != "box")
    throw ConfigError("domain must be 'auto' or 'box'");
  if (str("domain.min") || str("domain.max")) {
    if (!str("domain.min") || !str("domain.max")) throw ConfigError("domain.min and domain.max go together");
    c.domain = Box{parse_point("domain.min", *str("domain.min")), parse_point("domain.max", *str("domain.max"))};
  } else if (domain_mode == "box") {
    throw ConfigError("domain=box requires domain.min and domain.max");
  }

  num("levelset.lc", c.lc);
  num("particles.dx", c.dx);
  if (!str("levelset.lc") && !str("particles.dx")) throw ConfigError("set levelset.lc or particles.dx");
  if (!str("levelset.lc")) c.lc = 4.0 * c.dx;
  if (!str("particles.dx")) c.dx = c.lc / 4.0;
  if (!(c.lc > 0.0)) throw ConfigError("levelset.lc must be positive");
  if (!(c.dx > 0.0)) throw ConfigError("particles.dx must be positive");

  flag("clean.enabled", c.clean);
  integer("clean.max_passes", c.clean_max_passes);
  if (c.clean_max_passes < 1) throw ConfigError("clean.max_passes must be at least 1");
  c.clean_eps = 0.75 * c.lc / 4.0;
  num("clean.epsilon", c.clean_eps);
  if (!(c.clean_eps > 0.0)) throw ConfigError("clean.epsilon must be positive");

  flag("confinement.enabled", c.confinement);
  c.confinement_eps = 0.75 * c.lc / 4.0;
  num("confinement.epsilon", c.confinement_eps);
  if (!(c.confinement_eps > 0.0)) throw ConfigError("confinement.epsilon must be positive");

  integer("relax.iterations", c.iterations);
  if (c.iterations < 0) throw ConfigError("relax.iterations must be non-negative");
  num("relax.p0", c.p0);
  if (!(c.p0 > 0.0)) throw ConfigError("relax.p0 must be positive");
  num("relax.dt_max", c.dt_max);
  if (!(c.dt_max > 0.0)) throw ConfigError("relax.dt_max must be positive");

  if (auto v = str("output.dir")) c.output_dir = *v;
  if (c.output_dir.empty()) throw ConfigError("output.dir must not be empty");
  integer("threads", c.threads);
  if (c.threads < 0) throw ConfigError("threads must be non-negative");
  return c;
}

void PipelineConfig::write(std::ostream& out) const {
  if (!builtin_name.empty()) {
    out << "builtin.name=" << builtin_name << '\n';
    for (const auto& [k, v] : resolve_builtin_params(builtin_name, builtin_params))
      out << "builtin." << k << '=' << fmt(v) << '\n';
  } else {
    out << "input.path=" << input_path.string() << '\n';
    out << "input.format=" << input_format << '\n';
  }
  if (domain) {
    const int dim = domain->lo.z() == domain->hi.z() ? 2 : 3;
    out << "domain=box\ndomain.min=" << point_text(domain->lo, dim) << "\ndomain.max=" << point_text(domain->hi, dim)
        << '\n';
  } else {
    out << "domain=auto\n";
  }
  out << "levelset.lc=" << fmt(lc) << '\n'
      << "particles.dx=" << fmt(dx) << '\n'
      << "clean.enabled=" << (clean ? "true" : "false") << '\n'
      << "clean.max_passes=" << clean_max_passes << '\n'
      << "clean.epsilon=" << fmt(clean_eps) << '\n'
      << "confinement.enabled=" << (confinement ? "true" : "false") << '\n'
      << "confinement.epsilon=" << fmt(confinement_eps) << '\n'
      << "relax.iterations=" << iterations << '\n'
      << "relax.p0=" << fmt(p0) << '\n'
      << "relax.dt_max=" << fmt(dt_max) << '\n'
      << "output.dir=" << output_dir.string() << '\n'
      << "threads=" << threads << '\n';
}

int run_pipeline(const PipelineConfig& config, PipelineMode mode, std::ostream& log, std::ostream& err) {
  try {
    set_thread_count(config.threads);

    std::unique_ptr<SurfaceGeometry> geometry;
    if (!config.builtin_name.empty()) {
      geometry = std::make_unique<SurfaceGeometry>(builtin_geometry(config.builtin_name, config.builtin_params));
    } else {
      if (!fs::exists(config.input_path)) throw IoError("input file '" + config.input_path.string() + "' not found");
      const SurfaceFormat format = config.input_format == "auto" ? guess_surface_format(config.input_path)
                                                                  : parse_surface_format(config.input_format);
      geometry = std::make_unique<SurfaceGeometry>(load_surface(config.input_path, format));
    }
    const int dim = geometry->dimension();
    log << "geometry: " << geometry->element_count() << (dim == 2 ? " segments" : " triangles") << '\n';

    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + config.output_dir.string() + "': " + ec.message());
    Artifacts artifacts(config.output_dir);
    artifacts.write("resolved.cfg", [&](std::ostream& o) { config.write(o); });

    const Box domain = config.domain.value_or(LevelSetField::default_domain(*geometry, config.lc));
    LevelSetField field = LevelSetField::build(*geometry, domain, config.lc);
    log << "level set: " << field.packages().size() << " packages, " << field.core_count() << " core\n";

    const Kernel kernel = relaxation_kernel(dim, config.dx);
    const double default_eps = 0.75 * field.fine_spacing();
    const double clean_eps = config.clean_eps > 0.0 ? config.clean_eps : default_eps;
    const double confinement_eps = config.confinement_eps > 0.0 ? config.confinement_eps : default_eps;
    bool clean_complete = true;
    if (config.clean) {
      cleaner::CleanOptions options;
      options.max_passes = config.clean_max_passes;
      options.eps = clean_eps;
      if (config.confinement) {
        options.completion_kernel = kernel;
        options.completion_eps = confinement_eps;
      }
      const auto report = cleaner::clean(field, options);
      clean_complete = report.complete;
      artifacts.write("clean_report.txt", [&](std::ostream& o) { cleaner::write_report(report, o); });
      log << "clean: " << report.passes.size() << " pass(es), " << report.total_modified() << " cells modified"
          << (report.complete ? "" : ", incomplete") << '\n';
      if (!report.complete) err << "warning: cleaning incomplete after " << config.clean_max_passes << " passes\n";
    }
    if (config.confinement) confinement::compute_completion(field, kernel, confinement_eps);
    artifacts.write("field.dat", [&](std::ostream& o) { field.write_dump(o); });

    if (mode == PipelineMode::Full) {
      ParticleSet ps = lattice_seed(field, config.dx);
      log << "seeded " << ps.size() << " particles\n";
      RelaxConfig rc;
      rc.iterations = config.iterations;
      rc.use_confinement = config.confinement;
      rc.p0 = config.p0;
      rc.dt_max = config.dt_max;
      const DiagnosticsSeries diag = relax(ps, field, rc);
      artifacts.write("particles.csv", [&](std::ostream& o) { write_particles_csv(ps, o); });
      artifacts.write("particles.vtk", [&](std::ostream& o) { write_particles_vtk(ps, o); });
      artifacts.write("diagnostics.csv", [&](std::ostream& o) { write_diagnostics_csv(diag, o); });
      if (const auto at = first_plateau(diag))
        log << "kinetic energy plateau reached at iteration " << *at << '\n';
      else if (config.iterations > 0)
        err << "warning: convergence criterion not met\n";
    }
    artifacts.commit();
    return clean_complete ? 0 : static_cast<int>(ErrorCategory::NonConvergence);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace pprep
