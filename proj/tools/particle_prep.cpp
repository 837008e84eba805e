#include "particle_prep/builtin.hpp"
#include "particle_prep/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using pprep::ConfigError;

/// Turns leftover "--key value" / "--key=value" tokens into key/value pairs.
std::vector<std::pair<std::string, std::string>> key_values(const std::vector<std::string>& extras) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (tok.rfind("--", 0) != 0 || tok.size() == 2) throw ConfigError("unexpected argument '" + tok + "'");
    const auto eq = tok.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(tok.substr(2, eq - 2), tok.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) throw ConfigError("option '" + tok + "' needs a value");
      out.emplace_back(tok.substr(2), extras[++i]);
    }
  }
  return out;
}

int run_config(const std::string& config_path, const std::vector<std::string>& extras, pprep::PipelineMode mode) {
  try {
    pprep::ConfigMap map = pprep::ConfigMap::load(config_path);
    for (const auto& [k, v] : key_values(extras)) map.set(k, v);
    const auto config = pprep::PipelineConfig::from_map(map);
    return pprep::run_pipeline(config, mode, std::cout, std::cerr);
  } catch (const pprep::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  }
}

int write_builtin(const std::string& name, const std::string& out_path, const std::vector<std::string>& extras) {
  try {
    pprep::BuiltinParams params;
    for (const auto& [k, v] : key_values(extras)) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(v, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != v.size() || v.empty()) throw ConfigError("parameter '" + k + "': '" + v + "' is not a number");
      params[k] = value;
    }
    const auto shape = pprep::builtin_shape(name, params);
    shape.geometry();  // validates closure and watertightness
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw pprep::IoError("cannot open '" + out_path + "' for writing");
    shape.write(out);
    out.flush();
    if (!out) throw pprep::IoError("write to '" + out_path + "' failed");
    return 0;
  } catch (const pprep::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-set geometry cleaning and body-fitted particle generation"};
  app.name("particle-prep");
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the full pipeline; any --key value overrides a config key");
  run->add_option("--config", config_path, "Configuration file (key=value)")->required();
  run->allow_extras();

  auto* clean_only = app.add_subcommand("clean-only", "Build and clean the level set, then stop");
  clean_only->add_option("--config", config_path, "Configuration file (key=value)")->required();
  clean_only->allow_extras();

  std::string name, out_path;
  auto* builtin = app.add_subcommand("builtin", "Write a builtin geometry; any --param value sets a parameter");
  builtin->add_option("--name", name, "Geometry name")
      ->required()
      ->check(CLI::IsMember(pprep::builtin_names()));
  builtin->add_option("--out", out_path, "Output file (.csv polyline in 2D, ASCII STL in 3D)")->required();
  builtin->allow_extras();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(pprep::ErrorCategory::Config);
  }

  if (run->parsed()) return run_config(config_path, run->remaining(), pprep::PipelineMode::Full);
  if (clean_only->parsed()) return run_config(config_path, clean_only->remaining(), pprep::PipelineMode::CleanOnly);
  return write_builtin(name, out_path, builtin->remaining());
}
