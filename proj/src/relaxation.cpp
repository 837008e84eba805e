#include "particle_prep/relaxation.hpp"

#include "particle_prep/parallel.hpp"

#include <cstdio>
#include <ostream>

namespace pprep {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

NeighborList build_neighbor_list(const std::vector<Vec>& positions, int dim, double cutoff, const Box& domain) {
  const std::size_t n = positions.size();
  Index3 dims{1, 1, 1};
  for (int a = 0; a < dim; ++a)
    dims[a] = std::max(1, static_cast<int>(std::ceil((domain.hi[a] - domain.lo[a]) / cutoff)));
  auto cell_of = [&](const Vec& p) {
    Index3 c{0, 0, 0};
    for (int a = 0; a < dim; ++a)
      c[a] = std::clamp(static_cast<int>(std::floor((p[a] - domain.lo[a]) / cutoff)), 0, dims[a] - 1);
    return c;
  };
  auto linear = [&](const Index3& c) {
    return static_cast<std::size_t>(c[0]) + static_cast<std::size_t>(dims[0]) * (c[1] + static_cast<std::size_t>(dims[1]) * c[2]);
  };

  // counting sort of particles into cells, stable in particle order
  const std::size_t ncells = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
  std::vector<std::size_t> cell_start(ncells + 1, 0);
  std::vector<std::size_t> cell_index(n);
  for (std::size_t i = 0; i < n; ++i) {
    cell_index[i] = linear(cell_of(positions[i]));
    ++cell_start[cell_index[i] + 1];
  }
  for (std::size_t c = 0; c < ncells; ++c) cell_start[c + 1] += cell_start[c];
  std::vector<std::size_t> sorted(n);
  {
    std::vector<std::size_t> fill(cell_start.begin(), cell_start.end() - 1);
    for (std::size_t i = 0; i < n; ++i) sorted[fill[cell_index[i]]++] = i;
  }

  const double cutoff2 = cutoff * cutoff;
  const int kz = dim == 3 ? 1 : 0;
  std::vector<std::vector<std::size_t>> lists(n);
  parallel_for(n, [&](std::size_t a) {
    const Index3 c = cell_of(positions[a]);
    auto& out = lists[a];
    for (int dz = -kz; dz <= kz; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const Index3 nc{c[0] + dx, c[1] + dy, c[2] + dz};
          if (nc[0] < 0 || nc[1] < 0 || nc[2] < 0 || nc[0] >= dims[0] || nc[1] >= dims[1] || nc[2] >= dims[2])
            continue;
          const std::size_t lin = linear(nc);
          for (std::size_t s = cell_start[lin]; s < cell_start[lin + 1]; ++s) {
            const std::size_t b = sorted[s];
            if (b != a && (positions[a] - positions[b]).squaredNorm() < cutoff2) out.push_back(b);
          }
        }
    std::sort(out.begin(), out.end());
  });

  NeighborList nl;
  nl.offsets.resize(n + 1, 0);
  for (std::size_t a = 0; a < n; ++a) nl.offsets[a + 1] = nl.offsets[a] + lists[a].size();
  nl.indices.reserve(nl.offsets[n]);
  for (auto& l : lists) nl.indices.insert(nl.indices.end(), l.begin(), l.end());
  return nl;
}

ParticleSet lattice_seed(const LevelSetField& field, double spacing) {
  if (!(spacing > 0.0)) throw ConfigError("particle spacing must be positive");
  const int dim = field.dimension();
  const Box domain = field.domain();
  Index3 counts{1, 1, 1};
  for (int a = 0; a < dim; ++a)
    counts[a] = static_cast<int>(std::floor((domain.hi[a] - domain.lo[a]) / spacing + 1e-9));

  ParticleSet ps;
  ps.dim = dim;
  ps.spacing = spacing;
  ps.volume = dim == 2 ? spacing * spacing : spacing * spacing * spacing;
  ps.mass = ps.volume;
  for (int k = 0; k < counts[2]; ++k)
    for (int j = 0; j < counts[1]; ++j)
      for (int i = 0; i < counts[0]; ++i) {
        Vec p = domain.lo;
        p[0] += (i + 0.5) * spacing;
        p[1] += (j + 0.5) * spacing;
        if (dim == 3) p[2] += (k + 0.5) * spacing;
        if (field.probe_phi(p) < 0.0) ps.position.push_back(p);
      }
  if (ps.position.empty()) throw EmptySeedError("no lattice point lies inside the surface at this spacing");
  ps.force.assign(ps.position.size(), Vec::Zero());
  return ps;
}

Kernel relaxation_kernel(int dim, double spacing) { return Kernel(dim, 1.3 * spacing); }

void update_neighbors(ParticleSet& ps, const LevelSetField& field, const Kernel& kernel) {
  ps.neighbors = build_neighbor_list(ps.position, ps.dim, kernel.cutoff(), field.domain());
}

void compute_forces(ParticleSet& ps, const LevelSetField& field, const Kernel& kernel, bool use_confinement,
                    double p0) {
  const double prefactor = -2.0 * p0 * ps.volume / ps.mass;
  ps.force.resize(ps.size());
  parallel_for(ps.size(), [&](std::size_t a) {
    Vec sum = Vec::Zero();
    for (auto it = ps.neighbors.begin(a); it != ps.neighbors.end(a); ++it)
      sum += kernel.gradient(ps.position[a] - ps.position[*it]) * ps.volume;
    if (use_confinement) sum += field.probe_completion(ps.position[a]);
    ps.force[a] = prefactor * sum;
  });
}

std::size_t bound_to_surface(ParticleSet& ps, const LevelSetField& field, std::size_t* degenerate) {
  const double half = 0.5 * ps.spacing;
  std::vector<std::uint8_t> moved(ps.size(), 0), bad(ps.size(), 0);
  parallel_for(ps.size(), [&](std::size_t a) {
    const double phi = field.probe_phi(ps.position[a]);
    if (phi < -half) return;
    const auto n = field.probe_normal(ps.position[a]);
    if (!n) {
      bad[a] = 1;
      return;
    }
    ps.position[a] -= (phi + half) * *n;
    moved[a] = 1;
  });
  if (degenerate) *degenerate = static_cast<std::size_t>(std::count(bad.begin(), bad.end(), 1));
  return static_cast<std::size_t>(std::count(moved.begin(), moved.end(), 1));
}

StepRecord step(ParticleSet& ps, const LevelSetField& field, const Kernel& kernel, const StepOptions& options) {
  StepRecord rec;
  double fmax = 0.0;
  for (const auto& f : ps.force) fmax = std::max(fmax, f.norm());
  rec.dt = fmax > 0.0 ? std::min(0.25 * std::sqrt(kernel.smoothing_length() / fmax), options.dt_max) : options.dt_max;

  const std::vector<Vec> before = ps.position;
  const double half_dt2 = 0.5 * rec.dt * rec.dt;
  for (std::size_t a = 0; a < ps.size(); ++a) ps.position[a] += half_dt2 * ps.force[a];

  const Box domain = field.domain();
  for (std::size_t a = 0; a < ps.size(); ++a)
    if (!domain.contains(ps.position[a], ps.dim))
      throw DomainError("particle " + std::to_string(a) + " left the domain during relaxation");

  rec.bounded = bound_to_surface(ps, field, &rec.degenerate_normals);

  double ek = 0.0;
  for (std::size_t a = 0; a < ps.size(); ++a) {
    rec.max_displacement = std::max(rec.max_displacement, (ps.position[a] - before[a]).norm());
    const double v = (half_dt2 * ps.force[a]).norm() / rec.dt;
    ek += 0.5 * ps.mass * v * v;
  }
  rec.kinetic_energy = ek / static_cast<double>(ps.size());
  return rec;
}

void DiagnosticsSeries::append(const StepRecord& r) {
  kinetic_energy.push_back(r.kinetic_energy);
  max_displacement.push_back(r.max_displacement);
  bounded.push_back(r.bounded);
}

bool plateau_at(const DiagnosticsSeries& d, std::size_t end, std::size_t window, double tolerance) {
  if (window == 0 || end < window || end > d.size()) return false;
  double lo = d.kinetic_energy[end - window], hi = lo, sum = 0.0;
  for (std::size_t i = end - window; i < end; ++i) {
    lo = std::min(lo, d.kinetic_energy[i]);
    hi = std::max(hi, d.kinetic_energy[i]);
    sum += d.kinetic_energy[i];
  }
  const double mean = sum / static_cast<double>(window);
  return mean > 0.0 && (hi - lo) / mean < tolerance;
}

std::optional<std::size_t> first_plateau(const DiagnosticsSeries& d, std::size_t window, double tolerance) {
  for (std::size_t n = window; n <= d.size(); ++n)
    if (plateau_at(d, n, window, tolerance)) return n;
  return std::nullopt;
}

DiagnosticsSeries relax(ParticleSet& ps, const LevelSetField& field, const RelaxConfig& config) {
  if (config.iterations < 0) throw ConfigError("iteration count must be non-negative");
  const Kernel kernel = relaxation_kernel(ps.dim, ps.spacing);
  DiagnosticsSeries series;
  for (int it = 0; it < config.iterations; ++it) {
    update_neighbors(ps, field, kernel);
    compute_forces(ps, field, kernel, config.use_confinement, config.p0);
    series.append(step(ps, field, kernel, StepOptions{config.dt_max}));
  }
  update_neighbors(ps, field, kernel);
  return series;
}

std::vector<double> nearest_neighbor_distances(const ParticleSet& ps, const Box& domain) {
  const NeighborList nl = build_neighbor_list(ps.position, ps.dim, 3.0 * ps.spacing, domain);
  std::vector<double> out(ps.size(), std::numeric_limits<double>::infinity());
  for (std::size_t a = 0; a < ps.size(); ++a)
    for (auto it = nl.begin(a); it != nl.end(a); ++it)
      out[a] = std::min(out[a], (ps.position[a] - ps.position[*it]).norm());
  return out;
}

void write_particles_csv(const ParticleSet& ps, std::ostream& out) {
  out << (ps.dim == 2 ? "x,y,volume\n" : "x,y,z,volume\n");
  for (const auto& p : ps.position) {
    for (int a = 0; a < ps.dim; ++a) out << fmt(p[a]) << ',';
    out << fmt(ps.volume) << '\n';
  }
}

void write_particles_vtk(const ParticleSet& ps, std::ostream& out) {
  const std::size_t n = ps.size();
  out << "# vtk DataFile Version 3.0\nparticle-prep particles\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << n << " double\n";
  for (const auto& p : ps.position) out << fmt(p.x()) << ' ' << fmt(p.y()) << ' ' << fmt(p.z()) << '\n';
  out << "VERTICES " << n << ' ' << 2 * n << '\n';
  for (std::size_t i = 0; i < n; ++i) out << "1 " << i << '\n';
  out << "POINT_DATA " << n << "\nSCALARS volume double 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < n; ++i) out << fmt(ps.volume) << '\n';
}

void write_diagnostics_csv(const DiagnosticsSeries& d, std::ostream& out) {
  out << "iter,avg_kinetic_energy,max_disp,bounded_count\n";
  for (std::size_t i = 0; i < d.size(); ++i)
    out << i + 1 << ',' << fmt(d.kinetic_energy[i]) << ',' << fmt(d.max_displacement[i]) << ',' << d.bounded[i]
        << '\n';
}

}  // namespace pprep
