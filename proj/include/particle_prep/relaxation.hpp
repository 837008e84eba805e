#pragma once

#include "particle_prep/kernel.hpp"
#include "particle_prep/levelset.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace pprep {

/// Compressed per-particle neighbor lists (indices within the kernel cutoff).
struct NeighborList {
  std::vector<std::size_t> offsets;  ///< size N + 1
  std::vector<std::size_t> indices;

  std::size_t count(std::size_t a) const { return offsets[a + 1] - offsets[a]; }
  auto begin(std::size_t a) const { return indices.begin() + static_cast<long>(offsets[a]); }
  auto end(std::size_t a) const { return indices.begin() + static_cast<long>(offsets[a + 1]); }
};

/// Uniform-grid spatial hash with cell edge `cutoff`; neighbors of each
/// particle are listed in ascending index order.
NeighborList build_neighbor_list(const std::vector<Vec>& positions, int dim, double cutoff, const Box& domain);

struct ParticleSet {
  int dim = 2;
  double spacing = 0.0;  ///< lattice spacing dx
  double volume = 0.0;   ///< dx^d, constant
  double mass = 0.0;     ///< rho0 * volume, rho0 = 1
  std::vector<Vec> position;
  std::vector<Vec> force;  ///< acceleration accumulator
  NeighborList neighbors;

  std::size_t size() const { return position.size(); }
};

/// Lattice points origin + (i + 1/2) dx where the probed phi is negative.
ParticleSet lattice_seed(const LevelSetField& field, double spacing);

/// Kernel used by the relaxation for lattice spacing dx: Wendland C2, h = 1.3 dx.
Kernel relaxation_kernel(int dim, double spacing);

void update_neighbors(ParticleSet& ps, const LevelSetField& field, const Kernel& kernel);

/// F_a = -(2 p0 V_a / m_a) (sum_b grad_a W_ab V_b [+ I(r_a)]).
void compute_forces(ParticleSet& ps, const LevelSetField& field, const Kernel& kernel, bool use_confinement,
                    double p0 = 1.0);

struct StepRecord {
  double dt = 0.0;
  double kinetic_energy = 0.0;  ///< (1/N) sum 1/2 m |dr / dt|^2, dr = 1/2 F dt^2 before bounding
  double max_displacement = 0.0;  ///< net, including the bounding correction
  std::size_t bounded = 0;        ///< particles moved by the surface bounding
  std::size_t degenerate_normals = 0;
};

struct StepOptions {
  double dt_max = 1.0;
};

/// dt = 0.25 sqrt(h / max|F|), r += 1/2 F dt^2, then surface bounding
/// r -= (phi + dx/2) N for particles with phi >= -dx/2.
StepRecord step(ParticleSet& ps, const LevelSetField& field, const Kernel& kernel, const StepOptions& options = {});

/// Surface bounding alone; returns the number of particles moved.
std::size_t bound_to_surface(ParticleSet& ps, const LevelSetField& field, std::size_t* degenerate = nullptr);

struct DiagnosticsSeries {
  std::vector<double> kinetic_energy;
  std::vector<double> max_displacement;
  std::vector<std::size_t> bounded;

  std::size_t size() const { return kinetic_energy.size(); }
  void append(const StepRecord& r);
};

/// Trailing-window plateau test: (max - min) / mean of E_k over the last
/// `window` entries ending at `end` (exclusive) is below `tolerance`.
bool plateau_at(const DiagnosticsSeries& d, std::size_t end, std::size_t window = 50, double tolerance = 0.10);
/// First iteration count n for which plateau_at(d, n) holds.
std::optional<std::size_t> first_plateau(const DiagnosticsSeries& d, std::size_t window = 50, double tolerance = 0.10);

struct RelaxConfig {
  int iterations = 1000;
  bool use_confinement = true;
  double p0 = 1.0;
  double dt_max = 1.0;
};

/// Neighbor rebuild, forces, time step and bounding, repeated for the
/// configured iteration count. Throws DomainError naming the particle if one
/// leaves the domain.
DiagnosticsSeries relax(ParticleSet& ps, const LevelSetField& field, const RelaxConfig& config);

/// Nearest-neighbor distance of every particle (infinity for isolated ones).
std::vector<double> nearest_neighbor_distances(const ParticleSet& ps, const Box& domain);

void write_particles_csv(const ParticleSet& ps, std::ostream& out);
void write_particles_vtk(const ParticleSet& ps, std::ostream& out);
void write_diagnostics_csv(const DiagnosticsSeries& d, std::ostream& out);

}  // namespace pprep
