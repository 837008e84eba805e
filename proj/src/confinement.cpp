#include "particle_prep/confinement.hpp"

#include "particle_prep/parallel.hpp"

#include <numbers>

namespace pprep::confinement {

double heaviside(double phi, double eps) {
  if (phi < -eps) return 0.0;
  if (phi > eps) return 1.0;
  return 0.5 + phi / (2.0 * eps) + std::sin(std::numbers::pi * phi / eps) / (2.0 * std::numbers::pi);
}

ActiveBand active_band(const LevelSetField& field, const Kernel& kernel) {
  return {-(kernel.cutoff() + field.fine_spacing()), field.fine_spacing()};
}

void compute_completion(LevelSetField& field, const Kernel& kernel, double eps) {
  if (!(eps > 0.0)) throw ConfigError("Heaviside width eps must be positive");
  if (kernel.cutoff() > 4.0 * field.coarse_spacing())
    throw ConfigError("kernel cutoff exceeds 4 l_c; the support would leave the representable band");
  if (kernel.dimension() != field.dimension()) throw ConfigError("kernel and field dimensions differ");

  const int dim = field.dimension();
  const double lf = field.fine_spacing();
  const double cell_volume = dim == 2 ? lf * lf : lf * lf * lf;
  const double rc = kernel.cutoff();
  const int reach = static_cast<int>(std::ceil(rc / lf));
  const int kz = dim == 3 ? reach : 0;
  const ActiveBand band = active_band(field, kernel);
  const int n = field.package_cells();

  auto& packages = field.packages();
  std::vector<std::vector<Vec>> result(packages.size(), std::vector<Vec>(n, Vec::Zero()));
  // Reads phi only, writes a separate buffer per target cell.
  parallel_for(packages.size(), [&](std::size_t p) {
    const auto& pkg = packages[p];
    for (int l = 0; l < n; ++l) {
      const double phi_a = pkg.phi[l];
      if (phi_a < band.lower || phi_a > band.upper) continue;
      const Index3 ga = field.global_index(pkg, l);
      Vec sum = Vec::Zero();
      for (int dz = -kz; dz <= kz; ++dz)
        for (int dy = -reach; dy <= reach; ++dy)
          for (int dx = -reach; dx <= reach; ++dx) {
            // r_a - r_c in physical units
            const Vec r_ac = -lf * Vec(dx, dy, dz);
            const double r = r_ac.norm();
            if (r <= 0.0 || r >= rc) continue;
            const double phi_c = field.phi_at(Index3{ga[0] + dx, ga[1] + dy, ga[2] + dz});
            if (phi_c <= -eps) continue;
            sum += heaviside(phi_c, eps) * cell_volume * kernel.gradient(r_ac);
          }
      result[p][l] = sum;
    }
  });
  for (std::size_t p = 0; p < packages.size(); ++p) packages[p].completion = std::move(result[p]);
}

}  // namespace pprep::confinement
