#pragma once

#include "particle_prep/common.hpp"
#include "particle_prep/geometry.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace pprep {

/// Coarse-cell classification of the two-level field.
enum class CellTag : std::uint8_t { FarPositive, FarNegative, Inner, Core };

/// Per-fine-cell interface flags (independent bits).
namespace interface_id {
inline constexpr std::uint8_t kZeroCut = 1u << 0;
inline constexpr std::uint8_t kPositiveCut = 1u << 1;
inline constexpr std::uint8_t kNegativeCut = 1u << 2;
inline constexpr std::uint8_t kGapCut = 1u << 3;
inline constexpr std::uint8_t kNonResolvedPlus = 1u << 4;
inline constexpr std::uint8_t kNonResolvedMinus = 1u << 5;
}  // namespace interface_id

/// Fine cells per package edge.
inline constexpr int kPackageSize = 4;
/// Package edge including the one-cell halo on both sides.
inline constexpr int kAddressSize = kPackageSize + 2;

/// Where an addressable cell's data lives: a package slot, or one of the two
/// shared far-field constants.
struct CellAddress {
  static constexpr int kFarPositive = -1;
  static constexpr int kFarNegative = -2;
  int package = kFarPositive;
  int local = 0;
  bool is_far() const { return package < 0; }
};

/// A coarse cell's block of 4^d fine cells.
struct DataPackage {
  Index3 coarse{0, 0, 0};
  bool core = false;
  std::vector<double> phi;
  std::vector<Vec> normal;
  std::vector<Vec> completion;
  std::vector<std::uint8_t> interface_id;
  /// 6^d entries: the package itself plus a one-fine-cell halo, resolved to
  /// neighbor packages or far constants.
  std::vector<CellAddress> address;
};

struct ReinitResult {
  int iterations = 0;
  double residual = 0.0;
};

/// How compute_normals treats cells where |grad phi| vanishes.
enum class NormalFallback {
  /// Unit vector toward the nearest surface point of the source (build time).
  NearestSurface,
  /// Keep the previously stored normal (after cleaning).
  PreviousNormal,
};

/// Two-level narrow-band level-set field. Coarse cells of spacing l_c are
/// tagged Core (center within l_c of the surface), Inner (Core or adjacent to
/// Core) or Far. Inner cells own a DataPackage of 4^d fine cells of spacing
/// l_f = l_c / 4; Far cells refer to one of two shared constants +-4 l_c.
class LevelSetField {
 public:
  /// Builds the field from a distance source on `domain`. The domain must
  /// contain the source bounds inflated by 4 l_c.
  static LevelSetField build(const DistanceSource& source, const Box& domain, double coarse_spacing);

  /// Default domain: source bounds inflated by 4 l_c.
  static Box default_domain(const DistanceSource& source, double coarse_spacing);

  int dimension() const { return dim_; }
  const Vec& origin() const { return origin_; }
  const Index3& coarse_dims() const { return coarse_dims_; }
  Index3 fine_dims() const;
  double coarse_spacing() const { return lc_; }
  double fine_spacing() const { return lf_; }
  Box domain() const;

  CellTag tag(const Index3& coarse) const { return tags_[coarse_linear(coarse)]; }
  /// Package index of a coarse cell, or -1 for Far cells.
  int package_index(const Index3& coarse) const { return package_of_[coarse_linear(coarse)]; }
  const std::vector<DataPackage>& packages() const { return packages_; }
  std::vector<DataPackage>& packages() { return packages_; }
  const std::vector<CellTag>& tags() const { return tags_; }

  double far_value(bool positive) const { return far_values_[positive ? 0 : 1]; }
  /// The shared far-field scalars; there are always exactly two.
  std::span<const double> far_values() const { return far_values_; }

  std::size_t stored_fine_cells() const;
  std::size_t dense_fine_cells() const;
  std::size_t core_count() const;

  // --- fine-cell addressing -------------------------------------------------

  /// Fine cells per package (4^d).
  int package_cells() const { return ipow(kPackageSize, dim_); }
  /// Local index inside a package, (i, j, k) in [0, 4).
  int local_index(int i, int j, int k) const { return i + kPackageSize * (j + kPackageSize * k); }
  Index3 local_coords(int local) const;
  /// Index into DataPackage::address for halo offset (i, j, k) in [-1, 4].
  int address_index(int i, int j, int k) const;
  Index3 global_index(const DataPackage& pkg, int local) const;
  Vec cell_center(const Index3& global) const;
  /// Resolves a global fine index (clamped to the domain) to its storage.
  CellAddress resolve(const Index3& global) const;
  double phi_at(const CellAddress& a) const {
    return a.is_far() ? far_value(a.package == CellAddress::kFarPositive) : packages_[a.package].phi[a.local];
  }
  double phi_at(const Index3& global) const { return phi_at(resolve(global)); }
  /// phi through a package's address table, offset (i, j, k) in [-1, 4].
  double halo_phi(const DataPackage& pkg, int i, int j, int k) const {
    return phi_at(pkg.address[address_index(i, j, k)]);
  }
  std::uint8_t interface_id_at(const Index3& global) const;

  /// Calls fn(package index, local index, global index) for every stored fine cell.
  void for_each_cell(const std::function<void(int, int, const Index3&)>& fn) const;

  // --- probes ---------------------------------------------------------------

  /// Bi/tri-linear interpolation of fine-cell phi; the far constant inside Far cells.
  double probe_phi(const Vec& p) const;
  /// Interpolated, renormalized normal; nullopt when the interpolated vector is
  /// shorter than 1e-8 or p lies in a Far cell.
  std::optional<Vec> probe_normal(const Vec& p) const;
  /// Interpolated completion vector; zero in Far cells.
  Vec probe_completion(const Vec& p) const;

  // --- mutation -------------------------------------------------------------

  /// Overwrites phi in every package from `fn` evaluated at fine-cell centers.
  void assign_phi(const std::function<double(const Vec&)>& fn);
  /// Normals by 3-point central differences (one-sided next to far cells).
  void compute_normals(NormalFallback fallback, const DistanceSource* source = nullptr);
  /// Pseudo-time iteration of phi_t + S(phi0)(|grad phi| - 1) = 0 over all
  /// Inner packages, first-order Godunov upwind, dtau = 0.5 l_f. Stops when the
  /// upwind residual max| |grad phi| - 1 | drops below `tolerance`. Cells
  /// flagged in `frozen` ([package][local], nonzero) keep their values and are
  /// left out of the residual.
  ReinitResult reinitialize(int max_iters = 40, double tolerance = 0.05,
                            const std::vector<std::vector<char>>* frozen = nullptr);
  /// Upwind-gradient residual max | |grad phi| - 1 | over the band.
  double eikonal_residual_upwind() const;
  /// Central-difference residual max | |grad phi| - 1 | over the band
  /// (one-sided next to far cells).
  double eikonal_residual_central() const;

  /// Central-difference gradient at a stored fine cell.
  Vec gradient(const DataPackage& pkg, int local) const;

  /// ASCII dump: header, one line per stored fine cell, run-length-encoded tag table.
  void write_dump(std::ostream& out) const;

 private:
  std::size_t coarse_linear(const Index3& c) const {
    return static_cast<std::size_t>(c[0]) +
           static_cast<std::size_t>(coarse_dims_[0]) *
               (static_cast<std::size_t>(c[1]) + static_cast<std::size_t>(coarse_dims_[1]) * c[2]);
  }
  void build_addresses();
  /// Godunov upwind |grad phi| at a stored cell for the given sign of the speed.
  double godunov_gradient_norm(const DataPackage& pkg, int local, double sign) const;
  /// Interpolation stencil: base fine index and weights per axis.
  void stencil(const Vec& p, Index3& base, Vec& t) const;
  void check_in_domain(const Vec& p) const;

  int dim_ = 2;
  Vec origin_ = Vec::Zero();
  Index3 coarse_dims_{1, 1, 1};
  double lc_ = 1.0;
  double lf_ = 0.25;
  std::array<double, 2> far_values_{0.0, 0.0};
  std::vector<CellTag> tags_;
  std::vector<int> package_of_;
  std::vector<DataPackage> packages_;
};

}  // namespace pprep
