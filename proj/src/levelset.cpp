#include "particle_prep/levelset.hpp"

#include "particle_prep/parallel.hpp"

#include <cstdio>
#include <deque>
#include <ostream>

namespace pprep {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

char tag_letter(CellTag t) {
  switch (t) {
    case CellTag::FarPositive: return 'P';
    case CellTag::FarNegative: return 'N';
    case CellTag::Inner: return 'I';
    case CellTag::Core: return 'C';
  }
  return '?';
}

}  // namespace

Box LevelSetField::default_domain(const DistanceSource& source, double coarse_spacing) {
  return source.bounds().inflated(4.0 * coarse_spacing, source.dimension());
}

LevelSetField LevelSetField::build(const DistanceSource& source, const Box& domain, double coarse_spacing) {
  if (!(coarse_spacing > 0.0) || !std::isfinite(coarse_spacing))
    throw ConfigError("coarse spacing l_c must be positive");
  const int dim = source.dimension();
  const Box needed = source.bounds().inflated(4.0 * coarse_spacing, dim);
  const double slack = 1e-9 * coarse_spacing;
  for (int a = 0; a < dim; ++a)
    if (domain.lo[a] > needed.lo[a] + slack || domain.hi[a] < needed.hi[a] - slack)
      throw ConfigError("domain must contain the geometry bounds padded by 4 l_c on every side");

  LevelSetField f;
  f.dim_ = dim;
  f.lc_ = coarse_spacing;
  f.lf_ = coarse_spacing / kPackageSize;
  f.far_values_ = {4.0 * coarse_spacing, -4.0 * coarse_spacing};
  f.origin_ = Vec::Zero();
  for (int a = 0; a < 3; ++a) {
    if (a < dim) {
      f.origin_[a] = domain.lo[a];
      f.coarse_dims_[a] = std::max(1, static_cast<int>(std::ceil(domain.extent()[a] / coarse_spacing - 1e-9)));
    } else {
      f.coarse_dims_[a] = 1;
    }
  }

  const auto& cd = f.coarse_dims_;
  const std::size_t ncoarse = static_cast<std::size_t>(cd[0]) * cd[1] * cd[2];
  std::vector<std::uint8_t> core(ncoarse, 0);
  auto coarse_center = [&](const Index3& c) {
    Vec p = f.origin_;
    for (int a = 0; a < dim; ++a) p[a] += (c[a] + 0.5) * coarse_spacing;
    return p;
  };
  auto coords = [&](std::size_t lin) {
    Index3 c;
    c[0] = static_cast<int>(lin % cd[0]);
    c[1] = static_cast<int>((lin / cd[0]) % cd[1]);
    c[2] = static_cast<int>(lin / (static_cast<std::size_t>(cd[0]) * cd[1]));
    return c;
  };

  parallel_for(ncoarse, [&](std::size_t lin) {
    const Vec p = coarse_center(coords(lin));
    core[lin] = source.unsigned_distance(p, 2.0 * coarse_spacing) <= coarse_spacing ? 1 : 0;
  });
  if (std::none_of(core.begin(), core.end(), [](auto v) { return v != 0; }))
    throw EmptyBandError("no coarse cell lies within l_c of the surface");

  // Inner = Core dilated by one coarse cell in the 3^d neighborhood.
  f.tags_.assign(ncoarse, CellTag::FarPositive);
  const int kz = dim == 3 ? 1 : 0;
  for (std::size_t lin = 0; lin < ncoarse; ++lin) {
    const Index3 c = coords(lin);
    if (core[lin]) {
      f.tags_[lin] = CellTag::Core;
      continue;
    }
    bool near_core = false;
    for (int dz = -kz; dz <= kz && !near_core; ++dz)
      for (int dy = -1; dy <= 1 && !near_core; ++dy)
        for (int dx = -1; dx <= 1 && !near_core; ++dx) {
          const Index3 n{c[0] + dx, c[1] + dy, c[2] + dz};
          if (n[0] < 0 || n[1] < 0 || n[2] < 0 || n[0] >= cd[0] || n[1] >= cd[1] || n[2] >= cd[2]) continue;
          near_core = core[f.coarse_linear(n)] != 0;
        }
    if (near_core) f.tags_[lin] = CellTag::Inner;
  }

  // Far cells: the sign is constant on each face-connected component of
  // non-Core cells (a surface crossing between two adjacent centers would put
  // one of them within l_c / 2 of it), so one containment query per component.
  std::vector<std::uint8_t> seen(ncoarse, 0);
  for (std::size_t seed = 0; seed < ncoarse; ++seed) {
    if (seen[seed] || f.tags_[seed] == CellTag::Inner || f.tags_[seed] == CellTag::Core) continue;
    const CellTag sign = source.contains(coarse_center(coords(seed))) < 0 ? CellTag::FarNegative : CellTag::FarPositive;
    std::deque<std::size_t> queue{seed};
    seen[seed] = 1;
    while (!queue.empty()) {
      const std::size_t lin = queue.front();
      queue.pop_front();
      f.tags_[lin] = sign;
      const Index3 c = coords(lin);
      for (int a = 0; a < dim; ++a)
        for (int s : {-1, 1}) {
          Index3 n = c;
          n[a] += s;
          if (n[a] < 0 || n[a] >= cd[a]) continue;
          const std::size_t nl = f.coarse_linear(n);
          if (seen[nl] || f.tags_[nl] == CellTag::Inner || f.tags_[nl] == CellTag::Core) continue;
          seen[nl] = 1;
          queue.push_back(nl);
        }
    }
  }

  f.package_of_.assign(ncoarse, -1);
  for (std::size_t lin = 0; lin < ncoarse; ++lin) {
    if (f.tags_[lin] != CellTag::Inner && f.tags_[lin] != CellTag::Core) continue;
    f.package_of_[lin] = static_cast<int>(f.packages_.size());
    DataPackage pkg;
    pkg.coarse = coords(lin);
    pkg.core = f.tags_[lin] == CellTag::Core;
    const int n = f.package_cells();
    pkg.phi.assign(n, 0.0);
    pkg.normal.assign(n, Vec::Zero());
    pkg.completion.assign(n, Vec::Zero());
    pkg.interface_id.assign(n, 0);
    f.packages_.push_back(std::move(pkg));
  }
  f.build_addresses();

  parallel_for(f.packages_.size(), [&](std::size_t p) {
    auto& pkg = f.packages_[p];
    for (int l = 0; l < f.package_cells(); ++l)
      pkg.phi[l] = source.signed_distance(f.cell_center(f.global_index(pkg, l)));
  });
  f.compute_normals(NormalFallback::NearestSurface, &source);
  return f;
}

void LevelSetField::build_addresses() {
  const int kz = dim_ == 3 ? 1 : 0;
  const int hi_z = dim_ == 3 ? kPackageSize : 0;
  for (auto& pkg : packages_) {
    pkg.address.assign(ipow(kAddressSize, dim_), CellAddress{});
    for (int k = -kz; k <= hi_z; ++k)
      for (int j = -1; j <= kPackageSize; ++j)
        for (int i = -1; i <= kPackageSize; ++i) {
          const Index3 g{pkg.coarse[0] * kPackageSize + i, pkg.coarse[1] * kPackageSize + j,
                         pkg.coarse[2] * kPackageSize + k};
          pkg.address[address_index(i, j, k)] = resolve(g);
        }
  }
}

Index3 LevelSetField::fine_dims() const {
  return {coarse_dims_[0] * kPackageSize, coarse_dims_[1] * kPackageSize,
          dim_ == 3 ? coarse_dims_[2] * kPackageSize : 1};
}

Box LevelSetField::domain() const {
  Box b{origin_, origin_};
  for (int a = 0; a < dim_; ++a) b.hi[a] = origin_[a] + coarse_dims_[a] * lc_;
  return b;
}

std::size_t LevelSetField::stored_fine_cells() const {
  return packages_.size() * static_cast<std::size_t>(package_cells());
}

std::size_t LevelSetField::dense_fine_cells() const {
  const Index3 fd = fine_dims();
  return static_cast<std::size_t>(fd[0]) * fd[1] * fd[2];
}

std::size_t LevelSetField::core_count() const {
  return static_cast<std::size_t>(std::count(tags_.begin(), tags_.end(), CellTag::Core));
}

Index3 LevelSetField::local_coords(int local) const {
  return {local % kPackageSize, (local / kPackageSize) % kPackageSize, local / (kPackageSize * kPackageSize)};
}

int LevelSetField::address_index(int i, int j, int k) const {
  return (i + 1) + kAddressSize * (j + 1) + (dim_ == 3 ? kAddressSize * kAddressSize * (k + 1) : 0);
}

Index3 LevelSetField::global_index(const DataPackage& pkg, int local) const {
  const Index3 l = local_coords(local);
  return {pkg.coarse[0] * kPackageSize + l[0], pkg.coarse[1] * kPackageSize + l[1],
          dim_ == 3 ? pkg.coarse[2] * kPackageSize + l[2] : 0};
}

Vec LevelSetField::cell_center(const Index3& g) const {
  Vec p = origin_;
  for (int a = 0; a < dim_; ++a) p[a] += (g[a] + 0.5) * lf_;
  return p;
}

CellAddress LevelSetField::resolve(const Index3& global) const {
  const Index3 fd = fine_dims();
  Index3 g;
  Index3 c;
  for (int a = 0; a < 3; ++a) {
    g[a] = std::clamp(global[a], 0, fd[a] - 1);
    c[a] = a < dim_ ? g[a] / kPackageSize : 0;
  }
  const std::size_t lin = coarse_linear(c);
  const int p = package_of_[lin];
  if (p < 0)
    return CellAddress{tags_[lin] == CellTag::FarNegative ? CellAddress::kFarNegative : CellAddress::kFarPositive, 0};
  return CellAddress{p, local_index(g[0] - c[0] * kPackageSize, g[1] - c[1] * kPackageSize,
                                    dim_ == 3 ? g[2] - c[2] * kPackageSize : 0)};
}

std::uint8_t LevelSetField::interface_id_at(const Index3& global) const {
  const CellAddress a = resolve(global);
  return a.is_far() ? 0 : packages_[a.package].interface_id[a.local];
}

void LevelSetField::for_each_cell(const std::function<void(int, int, const Index3&)>& fn) const {
  for (std::size_t p = 0; p < packages_.size(); ++p)
    for (int l = 0; l < package_cells(); ++l) fn(static_cast<int>(p), l, global_index(packages_[p], l));
}

void LevelSetField::assign_phi(const std::function<double(const Vec&)>& fn) {
  for (auto& pkg : packages_)
    for (int l = 0; l < package_cells(); ++l) pkg.phi[l] = fn(cell_center(global_index(pkg, l)));
}

// ---------------------------------------------------------------------------
// Gradients, normals, re-initialization

Vec LevelSetField::gradient(const DataPackage& pkg, int local) const {
  const Index3 l = local_coords(local);
  const double self = pkg.phi[local];
  Vec g = Vec::Zero();
  for (int a = 0; a < dim_; ++a) {
    Index3 up = l, dn = l;
    up[a] += 1;
    dn[a] -= 1;
    const CellAddress au = pkg.address[address_index(up[0], up[1], up[2])];
    const CellAddress ad = pkg.address[address_index(dn[0], dn[1], dn[2])];
    if (!au.is_far() && !ad.is_far()) {
      g[a] = (phi_at(au) - phi_at(ad)) / (2.0 * lf_);
    } else if (!ad.is_far()) {
      g[a] = (self - phi_at(ad)) / lf_;
    } else if (!au.is_far()) {
      g[a] = (phi_at(au) - self) / lf_;
    }
  }
  return g;
}

void LevelSetField::compute_normals(NormalFallback fallback, const DistanceSource* source) {
  parallel_for(packages_.size(), [&](std::size_t p) {
    auto& pkg = packages_[p];
    std::vector<Vec> fresh(pkg.normal.size());
    for (int l = 0; l < package_cells(); ++l) {
      const Vec g = gradient(pkg, l);
      const double n = g.norm();
      if (n > 1e-8) {
        fresh[l] = g / n;
        continue;
      }
      fresh[l] = pkg.normal[l];
      if (fallback == NormalFallback::NearestSurface && source != nullptr) {
        const Vec c = cell_center(global_index(pkg, l));
        Vec d = c - source->closest_point(c);
        if (pkg.phi[l] < 0.0) d = -d;
        if (d.norm() > 0.0) fresh[l] = d.normalized();
      }
      if (fresh[l].norm() == 0.0) fresh[l] = Vec::UnitX();
    }
    pkg.normal = std::move(fresh);
  });
}

double LevelSetField::godunov_gradient_norm(const DataPackage& pkg, int local, double sign) const {
  const Index3 l = local_coords(local);
  const double self = pkg.phi[local];
  double sum = 0.0;
  for (int a = 0; a < dim_; ++a) {
    Index3 up = l, dn = l;
    up[a] += 1;
    dn[a] -= 1;
    const double back = (self - halo_phi(pkg, dn[0], dn[1], dn[2])) / lf_;
    const double fwd = (halo_phi(pkg, up[0], up[1], up[2]) - self) / lf_;
    double g2;
    if (sign > 0.0) {
      const double ap = std::max(back, 0.0), bm = std::min(fwd, 0.0);
      g2 = std::max(ap * ap, bm * bm);
    } else {
      const double am = std::min(back, 0.0), bp = std::max(fwd, 0.0);
      g2 = std::max(am * am, bp * bp);
    }
    sum += g2;
  }
  return std::sqrt(sum);
}

double LevelSetField::eikonal_residual_upwind() const {
  double r = 0.0;
  for (const auto& pkg : packages_)
    for (int l = 0; l < package_cells(); ++l)
      r = std::max(r, std::abs(godunov_gradient_norm(pkg, l, pkg.phi[l] >= 0.0 ? 1.0 : -1.0) - 1.0));
  return r;
}

double LevelSetField::eikonal_residual_central() const {
  double r = 0.0;
  for (const auto& pkg : packages_)
    for (int l = 0; l < package_cells(); ++l) r = std::max(r, std::abs(gradient(pkg, l).norm() - 1.0));
  return r;
}

ReinitResult LevelSetField::reinitialize(int max_iters, double tolerance,
                                         const std::vector<std::vector<char>>* frozen) {
  ReinitResult result;
  const double dtau = 0.5 * lf_;
  const int n = package_cells();
  // Smoothed sign from the field at entry. Cells with a sign change towards a
  // face neighbor are anchored to their entry distance estimate
  // phi0 / |grad phi0| (Russo-Smereka subcell fix) so the zero level stays put.
  std::vector<std::vector<double>> sign(packages_.size());
  std::vector<std::vector<double>> anchor(packages_.size());
  constexpr double kFree = std::numeric_limits<double>::quiet_NaN();
  parallel_for(packages_.size(), [&](std::size_t p) {
    const auto& pkg = packages_[p];
    sign[p].resize(n);
    anchor[p].assign(n, kFree);
    for (int l = 0; l < n; ++l) {
      const double v = pkg.phi[l];
      sign[p][l] = v / std::sqrt(v * v + lf_ * lf_);
      const Index3 c = local_coords(l);
      bool crossing = false;
      double g2 = 0.0;
      for (int a = 0; a < dim_; ++a) {
        Index3 up = c, dn = c;
        up[a] += 1;
        dn[a] -= 1;
        const double vu = halo_phi(pkg, up[0], up[1], up[2]), vd = halo_phi(pkg, dn[0], dn[1], dn[2]);
        crossing = crossing || v * vu <= 0.0 || v * vd <= 0.0;
        const double d = std::max({0.5 * std::abs(vu - vd), std::abs(vu - v), std::abs(v - vd)});
        g2 += d * d;
      }
      if (crossing && g2 > 0.0) anchor[p][l] = lf_ * v / std::sqrt(g2);
    }
  });
  if (frozen && frozen->size() != packages_.size()) throw std::invalid_argument("frozen mask size mismatch");
  std::vector<std::vector<double>> next(packages_.size(), std::vector<double>(n));
  std::vector<double> residual(packages_.size());
  for (int it = 0; it <= max_iters; ++it) {
    // Sweep reads the current buffer (halos included) and writes `next`.
    parallel_for(packages_.size(), [&](std::size_t p) {
      const auto& pkg = packages_[p];
      double r = 0.0;
      for (int l = 0; l < n; ++l) {
        if (frozen && !(*frozen)[p].empty() && (*frozen)[p][l]) {
          next[p][l] = pkg.phi[l];
          continue;
        }
        const double s = sign[p][l];
        const double g = godunov_gradient_norm(pkg, l, s >= 0.0 ? 1.0 : -1.0);
        r = std::max(r, std::abs(g - 1.0));
        const double d = anchor[p][l];
        if (std::isnan(d)) {
          next[p][l] = pkg.phi[l] - dtau * s * (g - 1.0);
        } else {
          const double phi = pkg.phi[l];
          next[p][l] = phi - (dtau / lf_) * ((s >= 0.0 ? 1.0 : -1.0) * std::abs(phi) - d);
        }
      }
      residual[p] = r;
    });
    result.residual = *std::max_element(residual.begin(), residual.end());
    if (result.residual < tolerance || it == max_iters) break;
    for (std::size_t p = 0; p < packages_.size(); ++p) packages_[p].phi.swap(next[p]);
    result.iterations = it + 1;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Probes

void LevelSetField::check_in_domain(const Vec& p) const {
  if (!is_finite(p)) throw DomainError("probe at a non-finite point");
  const Box d = domain();
  const double slack = 1e-12 * lc_;
  for (int a = 0; a < dim_; ++a)
    if (p[a] < d.lo[a] - slack || p[a] > d.hi[a] + slack)
      throw DomainError("probe point outside the level-set domain");
}

void LevelSetField::stencil(const Vec& p, Index3& base, Vec& t) const {
  const Index3 fd = fine_dims();
  base = {0, 0, 0};
  t = Vec::Zero();
  for (int a = 0; a < dim_; ++a) {
    double s = (p[a] - origin_[a]) / lf_ - 0.5;
    if (std::abs(s - std::round(s)) < 1e-9) s = std::round(s);  // cell centers hit stored values exactly
    int b = static_cast<int>(std::floor(s));
    b = std::clamp(b, 0, std::max(0, fd[a] - 2));
    base[a] = b;
    t[a] = std::clamp(s - b, 0.0, 1.0);
  }
}

namespace {

template <class Fn>
void for_each_corner(int dim, const Index3& base, const Vec& t, Fn&& fn) {
  const int corners = 1 << dim;
  for (int c = 0; c < corners; ++c) {
    Index3 g = base;
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      const int bit = (c >> a) & 1;
      g[a] += bit;
      w *= bit ? t[a] : 1.0 - t[a];
    }
    fn(g, w);
  }
}

}  // namespace

double LevelSetField::probe_phi(const Vec& p) const {
  check_in_domain(p);
  Index3 c{0, 0, 0};
  for (int a = 0; a < dim_; ++a)
    c[a] = std::clamp(static_cast<int>(std::floor((p[a] - origin_[a]) / lc_)), 0, coarse_dims_[a] - 1);
  const CellTag tg = tag(c);
  if (tg == CellTag::FarPositive) return far_values_[0];
  if (tg == CellTag::FarNegative) return far_values_[1];
  Index3 base;
  Vec t;
  stencil(p, base, t);
  double v = 0.0;
  for_each_corner(dim_, base, t, [&](const Index3& g, double w) { v += w * phi_at(g); });
  return v;
}

std::optional<Vec> LevelSetField::probe_normal(const Vec& p) const {
  check_in_domain(p);
  Index3 c{0, 0, 0};
  for (int a = 0; a < dim_; ++a)
    c[a] = std::clamp(static_cast<int>(std::floor((p[a] - origin_[a]) / lc_)), 0, coarse_dims_[a] - 1);
  if (package_index(c) < 0) return std::nullopt;
  Index3 base;
  Vec t;
  stencil(p, base, t);
  Vec n = Vec::Zero();
  for_each_corner(dim_, base, t, [&](const Index3& g, double w) {
    const CellAddress a = resolve(g);
    if (!a.is_far()) n += w * packages_[a.package].normal[a.local];
  });
  const double len = n.norm();
  if (len < 1e-8) return std::nullopt;
  return n / len;
}

Vec LevelSetField::probe_completion(const Vec& p) const {
  check_in_domain(p);
  Index3 c{0, 0, 0};
  for (int a = 0; a < dim_; ++a)
    c[a] = std::clamp(static_cast<int>(std::floor((p[a] - origin_[a]) / lc_)), 0, coarse_dims_[a] - 1);
  if (package_index(c) < 0) return Vec::Zero();
  Index3 base;
  Vec t;
  stencil(p, base, t);
  Vec v = Vec::Zero();
  for_each_corner(dim_, base, t, [&](const Index3& g, double w) {
    const CellAddress a = resolve(g);
    if (!a.is_far()) v += w * packages_[a.package].completion[a.local];
  });
  return v;
}

// ---------------------------------------------------------------------------

void LevelSetField::write_dump(std::ostream& out) const {
  out << "LEVELSET d=" << dim_ << " lc=" << fmt_double(lc_) << " origin=";
  for (int a = 0; a < dim_; ++a) out << (a ? "," : "") << fmt_double(origin_[a]);
  out << " dims=";
  for (int a = 0; a < dim_; ++a) out << (a ? "," : "") << coarse_dims_[a];
  out << '\n';
  for (const auto& pkg : packages_)
    for (int l = 0; l < package_cells(); ++l) {
      const Index3 g = global_index(pkg, l);
      for (int a = 0; a < dim_; ++a) out << g[a] << ' ';
      out << fmt_double(pkg.phi[l]);
      for (int a = 0; a < dim_; ++a) out << ' ' << fmt_double(pkg.normal[l][a]);
      for (int a = 0; a < dim_; ++a) out << ' ' << fmt_double(pkg.completion[l][a]);
      out << ' ' << static_cast<int>(pkg.interface_id[l]) << '\n';
    }
  // run-length-encoded coarse tags, x fastest
  std::vector<std::pair<std::size_t, CellTag>> runs;
  for (CellTag t : tags_) {
    if (!runs.empty() && runs.back().second == t) ++runs.back().first;
    else runs.emplace_back(1, t);
  }
  out << "TAGS runs=" << runs.size() << '\n';
  for (const auto& [count, t] : runs) out << count << ' ' << tag_letter(t) << '\n';
}

}  // namespace pprep
