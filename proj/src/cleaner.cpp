#include "particle_prep/cleaner.hpp"

#include "particle_prep/confinement.hpp"
#include "particle_prep/parallel.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <ostream>

namespace pprep::cleaner {

namespace id = interface_id;

std::array<double, 8> corner_phi(const LevelSetField& field, const Index3& g) {
  const int dim = field.dimension();
  const int corners = 1 << dim;
  std::array<double, 8> out{};
  for (int c = 0; c < corners; ++c) {
    // the 2^d cells sharing this corner: offsets 0 or s_a along every axis
    Index3 step{0, 0, 0};
    for (int a = 0; a < dim; ++a) step[a] = ((c >> a) & 1) ? 1 : -1;
    double sum = 0.0;
    for (int m = 0; m < corners; ++m) {
      Index3 n = g;
      for (int a = 0; a < dim; ++a)
        if ((m >> a) & 1) n[a] += step[a];
      sum += field.phi_at(n);
    }
    out[c] = sum / corners;
  }
  return out;
}

InterfaceCensus classify_cells(LevelSetField& field, double eps) {
  if (!(eps > 0.0)) throw ConfigError("interface band eps must be positive");
  auto& packages = field.packages();
  const int n = field.package_cells();
  const int corners = 1 << field.dimension();
  parallel_for(packages.size(), [&](std::size_t p) {
    auto& pkg = packages[p];
    for (int l = 0; l < n; ++l) {
      const auto cv = corner_phi(field, field.global_index(pkg, l));
      double lo = cv[0], hi = cv[0];
      for (int c = 1; c < corners; ++c) {
        lo = std::min(lo, cv[c]);
        hi = std::max(hi, cv[c]);
      }
      std::uint8_t flags = 0;
      // "cut by a level": corners on both sides, a value equal to the level
      // counting as above it (phi >= 0 is outside)
      if (lo < 0.0 && hi >= 0.0) flags |= id::kZeroCut;
      if (lo < eps && hi >= eps) flags |= id::kPositiveCut;
      if (lo < -eps && hi >= -eps) flags |= id::kNegativeCut;
      const double v = pkg.phi[l];
      const bool in_gap = (v > -eps && v < 0.0) || (v > 0.0 && v < eps);
      if (in_gap && !(flags & id::kZeroCut)) flags |= id::kGapCut;
      pkg.interface_id[l] = flags;
    }
  });

  InterfaceCensus census;
  for (const auto& pkg : packages) {
    if (!pkg.core) continue;
    for (int l = 0; l < n; ++l) {
      const auto f = pkg.interface_id[l];
      census.zero_cut += (f & id::kZeroCut) ? 1 : 0;
      census.positive_cut += (f & id::kPositiveCut) ? 1 : 0;
      census.negative_cut += (f & id::kNegativeCut) ? 1 : 0;
      census.gap_cut += (f & id::kGapCut) ? 1 : 0;
    }
  }
  return census;
}

NonResolvedSets find_non_resolved(LevelSetField& field) {
  NonResolvedSets sets;
  auto& packages = field.packages();
  const int n = field.package_cells();
  const int kz = field.dimension() == 3 ? 1 : 0;
  for (auto& pkg : packages) {
    if (!pkg.core) continue;
    for (int l = 0; l < n; ++l) {
      const auto f = pkg.interface_id[l];
      if (!(f & (id::kZeroCut | id::kGapCut))) continue;
      const Index3 g = field.global_index(pkg, l);
      bool has_plus = false, has_minus = false;
      for (int dz = -kz; dz <= kz; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const auto nf = field.interface_id_at({g[0] + dx, g[1] + dy, g[2] + dz});
            has_plus = has_plus || (nf & id::kPositiveCut);
            has_minus = has_minus || (nf & id::kNegativeCut);
          }
      if (!has_plus) {
        pkg.interface_id[l] |= id::kNonResolvedPlus;
        sets.plus.push_back(g);
      }
      if (!has_minus) {
        pkg.interface_id[l] |= id::kNonResolvedMinus;
        sets.minus.push_back(g);
      }
      if (!has_plus || !has_minus) ++sets.union_size;
    }
  }
  return sets;
}

namespace {

struct Estimate {
  bool found = false;
  double distance = std::numeric_limits<double>::infinity();
};

// Minimum over auxiliary-level cells P in the window of
//   | (P - A) l_f + sign * phi_P N_P |
// where sign = +1 for the positive level and -1 for the negative level.
Estimate window_distance(const LevelSetField& field, const Index3& a, std::uint8_t level_flag, double sign,
                         int radius) {
  Estimate e;
  const double lf = field.fine_spacing();
  const int kz = field.dimension() == 3 ? radius : 0;
  for (int dz = -kz; dz <= kz; ++dz)
    for (int dy = -radius; dy <= radius; ++dy)
      for (int dx = -radius; dx <= radius; ++dx) {
        const CellAddress addr = field.resolve({a[0] + dx, a[1] + dy, a[2] + dz});
        if (addr.is_far()) continue;
        const auto& pkg = field.packages()[addr.package];
        if (!(pkg.interface_id[addr.local] & level_flag)) continue;
        const Vec d = lf * Vec(dx, dy, dz) + sign * pkg.phi[addr.local] * pkg.normal[addr.local];
        e.found = true;
        e.distance = std::min(e.distance, d.norm());
      }
  return e;
}

// True when every cell of the 3^d neighborhood has the opposite sign of g.
bool is_island(const LevelSetField& field, const Index3& g) {
  const bool negative = field.phi_at(g) < 0.0;
  const int kz = field.dimension() == 3 ? 1 : 0;
  for (int dz = -kz; dz <= kz; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        if ((field.phi_at(Index3{g[0] + dx, g[1] + dy, g[2] + dz}) < 0.0) == negative) return false;
      }
  return true;
}

/// Adds cells whose sign differs from all 3^d neighbors: the corner averages
/// cannot see them, so a negative speck joins `minus` and a positive one `plus`.
void add_islands(const LevelSetField& field, NonResolvedSets& sets) {
  std::set<Index3> seen(sets.plus.begin(), sets.plus.end());
  seen.insert(sets.minus.begin(), sets.minus.end());
  std::vector<Index3> plus, minus;
  field.for_each_cell([&](int p, int l, const Index3& g) {
    if (!is_island(field, g) || seen.count(g)) return;
    (field.packages()[p].phi[l] < 0.0 ? minus : plus).push_back(g);
  });
  std::sort(plus.begin(), plus.end());
  std::sort(minus.begin(), minus.end());
  sets.plus.insert(sets.plus.end(), plus.begin(), plus.end());
  sets.minus.insert(sets.minus.end(), minus.begin(), minus.end());
  sets.union_size += plus.size() + minus.size();
}

}  // namespace

std::size_t redistance(LevelSetField& field, const NonResolvedSets& sets, const RedistanceOptions& options) {
  const double limit = options.limit_cells * field.fine_spacing();

  struct Edit {
    Index3 cell;
    std::optional<double> plus_value;  // from the positive-level search
    bool plus_found = false;
    std::optional<double> minus_value;
    bool minus_found = false;
  };
  // All estimates read the frozen pre-pass field; writes happen afterwards.
  std::vector<Edit> edits;
  std::map<Index3, std::size_t> slot_of;
  auto edit_for = [&](const Index3& g) -> Edit& {
    const auto [it, inserted] = slot_of.try_emplace(g, edits.size());
    if (inserted) edits.emplace_back().cell = g;
    return edits[it->second];
  };
  for (const auto& g : sets.plus) {
    const Estimate est = window_distance(field, g, interface_id::kPositiveCut, +1.0, options.window_radius);
    Edit& e = edit_for(g);
    e.plus_found = est.found;
    e.plus_value = -std::min(est.distance, limit);
  }
  for (const auto& g : sets.minus) {
    const Estimate est = window_distance(field, g, interface_id::kNegativeCut, -1.0, options.window_radius);
    Edit& e = edit_for(g);
    e.minus_found = est.found;
    e.minus_value = std::min(est.distance, limit);
  }

  std::vector<std::pair<CellAddress, double>> writes;
  writes.reserve(edits.size());
  for (const auto& e : edits) {
    const CellAddress addr = field.resolve(e.cell);
    const double old = field.phi_at(addr);
    double value;
    if (e.plus_value && e.minus_value) {
      // Double membership: applied in order plus then minus, so the minus
      // estimate stands when it saw a real auxiliary cell; with neither found
      // the pre-edit sign is kept at magnitude D_limit, except for a
      // single-cell island, which takes the sign of its neighbors.
      if (e.minus_found) value = *e.minus_value;
      else if (e.plus_found) value = *e.plus_value;
      else value = ((old < 0.0) != is_island(field, e.cell)) ? -limit : limit;
    } else {
      value = e.plus_value ? *e.plus_value : *e.minus_value;
    }
    writes.emplace_back(addr, value);
  }
  std::size_t modified = 0;
  for (const auto& [addr, value] : writes) {
    double& slot = field.packages()[addr.package].phi[addr.local];
    if (slot != value) ++modified;
    slot = value;
  }
  return modified;
}

std::size_t CleanReport::total_modified() const {
  std::size_t n = 0;
  for (const auto& p : passes) n += p.modified;
  return n;
}

namespace {

// Reinitialization after a re-distance pass only touches cells within `reach`
// fine cells (Chebyshev) of an edited cell; the edited cells themselves and
// everything farther out are held.
std::vector<std::vector<char>> reinit_mask(const LevelSetField& field, const NonResolvedSets& sets, int reach) {
  const auto& packages = field.packages();
  const int n = field.package_cells();
  std::vector<std::vector<char>> frozen(packages.size(), std::vector<char>(n, 1));
  const int kz = field.dimension() == 3 ? reach : 0;
  std::set<Index3> edited(sets.plus.begin(), sets.plus.end());
  edited.insert(sets.minus.begin(), sets.minus.end());
  for (const auto& g : edited)
    for (int dz = -kz; dz <= kz; ++dz)
      for (int dy = -reach; dy <= reach; ++dy)
        for (int dx = -reach; dx <= reach; ++dx) {
          const Index3 q{g[0] + dx, g[1] + dy, g[2] + dz};
          if (edited.count(q)) continue;
          const CellAddress a = field.resolve(q);
          if (!a.is_far()) frozen[a.package][a.local] = 0;
        }
  return frozen;
}

}  // namespace

CleanReport clean(LevelSetField& field, const CleanOptions& options) {
  const double eps = options.eps.value_or(0.75 * field.fine_spacing());
  CleanReport report;
  for (int pass = 1;; ++pass) {
    CleanPass row;
    row.pass = pass;
    row.census = classify_cells(field, eps);
    NonResolvedSets sets = find_non_resolved(field);
    add_islands(field, sets);
    row.non_plus = sets.plus.size();
    row.non_minus = sets.minus.size();
    if (sets.empty()) {
      report.passes.push_back(row);
      report.complete = true;
      break;
    }
    if (pass > options.max_passes) {
      report.passes.push_back(row);
      break;
    }
    row.modified = redistance(field, sets, options.redistance);
    const auto frozen = reinit_mask(field, sets, options.reinit_reach);
    const ReinitResult reinit = field.reinitialize(options.reinit_max_iters, options.reinit_tolerance, &frozen);
    row.reinit_residual = reinit.residual;
    field.compute_normals(NormalFallback::PreviousNormal);
    if (options.completion_kernel)
      confinement::compute_completion(field, *options.completion_kernel,
                                      options.completion_eps.value_or(0.75 * field.fine_spacing()));
    report.passes.push_back(row);
  }
  return report;
}

void write_report(const CleanReport& report, std::ostream& out) {
  out << "# pass zero_cut positive_cut negative_cut gap_cut non_plus non_minus modified reinit_residual\n";
  for (const auto& p : report.passes) {
    out << p.pass << ' ' << p.census.zero_cut << ' ' << p.census.positive_cut << ' ' << p.census.negative_cut << ' '
        << p.census.gap_cut << ' ' << p.non_plus << ' ' << p.non_minus << ' ' << p.modified << ' ';
    if (p.reinit_residual) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.6g", *p.reinit_residual);
      out << buf;
    } else {
      out << '-';
    }
    out << '\n';
  }
  out << "# status " << (report.complete ? (report.already_clean() ? "already-clean" : "complete") : "incomplete")
      << '\n';
}

}  // namespace pprep::cleaner
