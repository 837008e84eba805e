#include "support.hpp"

#include "particle_prep/builtin.hpp"
#include "particle_prep/cleaner.hpp"
#include "particle_prep/levelset.hpp"

#include <doctest.h>

#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace pprep;
namespace id = pprep::interface_id;

namespace {

LevelSetField make_field(const DistanceSource& src, double lc) {
  return LevelSetField::build(src, LevelSetField::default_domain(src, lc), lc);
}

/// Flags recomputed independently from stored phi: corners averaged from the
/// 2x2 blocks, a level counts as crossed when corners lie on both sides.
std::uint8_t oracle_flags(const LevelSetField& f, const Index3& g, double eps) {
  double lo = 1e300, hi = -1e300;
  for (int cy = 0; cy < 2; ++cy)
    for (int cx = 0; cx < 2; ++cx) {
      double s = 0.0;
      for (int my = 0; my < 2; ++my)
        for (int mx = 0; mx < 2; ++mx) s += f.phi_at(Index3{g[0] + cx - 1 + mx, g[1] + cy - 1 + my, 0});
      lo = std::min(lo, s / 4.0);
      hi = std::max(hi, s / 4.0);
    }
  std::uint8_t flags = 0;
  if (lo < 0 && hi >= 0) flags |= id::kZeroCut;
  if (lo < eps && hi >= eps) flags |= id::kPositiveCut;
  if (lo < -eps && hi >= -eps) flags |= id::kNegativeCut;
  const double v = f.phi_at(g);
  if (!(flags & id::kZeroCut) && ((v > -eps && v < 0) || (v > 0 && v < eps))) flags |= id::kGapCut;
  return flags;
}

/// Exhaustive 3x3 neighborhood scan using the oracle flags.
std::pair<std::set<Index3>, std::set<Index3>> oracle_non_resolved(const LevelSetField& f, double eps) {
  std::set<Index3> plus, minus;
  for (const auto& pkg : f.packages()) {
    if (!pkg.core) continue;
    for (int l = 0; l < f.package_cells(); ++l) {
      const Index3 g = f.global_index(pkg, l);
      if (!(oracle_flags(f, g, eps) & (id::kZeroCut | id::kGapCut))) continue;
      bool has_p = false, has_m = false;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const auto nf = oracle_flags(f, Index3{g[0] + dx, g[1] + dy, 0}, eps);
          has_p = has_p || (nf & id::kPositiveCut);
          has_m = has_m || (nf & id::kNegativeCut);
        }
      if (!has_p) plus.insert(g);
      if (!has_m) minus.insert(g);
    }
  }
  return {plus, minus};
}

/// A Core cell well inside the band, with every cell of its 5x5 window stored.
Index3 interior_core_cell(const LevelSetField& f) {
  for (const auto& pkg : f.packages()) {
    if (!pkg.core) continue;
    const Index3 g = f.global_index(pkg, f.local_index(1, 1, 0));
    bool ok = true;
    for (int dy = -2; dy <= 2; ++dy)
      for (int dx = -2; dx <= 2; ++dx) ok = ok && !f.resolve(Index3{g[0] + dx, g[1] + dy, 0}).is_far();
    if (ok) return g;
  }
  FAIL("no interior core cell");
  return {};
}

void clear_flags(LevelSetField& f) {
  for (auto& pkg : f.packages()) std::fill(pkg.interface_id.begin(), pkg.interface_id.end(), 0);
}

double& phi_ref(LevelSetField& f, const Index3& g) {
  const auto a = f.resolve(g);
  return f.packages()[a.package].phi[a.local];
}

std::vector<double> stored_phi(const LevelSetField& f) {
  std::vector<double> out;
  f.for_each_cell([&](int p, int l, const Index3&) { out.push_back(f.packages()[p].phi[l]); });
  return out;
}

/// Zero crossings of stored phi along the fine column i.
std::vector<double> column_crossings(const LevelSetField& f, int i) {
  std::vector<double> out;
  const double lf = f.fine_spacing();
  for (int j = 0; j + 1 < f.fine_dims()[1]; ++j) {
    const double a = f.phi_at(Index3{i, j, 0}), b = f.phi_at(Index3{i, j + 1, 0});
    if ((a < 0.0) != (b < 0.0)) out.push_back(f.origin().y() + (j + 0.5) * lf + lf * a / (a - b));
  }
  return out;
}

}  // namespace

TEST_CASE("corner_phi: uniform, linear and random fields") {
  auto f = make_field(CircleSource(Vec::Zero(), 1.0), 0.1);
  const Index3 g = interior_core_cell(f);
  const int corners = 4;

  f.assign_phi([](const Vec&) { return 0.37; });
  auto cv = cleaner::corner_phi(f, g);
  for (int c = 0; c < corners; ++c) CHECK(cv[c] == doctest::Approx(0.37).epsilon(1e-15));

  f.assign_phi([](const Vec& p) { return p.x(); });
  cv = cleaner::corner_phi(f, g);
  const Vec center = f.cell_center(g);
  const double lf = f.fine_spacing();
  for (int c = 0; c < corners; ++c) {
    const double x = center.x() + ((c & 1) ? 0.5 : -0.5) * lf;
    CHECK(cv[c] == doctest::Approx(x).epsilon(1e-14));
  }

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  f.assign_phi([&](const Vec&) { return u(rng); });
  for (const auto& pkg : f.packages()) {
    if (!pkg.core) continue;
    for (int l = 0; l < f.package_cells(); ++l) {
      const Index3 c = f.global_index(pkg, l);
      cv = cleaner::corner_phi(f, c);
      for (int k = 0; k < corners; ++k) {
        const int sx = (k & 1) ? 1 : -1, sy = (k & 2) ? 1 : -1;
        const double expect = 0.25 * (f.phi_at(c) + f.phi_at(Index3{c[0] + sx, c[1], 0}) +
                                      f.phi_at(Index3{c[0], c[1] + sy, 0}) + f.phi_at(Index3{c[0] + sx, c[1] + sy, 0}));
        CHECK(std::abs(cv[k] - expect) <= 1e-15 * std::max(1.0, std::abs(expect)));
      }
    }
  }
}

TEST_CASE("classify: stripe on a corner line gives one zero-cut column") {
  auto f = make_field(CircleSource(Vec::Zero(), 1.0), 0.1);
  const double lf = f.fine_spacing();
  const Index3 g = interior_core_cell(f);
  const double x0 = f.cell_center(g).x() + 0.5 * lf;  // face between columns g[0] and g[0] + 1
  f.assign_phi([&](const Vec& p) { return p.x() - x0; });
  cleaner::classify_cells(f, 0.75 * lf);
  std::set<int> columns;
  f.for_each_cell([&](int p, int l, const Index3& c) {
    if (f.packages()[p].core && (f.packages()[p].interface_id[l] & id::kZeroCut)) columns.insert(c[0]);
  });
  REQUIRE(columns.size() == 1);
  CHECK(*columns.begin() == g[0]);
}

TEST_CASE("classify: flags match an independent recomputation") {
  for (const char* name : {"wedge-with-slit", "blobs"}) {
    const auto geom = builtin_geometry(name, {});
    auto f = make_field(geom, 0.04);
    const double eps = 0.75 * f.fine_spacing();
    cleaner::classify_cells(f, eps);
    std::size_t checked = 0;
    for (const auto& pkg : f.packages()) {
      if (!pkg.core) continue;
      for (int l = 0; l < f.package_cells(); ++l, ++checked)
        CHECK((pkg.interface_id[l] & 0x0f) == oracle_flags(f, f.global_index(pkg, l), eps));
    }
    CHECK(checked > 0);
  }
}

TEST_CASE("classify: circle positive-cut ring lies outside the interface") {
  auto f = make_field(CircleSource(Vec::Zero(), 1.0), 0.1);
  const double lf = f.fine_spacing();
  const auto census = cleaner::classify_cells(f, 0.75 * lf);
  CHECK(census.zero_cut > 0);
  CHECK(census.positive_cut > 0);
  std::set<int> sectors;
  double r_zero = 0.0, r_pos = 0.0;
  f.for_each_cell([&](int p, int l, const Index3& g) {
    const auto flags = f.packages()[p].interface_id[l];
    const Vec c = f.cell_center(g);
    if (flags & id::kPositiveCut) {
      CHECK(c.head<2>().norm() > 1.0);
      sectors.insert(static_cast<int>(std::floor((std::atan2(c.y(), c.x()) + std::numbers::pi) / (2 * std::numbers::pi) * 64)));
      r_pos = std::max(r_pos, c.head<2>().norm());
    }
    if (flags & id::kZeroCut) r_zero = std::max(r_zero, c.head<2>().norm());
  });
  CHECK(sectors.size() == 64);
  CHECK(r_pos > r_zero);
}

TEST_CASE("classify: an all-positive band has no flags") {
  auto f = make_field(CircleSource(Vec::Zero(), 1.0), 0.1);
  f.assign_phi([](const Vec&) { return 0.3; });
  const auto census = cleaner::classify_cells(f, 0.75 * f.fine_spacing());
  CHECK(census.zero_cut == 0);
  CHECK(census.positive_cut == 0);
  CHECK(census.negative_cut == 0);
  CHECK(census.gap_cut == 0);
  f.for_each_cell([&](int p, int l, const Index3&) {
    if (f.packages()[p].core) CHECK(f.packages()[p].interface_id[l] == 0);
  });
}

TEST_CASE("find_non_resolved: resolved circle has empty sets") {
  auto f = make_field(CircleSource(Vec::Zero(), 1.0), 0.1);
  cleaner::classify_cells(f, 0.75 * f.fine_spacing());
  const auto sets = cleaner::find_non_resolved(f);
  CHECK(sets.empty());
  CHECK(sets.union_size == 0);
}

TEST_CASE("find_non_resolved: sliver wedge tip lands in the minus set") {
  const double lc = 0.04, lf = lc / 4.0;
  // tip_y off the cell-center rows so the sliver crosses corner values
  const auto geom = builtin_geometry("wedge", {{"height", 0.1}, {"tip", 0.5 * lf}, {"tip_y", 0.37 * lf}});
  auto f = make_field(geom, lc);
  const double eps = 0.75 * lf;
  cleaner::classify_cells(f, eps);
  const auto sets = cleaner::find_non_resolved(f);
  const auto [oracle_plus, oracle_minus] = oracle_non_resolved(f, eps);
  CHECK(std::set<Index3>(sets.plus.begin(), sets.plus.end()) == oracle_plus);
  CHECK(std::set<Index3>(sets.minus.begin(), sets.minus.end()) == oracle_minus);

  // Within 4 l_f of the tip the wedge is thinner than 1.3 l_f, so no cell in
  // a 3x3 neighborhood can straddle -eps.
  std::size_t tip_cells = 0;
  for (const auto& pkg : f.packages()) {
    if (!pkg.core) continue;
    for (int l = 0; l < f.package_cells(); ++l) {
      const Index3 g = f.global_index(pkg, l);
      const Vec c = f.cell_center(g);
      if (!(pkg.interface_id[l] & id::kZeroCut) || c.x() < 1.0 - 3.0 * lf || c.x() > 1.0 + lf) continue;
      ++tip_cells;
      CHECK(oracle_minus.count(g) == 1);
      CHECK((pkg.interface_id[l] & id::kNonResolvedMinus) != 0);
    }
  }
  CHECK(tip_cells > 0);
}

TEST_CASE("find_non_resolved: sub-resolution blob is minus-only") {
  const double lc = 0.1, lf = lc / 4.0;
  auto f = make_field(CircleSource(Vec::Zero(), 0.5 * lf), lc);
  const double eps = 0.75 * lf;
  cleaner::classify_cells(f, eps);
  const auto sets = cleaner::find_non_resolved(f);
  std::size_t cut = 0;
  std::set<Index3> minus(sets.minus.begin(), sets.minus.end());
  f.for_each_cell([&](int p, int l, const Index3& g) {
    if (!(f.packages()[p].interface_id[l] & (id::kZeroCut | id::kGapCut))) return;
    ++cut;
    CHECK(minus.count(g) == 1);
  });
  CHECK(cut > 0);
  CHECK(sets.plus.empty());
}

TEST_CASE("redistance: plug-in values") {
  auto f = make_field(CircleSource(Vec::Zero(), 1.0), 0.1);
  const double lf = f.fine_spacing();
  const Index3 a = interior_core_cell(f);

  SUBCASE("empty window gives -D_limit") {
    clear_flags(f);
    cleaner::NonResolvedSets sets;
    sets.plus = {a};
    CHECK(cleaner::redistance(f, sets) == 1);
    CHECK(f.phi_at(a) == doctest::Approx(-3.0 * lf).epsilon(1e-14));
  }
  SUBCASE("one positive-cut neighbor at offset (1, 0)") {
    clear_flags(f);
    const Index3 p{a[0] + 1, a[1], 0};
    const auto addr = f.resolve(p);
    auto& pkg = f.packages()[addr.package];
    pkg.interface_id[addr.local] = id::kPositiveCut;
    pkg.phi[addr.local] = 0.2 * lf;
    pkg.normal[addr.local] = Vec(1, 0, 0);
    cleaner::NonResolvedSets sets;
    sets.plus = {a};
    cleaner::redistance(f, sets);
    CHECK(f.phi_at(a) == doctest::Approx(-1.2 * lf).epsilon(1e-14));
  }
  SUBCASE("mirrored rule for the minus set") {
    clear_flags(f);
    const Index3 p{a[0], a[1] - 2, 0};
    const auto addr = f.resolve(p);
    auto& pkg = f.packages()[addr.package];
    pkg.interface_id[addr.local] = id::kNegativeCut;
    pkg.phi[addr.local] = -0.5 * lf;
    pkg.normal[addr.local] = Vec(0, 1, 0);
    cleaner::NonResolvedSets sets;
    sets.minus = {a};
    cleaner::redistance(f, sets);
    // offset (0, -2) l_f minus phi_P N_P = (0, -1.5) l_f
    CHECK(f.phi_at(a) == doctest::Approx(1.5 * lf).epsilon(1e-14));
  }
  SUBCASE("double membership with empty windows keeps the pre-edit sign") {
    clear_flags(f);
    const Index3 b{a[0] + 1, a[1], 0};
    cleaner::NonResolvedSets sets;
    sets.plus = {a};
    sets.minus = {a};
    for (const double s : {-1.0, 1.0}) {
      phi_ref(f, a) = 0.1 * s * lf;
      phi_ref(f, b) = 0.5 * s * lf;  // one same-sign neighbor: not an island
      cleaner::redistance(f, sets);
      CHECK(f.phi_at(a) == doctest::Approx(3.0 * s * lf).epsilon(1e-14));
    }
  }
  SUBCASE("double membership: an isolated single cell takes its neighbors' sign") {
    clear_flags(f);
    const bool surround_negative = f.phi_at(Index3{a[0] + 1, a[1], 0}) < 0.0;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        phi_ref(f, Index3{a[0] + dx, a[1] + dy, 0}) = (surround_negative ? -2.0 : 2.0) * lf;
    phi_ref(f, a) = (surround_negative ? 0.1 : -0.1) * lf;
    cleaner::NonResolvedSets sets;
    sets.plus = {a};
    sets.minus = {a};
    cleaner::redistance(f, sets);
    CHECK(f.phi_at(a) == doctest::Approx((surround_negative ? -3.0 : 3.0) * lf).epsilon(1e-14));
  }
  SUBCASE("double membership: a real negative-level estimate wins") {
    clear_flags(f);
    const auto addr = f.resolve(Index3{a[0] + 1, a[1], 0});
    auto& pkg = f.packages()[addr.package];
    pkg.interface_id[addr.local] = id::kNegativeCut;
    pkg.phi[addr.local] = -0.8 * lf;
    pkg.normal[addr.local] = Vec(-1, 0, 0);
    cleaner::NonResolvedSets sets;
    sets.plus = {a};
    sets.minus = {a};
    cleaner::redistance(f, sets);
    CHECK(f.phi_at(a) == doctest::Approx(0.2 * lf).epsilon(1e-12));
  }
}

TEST_CASE("redistance: sliver wedge edits are signed, bounded and remove the tip crossing") {
  const double lc = 0.04, lf = lc / 4.0;
  const auto geom = builtin_geometry("wedge", {{"height", 0.1}, {"tip", 0.5 * lf}, {"tip_y", 0.0}});
  auto f = make_field(geom, lc);
  cleaner::classify_cells(f, 0.75 * lf);
  const auto sets = cleaner::find_non_resolved(f);
  REQUIRE(!sets.empty());
  const std::set<Index3> plus(sets.plus.begin(), sets.plus.end());
  const std::set<Index3> minus(sets.minus.begin(), sets.minus.end());
  cleaner::redistance(f, sets);
  for (const auto& g : plus)
    if (!minus.count(g)) CHECK(f.phi_at(g) < 0.0);
  for (const auto& g : minus)
    if (!plus.count(g)) CHECK(f.phi_at(g) > 0.0);
  for (const auto& g : plus) CHECK(std::abs(f.phi_at(g)) <= 3.0 * lf + 1e-15);
  for (const auto& g : minus) CHECK(std::abs(f.phi_at(g)) <= 3.0 * lf + 1e-15);

  // Every fine row through the last two fine cells of the tip is now outside.
  for (const auto& g : minus) {
    const Vec c = f.cell_center(g);
    if (c.x() > 1.0 - 2.0 * lf && c.x() < 1.0) CHECK(f.phi_at(g) > 0.0);
  }
}

TEST_CASE("clean: resolved circle is already clean") {
  auto f = make_field(CircleSource(Vec::Zero(), 1.0), 0.1);
  const auto before = stored_phi(f);
  const auto report = cleaner::clean(f);
  CHECK(report.complete);
  CHECK(report.already_clean());
  REQUIRE(report.passes.size() == 1);
  CHECK(report.passes[0].modified == 0);
  CHECK(stored_phi(f) == before);
  std::ostringstream out;
  cleaner::write_report(report, out);
  CHECK(out.str().find("already-clean") != std::string::npos);
}

TEST_CASE("clean: wedge with slit converges, keeps tags, and is idempotent") {
  const double lc = 0.08, lf = lc / 4.0;
  const auto geom = builtin_geometry("wedge-with-slit", {{"height", 0.1}, {"tip_y", 0.0057}});
  auto f = make_field(geom, lc);
  const auto tags = f.tags();
  const auto report = cleaner::clean(f);
  CHECK(report.complete);
  CHECK(report.passes.size() >= 2);
  CHECK(f.tags() == tags);

  cleaner::classify_cells(f, 0.75 * lf);
  CHECK(cleaner::find_non_resolved(f).empty());

  const auto second = cleaner::clean(f);
  CHECK(second.already_clean());
  CHECK(second.total_modified() == 0);
}

TEST_CASE("clean: non-resolved count never grows across passes") {
  const std::vector<std::pair<std::string, BuiltinParams>> cases{
      {"wedge-with-slit", {}},
      {"wedge-with-slit", {{"height", 0.1}, {"tip_y", 0.0057}}},
      {"wedge", {{"height", 0.2}, {"tip_y", 0.0057}}},
      {"wedge", {{"height", 0.1}, {"tip_y", 0.0123}}},
      {"blobs", {}},
      {"block-with-pole", {}},
      {"tube-with-branches", {}}};
  for (const auto& [name, params] : cases)
    for (const double lc : {0.16, 0.08, 0.04, 0.02}) {
      auto f = make_field(builtin_geometry(name, params), lc);
      const auto report = cleaner::clean(f);
      INFO(name << " (" << params.size() << " params) lc " << lc);
      CHECK(report.complete);
      for (std::size_t i = 1; i < report.passes.size(); ++i) {
        const auto& prev = report.passes[i - 1];
        const auto& cur = report.passes[i];
        INFO("pass " << cur.pass);
        CHECK(cur.non_plus + cur.non_minus <= prev.non_plus + prev.non_minus);
      }
    }
}

TEST_CASE("clean: features at least 4 l_f thick keep their interface") {
  const double lc = 0.04, lf = lc / 4.0;
  const double thickness = 4.3 * lf;
  const auto geom = builtin_geometry("box", {{"lx", 1.0}, {"ly", thickness}});
  auto f = make_field(geom, lc);
  const int i_mid = static_cast<int>(std::floor((0.5 - f.origin().x()) / lf));
  const int j_mid = static_cast<int>(std::floor((0.5 * thickness - f.origin().y()) / lf));
  const auto rows_before = testing::zero_crossings_row(f, j_mid, 0, f.fine_dims()[0] - 1);
  const auto cols_before = column_crossings(f, i_mid);
  REQUIRE(rows_before.size() == 2);
  REQUIRE(cols_before.size() == 2);

  cleaner::clean(f);
  const auto rows_after = testing::zero_crossings_row(f, j_mid, 0, f.fine_dims()[0] - 1);
  const auto cols_after = column_crossings(f, i_mid);
  REQUIRE(rows_after.size() == 2);
  REQUIRE(cols_after.size() == 2);
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(rows_before[k] - rows_after[k]) < 0.5 * lf);
    CHECK(std::abs(cols_before[k] - cols_after[k]) < 0.5 * lf);
  }
}
