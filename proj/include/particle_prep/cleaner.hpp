#pragma once

#include "particle_prep/kernel.hpp"
#include "particle_prep/levelset.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace pprep::cleaner {

/// Corner values of a fine cell: each is the mean of the 2^d fine-cell
/// centers sharing that corner. Corner c has offset bit a set for +1/2 along
/// axis a. Only the first 2^d entries are meaningful.
std::array<double, 8> corner_phi(const LevelSetField& field, const Index3& global);

struct InterfaceCensus {
  std::size_t zero_cut = 0;
  std::size_t positive_cut = 0;
  std::size_t negative_cut = 0;
  std::size_t gap_cut = 0;
};

/// Recomputes the zero/positive/negative/gap-cut flags from phi alone. Flags
/// are written for every Inner package so that neighborhood scans at the Core
/// boundary see complete data; the census counts Core-package cells only.
InterfaceCensus classify_cells(LevelSetField& field, double eps);

struct NonResolvedSets {
  std::vector<Index3> plus;   ///< no positive-cut cell in the 3^d neighborhood
  std::vector<Index3> minus;  ///< no negative-cut cell in the 3^d neighborhood
  std::size_t union_size = 0;
  bool empty() const { return plus.empty() && minus.empty(); }
};

/// Zero-cut or gap-cut cells of Core packages lacking an auxiliary-level
/// neighbor. Also sets the non-resolved flags in the interface IDs.
NonResolvedSets find_non_resolved(LevelSetField& field);

struct RedistanceOptions {
  int window_radius = 2;     ///< 5^d search window
  double limit_cells = 3.0;  ///< D_limit in units of l_f
};

/// Replaces phi of non-resolved cells by the capped distance estimate to the
/// surviving auxiliary level (negative for the plus set, positive for the
/// minus set). Reads a frozen snapshot; returns the number of changed cells.
std::size_t redistance(LevelSetField& field, const NonResolvedSets& sets, const RedistanceOptions& options = {});

struct CleanOptions {
  int max_passes = 20;
  /// Interface band half-width; defaults to 0.75 l_f when unset.
  std::optional<double> eps;
  RedistanceOptions redistance;
  int reinit_max_iters = 40;
  double reinit_tolerance = 0.05;
  /// Reinitialization after a pass is limited to this many fine cells around
  /// the edited cells; the edited cells keep their re-distanced values.
  int reinit_reach = 1;
  /// When set, the completion field is recomputed after every modifying pass.
  std::optional<Kernel> completion_kernel;
  /// Heaviside width for the completion field; defaults to 0.75 l_f.
  std::optional<double> completion_eps;
};

struct CleanPass {
  int pass = 0;
  InterfaceCensus census;
  std::size_t non_plus = 0;
  std::size_t non_minus = 0;
  std::size_t modified = 0;
  std::optional<double> reinit_residual;
};

struct CleanReport {
  std::vector<CleanPass> passes;
  /// True when the last pass found no non-resolved cell.
  bool complete = false;
  bool already_clean() const { return complete && passes.size() == 1; }
  std::size_t total_modified() const;
};

/// Classify, find non-resolved cells, re-distance, re-initialize, refresh
/// normals (and the completion field), repeated until no non-resolved cell
/// remains or max_passes modifying passes ran.
CleanReport clean(LevelSetField& field, const CleanOptions& options = {});

/// Plain-text table, one row per pass.
void write_report(const CleanReport& report, std::ostream& out);

}  // namespace pprep::cleaner
