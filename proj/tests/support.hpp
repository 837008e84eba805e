#pragma once

// Independent oracles and fixtures shared by the unit and acceptance tests.
// Nothing here calls into the library's distance or interpolation code.

#include "particle_prep/builtin.hpp"
#include "particle_prep/kernel.hpp"
#include "particle_prep/levelset.hpp"
#include "particle_prep/relaxation.hpp"

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace testing {

using pprep::Vec;

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Point samples on every element with spacing at most `spacing` (segments:
/// uniform; triangles: a barycentric grid).
std::vector<Vec> sample_surface(const std::vector<pprep::Element>& elements, int dim, double spacing);

/// Minimum distance from p to a point cloud.
double min_sample_distance(const std::vector<Vec>& samples, const Vec& p);

/// Crossing-count parity along direction d: +1 outside, -1 inside.
int ray_parity(const std::vector<pprep::Element>& elements, int dim, const Vec& p, const Vec& d);

/// Exact fraction of the square [x0, x0 + a] x [y0, y0 + a] on the side
/// n . p > c (polygon clipping).
double clipped_fraction(double x0, double y0, double a, const Vec& n, double c);

/// |integral over {x > 0} of grad_a W(r_a - r) dA| for r_a = (-depth, 0),
/// midpoint rule with step `step` (2D).
Vec completion_quadrature_2d(const pprep::Kernel& kernel, double depth, double step);

/// Fine-grid zero crossings of phi along the row y = const through the
/// fine-cell centers with index j: x positions by linear interpolation.
std::vector<double> zero_crossings_row(const pprep::LevelSetField& field, int j, int i_lo, int i_hi);

/// Distance from p to the segment [a, b] (own implementation).
double segment_distance(const Vec& p, const Vec& a, const Vec& b);

/// Exact signed distance of the wedge builtin for parameters (L, H, t, tip_y).
double wedge_signed_distance(const Vec& p, double length, double height, double tip, double tip_y);

/// Counts particles with fewer than `min_neighbors` others within `radius`.
std::size_t count_sparse_particles(const std::vector<Vec>& positions, double radius, int min_neighbors);

/// Minimum (max - min) / mean over all trailing windows of E_k.
double min_window_spread(const pprep::DiagnosticsSeries& d, std::size_t window);

}  // namespace testing
