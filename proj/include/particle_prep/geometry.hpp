#pragma once

#include "particle_prep/common.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pprep {

/// Anything that can answer signed-distance queries for a closed surface.
/// The level-set field is initialized from one of these; SurfaceGeometry is the
/// mesh-backed implementation and the analytic shapes in builtin.hpp are others.
class DistanceSource {
 public:
  virtual ~DistanceSource() = default;

  virtual int dimension() const = 0;
  virtual Box bounds() const = 0;
  /// Negative inside the closed surface.
  virtual double signed_distance(const Vec& p) const = 0;
  /// min(|signed_distance(p)|, cap); implementations may prune using cap.
  virtual double unsigned_distance(const Vec& p, double cap) const {
    return std::min(std::abs(signed_distance(p)), cap);
  }
  /// -1 inside, +1 outside.
  virtual int contains(const Vec& p) const { return signed_distance(p) < 0.0 ? -1 : 1; }
  /// Nearest point on the surface.
  virtual Vec closest_point(const Vec& p) const = 0;
};

enum class SurfaceFormat { StlAscii, StlBinary, Obj, PolylineCsv };

SurfaceFormat parse_surface_format(const std::string& name);
std::string to_string(SurfaceFormat f);
/// Guesses the format from the extension (and for .stl, from the file content).
SurfaceFormat guess_surface_format(const std::filesystem::path& path);

/// One surface element: a segment (a, b) in 2D or a triangle (a, b, c) in 3D.
struct Element {
  Vec a, b, c;
};

/// Immutable closed surface: closed polylines (2D) or a triangle soup with
/// consistent orientation (3D). Queries are read-only and thread-safe.
class SurfaceGeometry final : public DistanceSource {
 public:
  /// Closed loops; each loop repeats its first vertex at the end.
  static SurfaceGeometry from_loops(const std::vector<std::vector<Vec>>& loops);
  /// Triangles; rejects meshes whose ray parity is inconsistent (not watertight).
  static SurfaceGeometry from_triangles(std::vector<Element> triangles);

  int dimension() const override { return dim_; }
  Box bounds() const override { return bbox_; }
  const Box& bbox() const { return bbox_; }
  const std::vector<Element>& elements() const { return elements_; }
  std::size_t element_count() const { return elements_.size(); }

  double signed_distance(const Vec& p) const override;
  double unsigned_distance(const Vec& p, double cap) const override;
  int contains(const Vec& p) const override;
  Vec closest_point(const Vec& p) const override;

  /// Parity (+1 outside / -1 inside) along one of the three fixed ray directions.
  int ray_parity(const Vec& p, int ray) const;

  SurfaceGeometry(SurfaceGeometry&&) noexcept;
  SurfaceGeometry& operator=(SurfaceGeometry&&) noexcept;
  ~SurfaceGeometry() override;

 private:
  struct Bvh;
  SurfaceGeometry(int dim, std::vector<Element> elements);

  int dim_ = 3;
  std::vector<Element> elements_;
  Box bbox_;
  std::unique_ptr<Bvh> bvh_;
};

/// Reads a surface file. Parse failures raise MalformedInputError naming the
/// line (text formats) or byte offset (binary STL).
SurfaceGeometry load_surface(const std::filesystem::path& path, SurfaceFormat format);

/// Closest point on segment [a, b] / triangle (a, b, c) to p.
Vec closest_point_on_segment(const Vec& p, const Vec& a, const Vec& b);
Vec closest_point_on_triangle(const Vec& p, const Vec& a, const Vec& b, const Vec& c);

}  // namespace pprep
