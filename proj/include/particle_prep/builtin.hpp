#pragma once

#include "particle_prep/geometry.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pprep {

// --- analytic distance sources ----------------------------------------------

class CircleSource final : public DistanceSource {
 public:
  CircleSource(const Vec& center, double radius);
  int dimension() const override { return 2; }
  Box bounds() const override;
  double signed_distance(const Vec& p) const override;
  Vec closest_point(const Vec& p) const override;

 private:
  Vec c_;
  double r_;
};

class SphereSource final : public DistanceSource {
 public:
  SphereSource(const Vec& center, double radius);
  int dimension() const override { return 3; }
  Box bounds() const override;
  double signed_distance(const Vec& p) const override;
  Vec closest_point(const Vec& p) const override;

 private:
  Vec c_;
  double r_;
};

/// Axis-aligned rectangle (dim 2) or cuboid (dim 3).
class BoxSource final : public DistanceSource {
 public:
  BoxSource(int dim, const Box& box);
  int dimension() const override { return dim_; }
  Box bounds() const override { return box_; }
  double signed_distance(const Vec& p) const override;
  Vec closest_point(const Vec& p) const override;

 private:
  int dim_;
  Box box_;
};

/// phi = n . (p - p0), negative on the side opposite to n. `bounds` is the
/// region reported to the field builder.
class HalfSpaceSource final : public DistanceSource {
 public:
  HalfSpaceSource(int dim, const Vec& point, const Vec& normal, const Box& bounds);
  int dimension() const override { return dim_; }
  Box bounds() const override { return bounds_; }
  double signed_distance(const Vec& p) const override;
  Vec closest_point(const Vec& p) const override;

 private:
  int dim_;
  Vec p0_;
  Vec n_;
  Box bounds_;
};

// --- procedural test geometries ---------------------------------------------

using BuiltinParams = std::map<std::string, double>;

/// Raw shape data of a builtin: closed loops (2D) or triangles (3D).
struct BuiltinShape {
  int dim = 2;
  std::vector<std::vector<Vec>> loops;  ///< each loop repeats its first vertex
  std::vector<Element> triangles;

  SurfaceGeometry geometry() const;
  /// Polyline CSV (2D) or ASCII STL (3D).
  void write(std::ostream& out) const;
};

std::vector<std::string> builtin_names();

/// Parameters and defaults accepted by a builtin.
BuiltinParams builtin_defaults(const std::string& name);

/// Defaults overlaid with `params`; for blobs, any user fragment key replaces
/// the default fragment list.
BuiltinParams resolve_builtin_params(const std::string& name, const BuiltinParams& params);

/// Builds a builtin; unknown names, unknown parameters and out-of-range
/// values raise ConfigError.
///   circle:             radius, segments, cx, cy
///   sphere:             radius, subdivisions
///   box:                dim, lx, ly, lz
///   wedge:              length, height, tip, tip_y
///   wedge-with-slit:    length, height, tip, tip_y, slit_width, slit_depth
///   blobs:              radius, segments, gap, fragment1..fragmentN
///   block-with-pole:    dim, width, height, pole_width, pole_height
///   tube-with-branches: length, radius, branches, branch_width, branch_length
BuiltinShape builtin_shape(const std::string& name, const BuiltinParams& params);

inline SurfaceGeometry builtin_geometry(const std::string& name, const BuiltinParams& params) {
  return builtin_shape(name, params).geometry();
}

/// Regular n-gon approximating a circle, as a closed loop (counter-clockwise).
std::vector<Vec> circle_loop(const Vec& center, double radius, int segments);

void write_polyline_csv(const std::vector<std::vector<Vec>>& loops, std::ostream& out);
void write_stl_ascii(const std::vector<Element>& triangles, std::ostream& out);

}  // namespace pprep
