#include "particle_prep/builtin.hpp"

#include <cstdio>
#include <numbers>
#include <ostream>

namespace pprep {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

int as_count(double v, const std::string& key, int lo) {
  const double r = std::round(v);
  require(r == v && r >= lo && r <= 1e7, key + " must be an integer >= " + std::to_string(lo));
  return static_cast<int>(r);
}

std::vector<Vec> closed(std::vector<Vec> loop) {
  loop.push_back(loop.front());
  return loop;
}

/// Appends quad (a, b, c, d) as two triangles whose normal points along `outward`.
void add_quad(std::vector<Element>& tris, const Vec& a, const Vec& b, const Vec& c, const Vec& d,
              const Vec& outward) {
  if ((b - a).cross(c - a).dot(outward) >= 0.0) {
    tris.push_back({a, b, c});
    tris.push_back({a, c, d});
  } else {
    tris.push_back({a, c, b});
    tris.push_back({a, d, c});
  }
}

void add_cuboid_sides(std::vector<Element>& tris, const Vec& lo, const Vec& hi) {
  const Vec p000(lo.x(), lo.y(), lo.z()), p100(hi.x(), lo.y(), lo.z()), p110(hi.x(), hi.y(), lo.z()),
      p010(lo.x(), hi.y(), lo.z());
  const Vec p001(lo.x(), lo.y(), hi.z()), p101(hi.x(), lo.y(), hi.z()), p111(hi.x(), hi.y(), hi.z()),
      p011(lo.x(), hi.y(), hi.z());
  add_quad(tris, p000, p100, p101, p001, -Vec::UnitY());
  add_quad(tris, p100, p110, p111, p101, Vec::UnitX());
  add_quad(tris, p110, p010, p011, p111, Vec::UnitY());
  add_quad(tris, p010, p000, p001, p011, -Vec::UnitX());
}

std::vector<Element> cuboid(const Vec& lo, const Vec& hi) {
  std::vector<Element> tris;
  add_cuboid_sides(tris, lo, hi);
  add_quad(tris, lo, Vec(hi.x(), lo.y(), lo.z()), Vec(hi.x(), hi.y(), lo.z()), Vec(lo.x(), hi.y(), lo.z()),
           -Vec::UnitZ());
  add_quad(tris, Vec(lo.x(), lo.y(), hi.z()), Vec(hi.x(), lo.y(), hi.z()), hi, Vec(lo.x(), hi.y(), hi.z()),
           Vec::UnitZ());
  return tris;
}

std::vector<Element> icosphere(double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      const auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(f.size() * 4);
    for (const auto& tri : f) {
      const int ab = midpoint(tri[0], tri[1]), bc = midpoint(tri[1], tri[2]), ca = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  std::vector<Element> tris;
  tris.reserve(f.size());
  for (const auto& tri : f) tris.push_back({radius * v[tri[0]], radius * v[tri[1]], radius * v[tri[2]]});
  return tris;
}

BuiltinParams merged(const std::string& name, const BuiltinParams& params) {
  BuiltinParams out = builtin_defaults(name);
  for (const auto& [key, value] : params) {
    const bool fragment_key = name == "blobs" && key.rfind("fragment", 0) == 0 && key.size() > 8 &&
                              key.find_first_not_of("0123456789", 8) == std::string::npos;
    require(out.count(key) || fragment_key, "builtin '" + name + "' has no parameter '" + key + "'");
    require(std::isfinite(value), "builtin parameter '" + key + "' must be finite");
    out[key] = value;
  }
  return out;
}

BuiltinShape make_wedge(const BuiltinParams& p, bool slit) {
  const double L = p.at("length"), H = p.at("height"), t = p.at("tip"), ty = p.at("tip_y");
  require(L > 0.0 && H > 0.0, "wedge length and height must be positive");
  require(t >= 0.0, "wedge tip thickness must be non-negative");
  require(ty - 0.5 * t > -H && ty + 0.5 * t < H, "wedge tip must lie within the base height");
  std::vector<Vec> loop = {{0, -H, 0}};
  if (t > 0.0) {
    loop.emplace_back(L, ty - 0.5 * t, 0);
    loop.emplace_back(L, ty + 0.5 * t, 0);
  } else {
    loop.emplace_back(L, ty, 0);
  }
  loop.emplace_back(0, H, 0);
  if (slit) {
    const double w = p.at("slit_width"), s = p.at("slit_depth");
    require(w > 0.0 && s > 0.0 && s < L, "slit width and depth must be positive, depth below the length");
    const double upper = H + (ty + 0.5 * t - H) * s / L, lower = -H + (ty - 0.5 * t + H) * s / L;
    require(0.5 * w < upper && -0.5 * w > lower, "slit must stay inside the wedge");
    loop.emplace_back(0, 0.5 * w, 0);
    loop.emplace_back(s, 0.5 * w, 0);
    loop.emplace_back(s, -0.5 * w, 0);
    loop.emplace_back(0, -0.5 * w, 0);
  }
  BuiltinShape shape;
  shape.loops.push_back(closed(std::move(loop)));
  return shape;
}

BuiltinShape make_blobs(const BuiltinParams& p) {
  const double R = p.at("radius"), gap = p.at("gap");
  const int segments = as_count(p.at("segments"), "segments", 8);
  require(R > 0.0 && gap > 0.0, "blob radius and gap must be positive");
  std::vector<double> fragments;
  for (int k = 1;; ++k) {
    const auto it = p.find("fragment" + std::to_string(k));
    if (it == p.end()) break;
    require(it->second > 0.0, "fragment radii must be positive");
    fragments.push_back(it->second);
  }
  BuiltinShape shape;
  shape.loops.push_back(circle_loop(Vec::Zero(), R, segments));
  const int n = static_cast<int>(fragments.size());
  for (int k = 0; k < n; ++k) {
    const double angle = 2.0 * kPi * k / n;
    const double dist = R + gap + fragments[k];
    const Vec c(dist * std::cos(angle), dist * std::sin(angle), 0.0);
    shape.loops.push_back(circle_loop(c, fragments[k], 64));
  }
  return shape;
}

BuiltinShape make_block_with_pole(const BuiltinParams& p) {
  const int dim = as_count(p.at("dim"), "dim", 2);
  require(dim == 2 || dim == 3, "dim must be 2 or 3");
  const double W = p.at("width"), Hb = p.at("height"), pw = p.at("pole_width"), ph = p.at("pole_height");
  require(W > 0.0 && Hb > 0.0 && ph > 0.0, "block and pole sizes must be positive");
  require(pw > 0.0 && pw < W, "pole width must lie in (0, width)");
  const double c = 0.5 * W, a = c - 0.5 * pw, b = c + 0.5 * pw, top = Hb + ph;
  BuiltinShape shape;
  shape.dim = dim;
  if (dim == 2) {
    shape.loops.push_back(closed({{0, 0, 0}, {W, 0, 0}, {W, Hb, 0}, {b, Hb, 0}, {b, top, 0}, {a, top, 0},
                                  {a, Hb, 0}, {0, Hb, 0}}));
    return shape;
  }
  auto& tris = shape.triangles;
  const Vec lo(0, 0, 0), hi(W, W, Hb);
  add_cuboid_sides(tris, lo, hi);
  add_quad(tris, Vec(0, 0, 0), Vec(W, 0, 0), Vec(W, W, 0), Vec(0, W, 0), -Vec::UnitZ());
  // top face of the block is a frame around the pole's footprint
  const std::array<Vec, 4> outer = {Vec(0, 0, Hb), Vec(W, 0, Hb), Vec(W, W, Hb), Vec(0, W, Hb)};
  const std::array<Vec, 4> inner = {Vec(a, a, Hb), Vec(b, a, Hb), Vec(b, b, Hb), Vec(a, b, Hb)};
  for (int k = 0; k < 4; ++k)
    add_quad(tris, outer[k], outer[(k + 1) % 4], inner[(k + 1) % 4], inner[k], Vec::UnitZ());
  add_cuboid_sides(tris, Vec(a, a, Hb), Vec(b, b, top));
  add_quad(tris, Vec(a, a, top), Vec(b, a, top), Vec(b, b, top), Vec(a, b, top), Vec::UnitZ());
  return shape;
}

BuiltinShape make_tube(const BuiltinParams& p) {
  const double L = p.at("length"), R = p.at("radius"), bw = p.at("branch_width"), bl = p.at("branch_length");
  const int n = as_count(p.at("branches"), "branches", 0);
  require(L > 0.0 && R > 0.0 && bl > 0.0, "tube length, radius and branch length must be positive");
  require(bw > 0.0 && bw * n < L, "branch widths must be positive and fit along the tube");
  std::vector<Vec> loop = {{0, -R, 0}, {L, -R, 0}, {L, R, 0}};
  for (int k = n - 1; k >= 0; --k) {
    const double xc = L * (k + 1) / (n + 1);
    loop.emplace_back(xc + 0.5 * bw, R, 0);
    loop.emplace_back(xc + 0.5 * bw, R + bl, 0);
    loop.emplace_back(xc - 0.5 * bw, R + bl, 0);
    loop.emplace_back(xc - 0.5 * bw, R, 0);
  }
  loop.emplace_back(0, R, 0);
  BuiltinShape shape;
  shape.loops.push_back(closed(std::move(loop)));
  return shape;
}

}  // namespace

// --- analytic sources ---------------------------------------------------------

CircleSource::CircleSource(const Vec& center, double radius) : c_(center), r_(radius) {
  if (!(radius > 0.0)) throw ConfigError("circle radius must be positive");
  c_.z() = 0.0;
}

Box CircleSource::bounds() const {
  Box b{c_ - Vec(r_, r_, 0), c_ + Vec(r_, r_, 0)};
  return b;
}

double CircleSource::signed_distance(const Vec& p) const {
  return (Vec(p.x(), p.y(), 0.0) - c_).norm() - r_;
}

Vec CircleSource::closest_point(const Vec& p) const {
  Vec d = Vec(p.x(), p.y(), 0.0) - c_;
  if (d.norm() == 0.0) d = Vec::UnitX();
  return c_ + r_ * d.normalized();
}

SphereSource::SphereSource(const Vec& center, double radius) : c_(center), r_(radius) {
  if (!(radius > 0.0)) throw ConfigError("sphere radius must be positive");
}

Box SphereSource::bounds() const { return {c_ - Vec::Constant(r_), c_ + Vec::Constant(r_)}; }

double SphereSource::signed_distance(const Vec& p) const { return (p - c_).norm() - r_; }

Vec SphereSource::closest_point(const Vec& p) const {
  Vec d = p - c_;
  if (d.norm() == 0.0) d = Vec::UnitX();
  return c_ + r_ * d.normalized();
}

BoxSource::BoxSource(int dim, const Box& box) : dim_(dim), box_(box) {
  if (dim != 2 && dim != 3) throw ConfigError("box dimension must be 2 or 3");
  for (int a = 0; a < dim; ++a)
    if (!(box.hi[a] > box.lo[a])) throw ConfigError("box extents must be positive");
  if (dim == 2) box_.lo.z() = box_.hi.z() = 0.0;
}

double BoxSource::signed_distance(const Vec& p) const {
  const Vec c = box_.center(), half = 0.5 * box_.extent();
  Vec q = Vec::Zero();
  for (int a = 0; a < dim_; ++a) q[a] = std::abs(p[a] - c[a]) - half[a];
  double inside = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim_; ++a) inside = std::max(inside, q[a]);
  return q.cwiseMax(0.0).norm() + std::min(inside, 0.0);
}

Vec BoxSource::closest_point(const Vec& p) const {
  Vec out = p;
  if (dim_ == 2) out.z() = 0.0;
  if (signed_distance(p) > 0.0) {
    for (int a = 0; a < dim_; ++a) out[a] = std::clamp(p[a], box_.lo[a], box_.hi[a]);
    return out;
  }
  int best_axis = 0;
  double best = std::numeric_limits<double>::infinity(), target = 0.0;
  for (int a = 0; a < dim_; ++a) {
    const double to_lo = p[a] - box_.lo[a], to_hi = box_.hi[a] - p[a];
    if (to_lo < best) best = to_lo, best_axis = a, target = box_.lo[a];
    if (to_hi < best) best = to_hi, best_axis = a, target = box_.hi[a];
  }
  out[best_axis] = target;
  return out;
}

HalfSpaceSource::HalfSpaceSource(int dim, const Vec& point, const Vec& normal, const Box& bounds)
    : dim_(dim), p0_(point), n_(normal.normalized()), bounds_(bounds) {
  if (dim != 2 && dim != 3) throw ConfigError("half-space dimension must be 2 or 3");
  if (!(normal.norm() > 0.0)) throw ConfigError("half-space normal must be non-zero");
}

double HalfSpaceSource::signed_distance(const Vec& p) const { return n_.dot(p - p0_); }

Vec HalfSpaceSource::closest_point(const Vec& p) const { return p - signed_distance(p) * n_; }

// --- builtins -----------------------------------------------------------------

std::vector<Vec> circle_loop(const Vec& center, double radius, int segments) {
  std::vector<Vec> loop;
  loop.reserve(segments + 1);
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * kPi * i / segments;
    loop.emplace_back(center.x() + radius * std::cos(a), center.y() + radius * std::sin(a), 0.0);
  }
  loop.push_back(loop.front());
  return loop;
}

std::vector<std::string> builtin_names() {
  return {"circle", "sphere", "box", "wedge", "wedge-with-slit", "blobs", "block-with-pole", "tube-with-branches"};
}

BuiltinParams builtin_defaults(const std::string& name) {
  if (name == "circle") return {{"radius", 1.0}, {"segments", 512}, {"cx", 0.0}, {"cy", 0.0}};
  if (name == "sphere") return {{"radius", 1.0}, {"subdivisions", 4}};
  if (name == "box") return {{"dim", 2}, {"lx", 1.0}, {"ly", 1.0}, {"lz", 1.0}};
  if (name == "wedge") return {{"length", 1.0}, {"height", 0.2}, {"tip", 0.0}, {"tip_y", 0.0}};
  if (name == "wedge-with-slit")
    return {{"length", 1.0}, {"height", 0.2},     {"tip", 0.0},
            {"tip_y", 0.0},  {"slit_width", 0.004}, {"slit_depth", 0.4}};
  if (name == "blobs")
    return {{"radius", 0.5}, {"segments", 256}, {"gap", 0.1}, {"fragment1", 0.01}, {"fragment2", 0.02},
            {"fragment3", 0.04}};
  if (name == "block-with-pole")
    return {{"dim", 2}, {"width", 1.0}, {"height", 0.5}, {"pole_width", 0.02}, {"pole_height", 0.3}};
  if (name == "tube-with-branches")
    return {{"length", 2.0}, {"radius", 0.25}, {"branches", 3}, {"branch_width", 0.02}, {"branch_length", 0.3}};
  throw ConfigError("unknown builtin geometry '" + name + "'");
}

BuiltinParams resolve_builtin_params(const std::string& name, const BuiltinParams& params) {
  BuiltinParams p = merged(name, params);
  if (name == "blobs") {
    // user-supplied fragment keys replace the default list entirely
    bool custom = false;
    for (const auto& kv : params) custom = custom || kv.first.rfind("fragment", 0) == 0;
    if (custom)
      for (auto it = p.begin(); it != p.end();)
        it = (it->first.rfind("fragment", 0) == 0 && !params.count(it->first)) ? p.erase(it) : std::next(it);
  }
  return p;
}

BuiltinShape builtin_shape(const std::string& name, const BuiltinParams& params) {
  const BuiltinParams p = resolve_builtin_params(name, params);
  if (name == "circle") {
    require(p.at("radius") > 0.0, "circle radius must be positive");
    BuiltinShape s;
    s.loops.push_back(
        circle_loop(Vec(p.at("cx"), p.at("cy"), 0.0), p.at("radius"), as_count(p.at("segments"), "segments", 3)));
    return s;
  }
  if (name == "sphere") {
    require(p.at("radius") > 0.0, "sphere radius must be positive");
    const int sub = as_count(p.at("subdivisions"), "subdivisions", 0);
    require(sub <= 7, "subdivisions must be at most 7");
    BuiltinShape s;
    s.dim = 3;
    s.triangles = icosphere(p.at("radius"), sub);
    return s;
  }
  if (name == "box") {
    const int dim = as_count(p.at("dim"), "dim", 2);
    require(dim == 2 || dim == 3, "dim must be 2 or 3");
    const double lx = p.at("lx"), ly = p.at("ly"), lz = p.at("lz");
    require(lx > 0.0 && ly > 0.0 && (dim == 2 || lz > 0.0), "box side lengths must be positive");
    BuiltinShape s;
    s.dim = dim;
    if (dim == 2)
      s.loops.push_back(closed({{0, 0, 0}, {lx, 0, 0}, {lx, ly, 0}, {0, ly, 0}}));
    else
      s.triangles = cuboid(Vec::Zero(), Vec(lx, ly, lz));
    return s;
  }
  if (name == "wedge") return make_wedge(p, false);
  if (name == "wedge-with-slit") return make_wedge(p, true);
  if (name == "blobs") return make_blobs(p);
  if (name == "block-with-pole") return make_block_with_pole(p);
  return make_tube(p);
}

SurfaceGeometry BuiltinShape::geometry() const {
  return dim == 2 ? SurfaceGeometry::from_loops(loops) : SurfaceGeometry::from_triangles(triangles);
}

void BuiltinShape::write(std::ostream& out) const {
  if (dim == 2)
    write_polyline_csv(loops, out);
  else
    write_stl_ascii(triangles, out);
}

void write_polyline_csv(const std::vector<std::vector<Vec>>& loops, std::ostream& out) {
  for (std::size_t i = 0; i < loops.size(); ++i) {
    if (i > 0) out << '\n';
    const auto& loop = loops[i];
    // the closing vertex is implicit in the file format
    const std::size_t n = loop.size() > 1 && loop.front() == loop.back() ? loop.size() - 1 : loop.size();
    for (std::size_t k = 0; k < n; ++k) out << fmt(loop[k].x()) << ',' << fmt(loop[k].y()) << '\n';
  }
}

void write_stl_ascii(const std::vector<Element>& triangles, std::ostream& out) {
  out << "solid particle_prep\n";
  for (const auto& t : triangles) {
    Vec n = (t.b - t.a).cross(t.c - t.a);
    if (n.norm() > 0.0) n.normalize();
    out << "  facet normal " << fmt(n.x()) << ' ' << fmt(n.y()) << ' ' << fmt(n.z()) << "\n    outer loop\n";
    for (const Vec* v : {&t.a, &t.b, &t.c})
      out << "      vertex " << fmt(v->x()) << ' ' << fmt(v->y()) << ' ' << fmt(v->z()) << '\n';
    out << "    endloop\n  endfacet\n";
  }
  out << "endsolid particle_prep\n";
}

}  // namespace pprep
