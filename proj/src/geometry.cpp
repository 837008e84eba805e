#include "particle_prep/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace pprep {

namespace {

// Fixed, deliberately non-axis-aligned ray directions for the parity vote.
const std::array<Vec, 3>& ray_directions_3d() {
  static const std::array<Vec, 3> dirs = {
      Vec(0.3133, 0.7412, 0.5939).normalized(),
      Vec(-0.6827, 0.2913, -0.6702).normalized(),
      Vec(0.4461, -0.8123, 0.3757).normalized(),
  };
  return dirs;
}

const std::array<Vec, 3>& ray_directions_2d() {
  static const std::array<Vec, 3> dirs = {
      Vec(std::cos(0.4137), std::sin(0.4137), 0.0),
      Vec(std::cos(2.5523), std::sin(2.5523), 0.0),
      Vec(std::cos(4.3201), std::sin(4.3201), 0.0),
  };
  return dirs;
}

Box element_box(const Element& e, int dim) {
  Box b = Box::empty();
  b.expand(e.a);
  b.expand(e.b);
  if (dim == 3) b.expand(e.c);
  return b;
}

double box_distance_sq(const Box& b, const Vec& p) {
  const Vec d = (b.lo - p).cwiseMax(p - b.hi).cwiseMax(0.0);
  return d.squaredNorm();
}

bool ray_hits_box(const Box& b, const Vec& o, const Vec& d, int dim) {
  double tmin = 0.0;
  double tmax = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim; ++a) {
    if (std::abs(d[a]) < 1e-300) {
      if (o[a] < b.lo[a] || o[a] > b.hi[a]) return false;
      continue;
    }
    double t0 = (b.lo[a] - o[a]) / d[a];
    double t1 = (b.hi[a] - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
    if (tmin > tmax) return false;
  }
  return true;
}

// Half-open conventions are not needed: the 3-ray majority vote absorbs
// double counts at shared edges and vertices.
bool ray_hits_segment(const Vec& o, const Vec& d, const Vec& a, const Vec& b) {
  const Vec e = b - a;
  const double denom = d.x() * e.y() - d.y() * e.x();
  if (std::abs(denom) < 1e-300) return false;
  const Vec w = a - o;
  const double t = (w.x() * e.y() - w.y() * e.x()) / denom;
  const double s = (w.x() * d.y() - w.y() * d.x()) / denom;
  return t > 0.0 && s >= 0.0 && s < 1.0;
}

bool ray_hits_triangle(const Vec& o, const Vec& d, const Vec& a, const Vec& b, const Vec& c) {
  const Vec e1 = b - a;
  const Vec e2 = c - a;
  const Vec pvec = d.cross(e2);
  const double det = e1.dot(pvec);
  if (std::abs(det) < 1e-300) return false;
  const double inv = 1.0 / det;
  const Vec tvec = o - a;
  const double u = tvec.dot(pvec) * inv;
  if (u < 0.0 || u > 1.0) return false;
  const Vec qvec = tvec.cross(e1);
  const double v = d.dot(qvec) * inv;
  if (v < 0.0 || u + v > 1.0) return false;
  return e2.dot(qvec) * inv > 0.0;
}

}  // namespace

Vec closest_point_on_segment(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 <= 0.0) return a;
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return a + t * ab;
}

// Voronoi-region walk (Ericson, Real-Time Collision Detection, 5.1.5).
Vec closest_point_on_triangle(const Vec& p, const Vec& a, const Vec& b, const Vec& c) {
  const Vec ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + d1 / (d1 - d3) * ab;
  const Vec cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + d2 / (d2 - d6) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

// Static bounding-volume hierarchy over the elements, built once at load.
struct SurfaceGeometry::Bvh {
  struct Node {
    Box box;
    int left = -1, right = -1;
    int first = 0, count = 0;
  };
  std::vector<Node> nodes;
  std::vector<int> order;

  Bvh(const std::vector<Element>& elems, int dim) {
    order.resize(elems.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<Box> boxes(elems.size());
    std::vector<Vec> centroids(elems.size());
    for (std::size_t i = 0; i < elems.size(); ++i) {
      boxes[i] = element_box(elems[i], dim);
      centroids[i] = boxes[i].center();
    }
    nodes.reserve(2 * elems.size());
    build(0, static_cast<int>(elems.size()), boxes, centroids);
  }

  int build(int first, int last, const std::vector<Box>& boxes, const std::vector<Vec>& centroids) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    Box box = Box::empty();
    Box cbox = Box::empty();
    for (int i = first; i < last; ++i) {
      box.expand(boxes[order[i]].lo);
      box.expand(boxes[order[i]].hi);
      cbox.expand(centroids[order[i]]);
    }
    nodes[id].box = box;
    if (last - first <= 4) {
      nodes[id].first = first;
      nodes[id].count = last - first;
      return id;
    }
    int axis = 0;
    const Vec ext = cbox.extent();
    if (ext[1] > ext[axis]) axis = 1;
    if (ext[2] > ext[axis]) axis = 2;
    const int mid = (first + last) / 2;
    std::nth_element(order.begin() + first, order.begin() + mid, order.begin() + last,
                     [&](int a, int b) { return centroids[a][axis] < centroids[b][axis]; });
    const int l = build(first, mid, boxes, centroids);
    const int r = build(mid, last, boxes, centroids);
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
  }
};

SurfaceGeometry::SurfaceGeometry(int dim, std::vector<Element> elements)
    : dim_(dim), elements_(std::move(elements)), bbox_(Box::empty()) {
  for (const auto& e : elements_) {
    bbox_.expand(e.a);
    bbox_.expand(e.b);
    if (dim_ == 3) bbox_.expand(e.c);
  }
  bvh_ = std::make_unique<Bvh>(elements_, dim_);
}

SurfaceGeometry::SurfaceGeometry(SurfaceGeometry&&) noexcept = default;
SurfaceGeometry& SurfaceGeometry::operator=(SurfaceGeometry&&) noexcept = default;
SurfaceGeometry::~SurfaceGeometry() = default;

SurfaceGeometry SurfaceGeometry::from_loops(const std::vector<std::vector<Vec>>& loops) {
  Box all = Box::empty();
  std::size_t vertex_count = 0;
  for (const auto& loop : loops)
    for (const auto& v : loop) {
      if (!std::isfinite(v.x()) || !std::isfinite(v.y()))
        throw MalformedInputError("polyline vertex has a non-finite coordinate");
      all.expand(Vec(v.x(), v.y(), 0.0));
      ++vertex_count;
    }
  if (vertex_count == 0) throw EmptyInputError("polyline geometry has no vertices");

  const double tol = 1e-12 * std::max(all.diagonal(), 1e-300);
  std::vector<Element> segs;
  for (std::size_t l = 0; l < loops.size(); ++l) {
    const auto& loop = loops[l];
    if (loop.size() < 4)
      throw TopologyError("loop " + std::to_string(l) + " has fewer than 3 distinct vertices");
    if ((loop.front() - loop.back()).norm() > tol)
      throw TopologyError("loop " + std::to_string(l) + " is not closed");
    for (std::size_t i = 0; i + 1 < loop.size(); ++i) {
      const Vec a(loop[i].x(), loop[i].y(), 0.0);
      const Vec b(loop[i + 1].x(), loop[i + 1].y(), 0.0);
      segs.push_back({a, b, b});
    }
  }
  if (segs.size() < 3) throw TopologyError("2D geometry needs at least 3 segments");
  return SurfaceGeometry(2, std::move(segs));
}

SurfaceGeometry SurfaceGeometry::from_triangles(std::vector<Element> triangles) {
  if (triangles.empty()) throw EmptyInputError("triangle mesh is empty");
  for (const auto& t : triangles)
    if (!is_finite(t.a) || !is_finite(t.b) || !is_finite(t.c))
      throw MalformedInputError("triangle vertex has a non-finite coordinate");
  if (triangles.size() < 4) throw TopologyError("3D geometry needs at least 4 triangles");

  SurfaceGeometry g(3, std::move(triangles));

  // Watertightness probe: a closed surface gives the same parity along every ray.
  constexpr int probes = 2000;
  std::mt19937_64 rng(0x5eedULL);
  const Box region = g.bbox_.inflated(0.05 * g.bbox_.diagonal(), 3);
  std::uniform_real_distribution<double> ux(region.lo.x(), region.hi.x());
  std::uniform_real_distribution<double> uy(region.lo.y(), region.hi.y());
  std::uniform_real_distribution<double> uz(region.lo.z(), region.hi.z());
  int inconsistent = 0;
  for (int i = 0; i < probes; ++i) {
    const Vec p(ux(rng), uy(rng), uz(rng));
    const int s0 = g.ray_parity(p, 0);
    if (g.ray_parity(p, 1) != s0 || g.ray_parity(p, 2) != s0) ++inconsistent;
  }
  if (inconsistent > probes / 1000)
    throw TopologyError("triangle mesh is not watertight (ray parity inconsistent at " +
                        std::to_string(inconsistent) + " of " + std::to_string(probes) +
                        " probe points)");
  return g;
}

double SurfaceGeometry::unsigned_distance(const Vec& p, double cap) const {
  if (!is_finite(p)) throw DomainError("distance query at a non-finite point");
  double best = cap * cap;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const auto& node = bvh_->nodes[stack[--top]];
    if (box_distance_sq(node.box, p) >= best) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const auto& e = elements_[bvh_->order[i]];
        const Vec q = dim_ == 2 ? closest_point_on_segment(p, e.a, e.b)
                                : closest_point_on_triangle(p, e.a, e.b, e.c);
        best = std::min(best, (p - q).squaredNorm());
      }
      continue;
    }
    const auto& l = bvh_->nodes[node.left];
    const auto& r = bvh_->nodes[node.right];
    // push the farther child first so the nearer one is visited next
    if (box_distance_sq(l.box, p) < box_distance_sq(r.box, p)) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }
  return std::sqrt(best);
}

Vec SurfaceGeometry::closest_point(const Vec& p) const {
  if (!is_finite(p)) throw DomainError("closest-point query at a non-finite point");
  double best = std::numeric_limits<double>::infinity();
  Vec best_q = p;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const auto& node = bvh_->nodes[stack[--top]];
    if (box_distance_sq(node.box, p) >= best) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const auto& e = elements_[bvh_->order[i]];
        const Vec q = dim_ == 2 ? closest_point_on_segment(p, e.a, e.b)
                                : closest_point_on_triangle(p, e.a, e.b, e.c);
        const double d2 = (p - q).squaredNorm();
        if (d2 < best) {
          best = d2;
          best_q = q;
        }
      }
      continue;
    }
    stack[top++] = node.left;
    stack[top++] = node.right;
  }
  return best_q;
}

int SurfaceGeometry::ray_parity(const Vec& p, int ray) const {
  const Vec& d = dim_ == 2 ? ray_directions_2d()[ray] : ray_directions_3d()[ray];
  int hits = 0;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const auto& node = bvh_->nodes[stack[--top]];
    if (!ray_hits_box(node.box, p, d, dim_)) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const auto& e = elements_[bvh_->order[i]];
        const bool hit = dim_ == 2 ? ray_hits_segment(p, d, e.a, e.b)
                                   : ray_hits_triangle(p, d, e.a, e.b, e.c);
        hits += hit ? 1 : 0;
      }
      continue;
    }
    stack[top++] = node.left;
    stack[top++] = node.right;
  }
  return (hits % 2 == 1) ? -1 : 1;
}

int SurfaceGeometry::contains(const Vec& p) const {
  if (!is_finite(p)) throw DomainError("containment query at a non-finite point");
  const int votes = ray_parity(p, 0) + ray_parity(p, 1) + ray_parity(p, 2);
  return votes < 0 ? -1 : 1;
}

double SurfaceGeometry::signed_distance(const Vec& p) const {
  const double d = unsigned_distance(p, std::numeric_limits<double>::infinity());
  return contains(p) < 0 ? -d : d;
}

// ---------------------------------------------------------------------------
// File formats

SurfaceFormat parse_surface_format(const std::string& name) {
  if (name == "stl-ascii") return SurfaceFormat::StlAscii;
  if (name == "stl-binary") return SurfaceFormat::StlBinary;
  if (name == "obj") return SurfaceFormat::Obj;
  if (name == "polyline-csv") return SurfaceFormat::PolylineCsv;
  throw ConfigError("unknown surface format '" + name + "'");
}

std::string to_string(SurfaceFormat f) {
  switch (f) {
    case SurfaceFormat::StlAscii: return "stl-ascii";
    case SurfaceFormat::StlBinary: return "stl-binary";
    case SurfaceFormat::Obj: return "obj";
    case SurfaceFormat::PolylineCsv: return "polyline-csv";
  }
  return "unknown";
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size();
}

SurfaceGeometry parse_polyline_csv(const std::string& text, const std::string& name) {
  std::vector<std::vector<Vec>> loops(1);
  std::vector<std::size_t> loop_start_line(1, 1);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) {
      if (!loops.back().empty()) {
        loops.emplace_back();
        loop_start_line.push_back(lineno + 1);
      }
      continue;
    }
    if (t[0] == '#') continue;
    const auto comma = t.find(',');
    double x = 0.0, y = 0.0;
    if (comma == std::string::npos || !parse_double(trim(t.substr(0, comma)), x) ||
        !parse_double(trim(t.substr(comma + 1)), y))
      throw MalformedInputError(name + ": line " + std::to_string(lineno) +
                                ": expected 'x,y', got '" + t + "'");
    loops.back().emplace_back(x, y, 0.0);
  }
  if (loops.back().empty()) {
    loops.pop_back();
    loop_start_line.pop_back();
  }
  if (loops.empty()) throw EmptyInputError(name + ": no vertices");

  Box all = Box::empty();
  for (const auto& l : loops)
    for (const auto& v : l) all.expand(v);
  const double tol = 1e-12 * all.diagonal();
  for (std::size_t i = 0; i < loops.size(); ++i) {
    auto& l = loops[i];
    if (l.size() < 3 || (l.size() == 3 && (l.front() - l.back()).norm() <= tol))
      throw TopologyError(name + ": loop starting at line " + std::to_string(loop_start_line[i]) +
                          " is open (fewer than 3 distinct vertices)");
    if ((l.front() - l.back()).norm() > tol) l.push_back(l.front());
    else l.back() = l.front();
  }
  return SurfaceGeometry::from_loops(loops);
}

SurfaceGeometry parse_stl_ascii(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::pair<std::string, std::size_t>> tokens;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.emplace_back(tok, lineno);
  }
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) -> MalformedInputError {
    const std::size_t at = pos < tokens.size() ? tokens[pos].second : lineno;
    return MalformedInputError(name + ": line " + std::to_string(at) + ": " + what);
  };
  auto expect = [&](const char* word) {
    if (pos >= tokens.size()) throw fail(std::string("unexpected end of file, expected '") + word + "'");
    if (tokens[pos].first != word)
      throw fail(std::string("expected '") + word + "', got '" + tokens[pos].first + "'");
    ++pos;
  };
  auto number = [&]() {
    double v = 0.0;
    if (pos >= tokens.size()) throw fail("unexpected end of file, expected a number");
    if (!parse_double(tokens[pos].first, v)) throw fail("expected a number, got '" + tokens[pos].first + "'");
    ++pos;
    return v;
  };

  expect("solid");
  // optional solid name: skip tokens until 'facet' or 'endsolid'
  while (pos < tokens.size() && tokens[pos].first != "facet" && tokens[pos].first != "endsolid") ++pos;
  std::vector<Element> tris;
  while (true) {
    if (pos >= tokens.size()) throw fail("unexpected end of file, expected 'facet' or 'endsolid'");
    if (tokens[pos].first == "endsolid") break;
    expect("facet");
    expect("normal");
    number(), number(), number();
    expect("outer");
    expect("loop");
    Element e;
    for (Vec* v : {&e.a, &e.b, &e.c}) {
      expect("vertex");
      const double x = number(), y = number(), z = number();
      *v = Vec(x, y, z);
    }
    expect("endloop");
    expect("endfacet");
    tris.push_back(e);
  }
  return SurfaceGeometry::from_triangles(std::move(tris));
}

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

SurfaceGeometry parse_stl_binary(const std::string& bytes, const std::string& name) {
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 84)
    throw MalformedInputError(name + ": byte offset " + std::to_string(bytes.size()) +
                              ": truncated header (need 84 bytes)");
  const std::uint32_t count = read_u32_le(data + 80);
  const std::size_t need = 84 + static_cast<std::size_t>(count) * 50;
  if (bytes.size() < need) {
    const std::size_t record = (bytes.size() - 84) / 50;
    throw MalformedInputError(name + ": byte offset " + std::to_string(84 + record * 50) +
                              ": truncated triangle record " + std::to_string(record) + " of " +
                              std::to_string(count));
  }
  std::vector<Element> tris(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const unsigned char* rec = data + 84 + static_cast<std::size_t>(i) * 50 + 12;
    auto f = [&](int k) { return static_cast<double>(std::bit_cast<float>(read_u32_le(rec + 4 * k))); };
    tris[i] = {Vec(f(0), f(1), f(2)), Vec(f(3), f(4), f(5)), Vec(f(6), f(7), f(8))};
  }
  return SurfaceGeometry::from_triangles(std::move(tris));
}

SurfaceGeometry parse_obj(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<Vec> verts;
  std::vector<std::pair<std::array<long, 3>, std::size_t>> faces;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind) || kind[0] == '#') continue;
    const std::string where = name + ": line " + std::to_string(lineno) + ": ";
    if (kind == "v") {
      std::string sx, sy, sz;
      double x, y, z;
      if (!(ls >> sx >> sy >> sz) || !parse_double(sx, x) || !parse_double(sy, y) || !parse_double(sz, z))
        throw MalformedInputError(where + "expected 'v x y z'");
      verts.emplace_back(x, y, z);
    } else if (kind == "f") {
      std::vector<long> idx;
      std::string tok;
      while (ls >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        char* end = nullptr;
        const long v = std::strtol(head.c_str(), &end, 10);
        if (head.empty() || end != head.c_str() + head.size() || v == 0)
          throw MalformedInputError(where + "bad face index '" + tok + "'");
        idx.push_back(v);
      }
      if (idx.size() != 3) throw MalformedInputError(where + "only triangular faces are supported");
      faces.push_back({{idx[0], idx[1], idx[2]}, lineno});
    }
  }
  std::vector<Element> tris;
  tris.reserve(faces.size());
  for (const auto& [f, ln] : faces) {
    std::array<Vec, 3> p;
    for (int k = 0; k < 3; ++k) {
      // 1-based; negative indices are relative to the vertices seen so far
      const long i = f[k] > 0 ? f[k] - 1 : static_cast<long>(verts.size()) + f[k];
      if (i < 0 || i >= static_cast<long>(verts.size()))
        throw MalformedInputError(name + ": line " + std::to_string(ln) + ": vertex index out of range");
      p[k] = verts[i];
    }
    tris.push_back({p[0], p[1], p[2]});
  }
  return SurfaceGeometry::from_triangles(std::move(tris));
}

}  // namespace

SurfaceFormat guess_surface_format(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".csv" || ext == ".txt") return SurfaceFormat::PolylineCsv;
  if (ext == ".obj") return SurfaceFormat::Obj;
  if (ext == ".stl") {
    const std::string bytes = read_file(path);
    if (bytes.size() >= 84) {
      const auto count = read_u32_le(reinterpret_cast<const unsigned char*>(bytes.data()) + 80);
      if (bytes.size() == 84 + static_cast<std::size_t>(count) * 50) return SurfaceFormat::StlBinary;
    }
    return bytes.rfind("solid", 0) == 0 ? SurfaceFormat::StlAscii : SurfaceFormat::StlBinary;
  }
  throw ConfigError("cannot infer surface format from '" + path.string() + "'");
}

SurfaceGeometry load_surface(const std::filesystem::path& path, SurfaceFormat format) {
  const std::string bytes = read_file(path);
  const std::string name = path.filename().string();
  switch (format) {
    case SurfaceFormat::PolylineCsv: return parse_polyline_csv(bytes, name);
    case SurfaceFormat::StlAscii: return parse_stl_ascii(bytes, name);
    case SurfaceFormat::StlBinary: return parse_stl_binary(bytes, name);
    case SurfaceFormat::Obj: return parse_obj(bytes, name);
  }
  throw ConfigError("unsupported surface format");
}

}  // namespace pprep
