#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

namespace testing {

TempDir::TempDir(const std::string& tag) {
  static int counter = 0;
  path_ = std::filesystem::temp_directory_path() /
          ("pprep_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<Vec> sample_surface(const std::vector<pprep::Element>& elements, int dim, double spacing) {
  std::vector<Vec> out;
  for (const auto& e : elements) {
    if (dim == 2) {
      const int n = std::max(1, static_cast<int>(std::ceil((e.b - e.a).norm() / spacing)));
      for (int i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;
        out.push_back((1.0 - t) * e.a + t * e.b);
      }
    } else {
      const double edge = std::max({(e.b - e.a).norm(), (e.c - e.a).norm(), (e.c - e.b).norm()});
      const int n = std::max(1, static_cast<int>(std::ceil(edge / spacing)));
      for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) {
          const double u = static_cast<double>(i) / n, v = static_cast<double>(j) / n;
          out.push_back(e.a + u * (e.b - e.a) + v * (e.c - e.a));
        }
    }
  }
  return out;
}

double min_sample_distance(const std::vector<Vec>& samples, const Vec& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : samples) best = std::min(best, (s - p).squaredNorm());
  return std::sqrt(best);
}

int ray_parity(const std::vector<pprep::Element>& elements, int dim, const Vec& p, const Vec& d) {
  int hits = 0;
  for (const auto& e : elements) {
    if (dim == 2) {
      // Solve p + s d = a + u (b - a), s > 0, u in [0, 1).
      const Vec ab = e.b - e.a;
      const double det = d.x() * (-ab.y()) - d.y() * (-ab.x());
      if (std::abs(det) < 1e-300) continue;
      const Vec r = e.a - p;
      const double s = (r.x() * (-ab.y()) - r.y() * (-ab.x())) / det;
      const double u = (d.x() * r.y() - d.y() * r.x()) / det;
      if (s > 0.0 && u >= 0.0 && u < 1.0) ++hits;
    } else {
      const Vec e1 = e.b - e.a, e2 = e.c - e.a;
      const Vec q = d.cross(e2);
      const double det = e1.dot(q);
      if (std::abs(det) < 1e-300) continue;
      const Vec s = p - e.a;
      const double u = s.dot(q) / det;
      const Vec r = s.cross(e1);
      const double v = d.dot(r) / det;
      const double t = e2.dot(r) / det;
      if (u >= 0.0 && v >= 0.0 && u + v <= 1.0 && t > 0.0) ++hits;
    }
  }
  return hits % 2 == 1 ? -1 : 1;
}

double clipped_fraction(double x0, double y0, double a, const Vec& n, double c) {
  std::vector<Vec> poly{Vec(x0, y0, 0), Vec(x0 + a, y0, 0), Vec(x0 + a, y0 + a, 0), Vec(x0, y0 + a, 0)};
  std::vector<Vec> kept;
  const auto side = [&](const Vec& p) { return n.dot(p) - c; };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec& p = poly[i];
    const Vec& q = poly[(i + 1) % poly.size()];
    const double sp = side(p), sq = side(q);
    if (sp > 0.0) kept.push_back(p);
    if ((sp > 0.0) != (sq > 0.0)) kept.push_back(p + (sp / (sp - sq)) * (q - p));
  }
  double area = 0.0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const Vec& p = kept[i];
    const Vec& q = kept[(i + 1) % kept.size()];
    area += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * std::abs(area) / (a * a);
}

Vec completion_quadrature_2d(const pprep::Kernel& kernel, double depth, double step) {
  // Wendland C2 derivative, written out independently of the library class.
  const double h = kernel.smoothing_length();
  const double alpha = 7.0 / (4.0 * std::numbers::pi * h * h);
  const auto dwdr = [&](double r) {
    const double q = r / h;
    if (q >= 2.0) return 0.0;
    const double s = 1.0 - 0.5 * q;
    return -5.0 * alpha / h * q * s * s * s;
  };
  const double rc = 2.0 * h;
  const Vec a(-depth, 0.0, 0.0);
  Vec sum = Vec::Zero();
  const int nx = static_cast<int>(std::ceil(rc / step));
  for (int i = 0; i < nx; ++i)
    for (int j = -nx; j < nx; ++j) {
      const Vec c((i + 0.5) * step, (j + 0.5) * step, 0.0);
      const Vec rac = a - c;
      const double r = rac.norm();
      if (r <= 0.0 || r >= rc) continue;
      sum += (dwdr(r) / r) * rac * step * step;
    }
  return sum;
}

std::vector<double> zero_crossings_row(const pprep::LevelSetField& field, int j, int i_lo, int i_hi) {
  std::vector<double> xs;
  const double lf = field.fine_spacing();
  for (int i = i_lo; i < i_hi; ++i) {
    const double a = field.phi_at(pprep::Index3{i, j, 0});
    const double b = field.phi_at(pprep::Index3{i + 1, j, 0});
    if ((a < 0.0) != (b < 0.0)) {
      const double x0 = field.origin().x() + (i + 0.5) * lf;
      xs.push_back(x0 + lf * a / (a - b));
    }
  }
  return xs;
}

double segment_distance(const Vec& p, const Vec& a, const Vec& b) {
  const Vec ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double wedge_signed_distance(const Vec& p, double length, double height, double tip, double tip_y) {
  std::vector<Vec> v{Vec(0, -height, 0), Vec(length, tip_y - 0.5 * tip, 0), Vec(length, tip_y + 0.5 * tip, 0),
                     Vec(0, height, 0)};
  double d = std::numeric_limits<double>::infinity();
  bool inside = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec& a = v[i];
    const Vec& b = v[(i + 1) % v.size()];
    d = std::min(d, segment_distance(p, a, b));
    if ((a.y() > p.y()) != (b.y() > p.y()) && p.x() < a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y()))
      inside = !inside;
  }
  return inside ? -d : d;
}

std::size_t count_sparse_particles(const std::vector<Vec>& positions, double radius, int min_neighbors) {
  std::size_t n = 0;
  const double r2 = radius * radius;
  for (std::size_t a = 0; a < positions.size(); ++a) {
    int k = 0;
    for (std::size_t b = 0; b < positions.size(); ++b)
      if (a != b && (positions[a] - positions[b]).squaredNorm() < r2) ++k;
    if (k < min_neighbors) ++n;
  }
  return n;
}

double min_window_spread(const pprep::DiagnosticsSeries& d, std::size_t window) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t end = window; end <= d.size(); ++end) {
    const auto first = d.kinetic_energy.begin() + static_cast<long>(end - window);
    const auto last = d.kinetic_energy.begin() + static_cast<long>(end);
    const auto [lo, hi] = std::minmax_element(first, last);
    double sum = 0.0;
    for (auto it = first; it != last; ++it) sum += *it;
    best = std::min(best, (*hi - *lo) / (sum / static_cast<double>(window)));
  }
  return best;
}

}  // namespace testing
