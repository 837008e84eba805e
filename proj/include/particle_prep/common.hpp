#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace pprep {

/// Points and vectors. 2D data lives in the xy-plane with z = 0.
using Vec = Eigen::Vector3d;
using Index3 = std::array<int, 3>;

/// Error categories; each maps onto a process exit code of the CLI.
enum class ErrorCategory {
  Config = 2,
  Io = 3,
  Geometry = 4,
  NonConvergence = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCategory::Config, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCategory::Io, w) {}
};
/// Parse failures of geometry files; the message names the line or byte offset.
struct MalformedInputError : Error {
  explicit MalformedInputError(const std::string& w) : Error(ErrorCategory::Geometry, w) {}
};
struct TopologyError : Error {
  explicit TopologyError(const std::string& w) : Error(ErrorCategory::Geometry, w) {}
};
struct EmptyInputError : Error {
  explicit EmptyInputError(const std::string& w) : Error(ErrorCategory::Geometry, w) {}
};
/// Non-finite query points, probes outside the field domain, escaping particles.
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorCategory::Geometry, w) {}
};
struct EmptyBandError : Error {
  explicit EmptyBandError(const std::string& w) : Error(ErrorCategory::Geometry, w) {}
};
struct EmptySeedError : Error {
  explicit EmptySeedError(const std::string& w) : Error(ErrorCategory::Geometry, w) {}
};

/// Axis-aligned box. In 2D the z extent is [0, 0].
struct Box {
  Vec lo = Vec::Zero();
  Vec hi = Vec::Zero();

  Vec extent() const { return hi - lo; }
  Vec center() const { return 0.5 * (lo + hi); }
  double diagonal() const { return extent().norm(); }

  bool contains(const Vec& p, int dim) const {
    for (int a = 0; a < dim; ++a)
      if (p[a] < lo[a] || p[a] > hi[a]) return false;
    return true;
  }

  /// Grows the box by `d` along the first `dim` axes.
  Box inflated(double d, int dim) const {
    Box b = *this;
    for (int a = 0; a < dim; ++a) {
      b.lo[a] -= d;
      b.hi[a] += d;
    }
    return b;
  }

  void expand(const Vec& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }

  static Box empty() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return Box{Vec::Constant(inf), Vec::Constant(-inf)};
  }
};

inline bool is_finite(const Vec& p) { return p.allFinite(); }

/// Number of cells in a block of edge `n` in dimension `dim` (n^dim).
constexpr int ipow(int n, int dim) {
  int r = 1;
  for (int i = 0; i < dim; ++i) r *= n;
  return r;
}

}  // namespace pprep
