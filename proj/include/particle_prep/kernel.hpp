#pragma once

#include "particle_prep/common.hpp"

#include <numbers>

namespace pprep {

/// Wendland C2 smoothing kernel with compact support r_c = 2h:
///   W(q) = alpha_d (1 - q/2)^4 (1 + 2q),  q = r / h < 2,
/// alpha_2 = 7 / (4 pi h^2), alpha_3 = 21 / (16 pi h^3).
class WendlandC2 {
 public:
  WendlandC2(int dim, double h) : dim_(dim), h_(h) {
    if (dim != 2 && dim != 3) throw ConfigError("kernel dimension must be 2 or 3");
    if (!(h > 0.0)) throw ConfigError("smoothing length must be positive");
    alpha_ = dim == 2 ? 7.0 / (4.0 * std::numbers::pi * h * h)
                      : 21.0 / (16.0 * std::numbers::pi * h * h * h);
  }

  int dimension() const { return dim_; }
  double smoothing_length() const { return h_; }
  double cutoff() const { return 2.0 * h_; }

  double value(double r) const {
    const double q = r / h_;
    if (q >= 2.0) return 0.0;
    const double s = 1.0 - 0.5 * q;
    const double s2 = s * s;
    return alpha_ * s2 * s2 * (1.0 + 2.0 * q);
  }

  /// dW/dr (non-positive).
  double derivative(double r) const {
    const double q = r / h_;
    if (q >= 2.0) return 0.0;
    const double s = 1.0 - 0.5 * q;
    return -5.0 * alpha_ / h_ * q * s * s * s;
  }

  /// grad_a W(|r_a - r_b|) for displacement r_ab = r_a - r_b.
  Vec gradient(const Vec& r_ab) const {
    const double r = r_ab.norm();
    if (r <= 0.0 || r >= cutoff()) return Vec::Zero();
    return (derivative(r) / r) * r_ab;
  }

 private:
  int dim_;
  double h_;
  double alpha_;
};

using Kernel = WendlandC2;

}  // namespace pprep
