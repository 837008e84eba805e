#pragma once

#include "particle_prep/kernel.hpp"
#include "particle_prep/levelset.hpp"

namespace pprep::confinement {

/// Smoothed Heaviside: 0 below -eps, 1 above +eps,
/// 1/2 + phi/(2 eps) + sin(pi phi / eps) / (2 pi) in between.
double heaviside(double phi, double eps);

/// Active band of the completion field: T_n = -(r_c + l_f) <= phi <= T_p = l_f.
struct ActiveBand {
  double lower;
  double upper;
};
ActiveBand active_band(const LevelSetField& field, const Kernel& kernel);

/// Fills DataPackage::completion with the exterior kernel-gradient sum
///   I(a) = sum_c H(phi_c, eps) l_f^d grad_a W(|r_a - r_c|)
/// over fine cells c within r_c of a with phi_c > -eps, for every cell a in
/// the active band; zero elsewhere. Far cells contribute through the shared
/// constants (H = 1 outside, 0 inside).
void compute_completion(LevelSetField& field, const Kernel& kernel, double eps);

}  // namespace pprep::confinement
