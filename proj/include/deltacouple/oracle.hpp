#pragma once

#include "deltacouple/model.hpp"
#include "deltacouple/types.hpp"

namespace deltacouple {

/// Boundary matching written in the scattered-wave form: each channel is
/// the free scattering wave of the incident channel plus multiples of its
/// left/right acceptable solutions, with currents from Im(conj(u) u') and
/// full-pivot LU. Shares no assembly code with solve_star.
ScatteringSolution dense_match_solve(const StarProblem& problem);

struct Grid {
  double x_min = 0.0;
  double x_max = 0.0;
  double h = 0.0;
};

/// Every coupling K delta(x - x_n) replaced by K N_sigma(x - x_n) with
/// N_sigma a unit Gaussian of width sigma.
struct SmearedProblem {
  StarProblem base;
  double sigma = 0.0;
  Grid grid;
  /// Combine the solutions at h and h/2 as (4 t_{h/2} - t_h) / 3.
  bool richardson = true;
};

/// Grid spanning the couplings by 12 sigma, the exponential tails down to
/// V < 1e-12, and walls five decay lengths (or more) past their turning
/// points; h = min(sigma / 20, 0.1 / k_max).
SmearedProblem default_smeared(const StarProblem& problem, double sigma);

/// Second-order finite differences for the coupled channels. Constant
/// channel ends use the exact discrete plane or decaying waves, open linear
/// ends the Airy ratio, open exponential ends a plane wave (V ~ 0), walls
/// and forbidden ends psi = 0. Throws ErrorCode::GridUnderresolved when the
/// grid violates the width, span or tail conditions.
ScatteringSolution smeared_solve(const SmearedProblem& problem);

}  // namespace deltacouple
