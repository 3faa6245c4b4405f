#pragma once

#include <optional>

#include "deltacouple/types.hpp"

namespace deltacouple {

/// Two-state amplitudes relative to a unit incident amplitude, coupling at
/// x = 0, incidence from the left in channel 1.
///
///   a  incoming wave in channel 1 (always 1)
///   b  reflected wave in channel 1
///   c  channel 1 on the far side of the coupling
///   d  channel 2 on the incident side
///   f  channel 2 on the far side
///
/// Basis functions per kind:
///   Constant     e^{+-ikx}, or e^{+-kappa x} in a closed channel 2
///   Linear       Ai +- iBi on open sides, Ai on forbidden sides
///   Exponential  I_{+-i mu} on open sides, K_{i mu} on walls
struct TwoStateAmplitudes {
  Complex a{1.0, 0.0};
  Complex b;
  Complex c;
  Complex d;
  Complex f;
};

struct TransitionResult {
  double t_cross = 0.0;
  std::optional<double> r_back;
  std::optional<double> t_same;
  double flux_residual = 0.0;
};

struct TwoStateSolution {
  TwoStateAmplitudes amplitudes;
  TransitionResult result;
};

/// V1, V2 constant; requires E > V1. A closed channel 2 (E < V2) gives
/// t_cross = 0 with decaying d, f.
TwoStateSolution solve_constant_pair(double v1, double v2, double coupling,
                                     double mass, double hbar, double energy);

/// 2 (k2/k1) |m K k1 hbar^2 / (k1 k2 hbar^4 + m^2 K^2)|^2, both channels open.
double constant_pair_transition(double v1, double v2, double coupling,
                                double mass, double hbar, double energy);

/// Channel 1: V = p1 x, channel 2: V = -p2 x, with p1, p2 > 0. Any other
/// orientation throws ErrorCode::UseMatcher.
TwoStateSolution solve_linear_pair(double p1, double p2, double coupling,
                                   double mass, double hbar, double energy);

/// Compact expression 16 2^{2/3} |N/D|^2 for p1 = p2 = 1,
/// K = 1, m = hbar = 1.
double compact_linear_transition(double energy);

/// Channel 1: V0 e^{a x}, channel 2: V0 e^{-a x}, with V0 > 0, a > 0, E > 0.
/// a <= 0 throws ErrorCode::UseMatcher.
TwoStateSolution solve_exponential_pair(double v0, double rate,
                                        double coupling, double mass,
                                        double hbar, double energy);

}  // namespace deltacouple
