#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "deltacouple/model.hpp"

namespace testing_support {

using namespace deltacouple;

inline StarProblem two_state(PotentialSpec a, PotentialSpec b, double k,
                             double energy, double position = 0.0) {
  StarProblem p;
  p.channels = {a, b};
  p.couplings = {{position, k}};
  p.energy = energy;
  return p;
}

inline StarProblem const_pair(double energy, double k = 1.0, double v2 = 5.0) {
  return two_state(PotentialSpec::constant(0.0), PotentialSpec::constant(v2), k,
                   energy);
}

inline StarProblem linear_pair(double energy, double k = 1.0) {
  return two_state(PotentialSpec::linear(1.0), PotentialSpec::linear(-1.0), k,
                   energy);
}

inline StarProblem expo_pair(double energy, double k = 0.1) {
  return two_state(PotentialSpec::exponential(1.0, 1.0),
                   PotentialSpec::exponential(1.0, -1.0), k, energy);
}

/// Random star with a constant open hub (V=0), incident from the hub's left.
/// Spokes are constant, linear or exponential; kinds are drawn unless
/// `constants_only`. All couplings share x=0 unless `spread` is set.
inline StarProblem random_star(std::mt19937& rng, std::size_t n,
                               bool constants_only = false, bool spread = false) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  StarProblem p;
  p.energy = 1.0 + 9.0 * unit(rng);
  p.channels.push_back(PotentialSpec::constant(0.0));
  for (std::size_t c = 1; c < n; ++c) {
    const int kind = constants_only ? 0 : static_cast<int>(unit(rng) * 3.0);
    const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    if (kind == 0) {
      // Keep every offset clear of the threshold.
      double v = -3.0 + 16.0 * unit(rng);
      if (std::abs(v - p.energy) < 0.2) v += 0.5;
      p.channels.push_back(PotentialSpec::constant(v));
    } else if (kind == 1) {
      p.channels.push_back(PotentialSpec::linear(sign * (0.5 + 1.5 * unit(rng))));
    } else {
      p.channels.push_back(
          PotentialSpec::exponential(0.5 + unit(rng), sign * (0.5 + unit(rng))));
    }
    p.couplings.push_back({spread ? -1.0 + 2.0 * unit(rng) : 0.0, 0.2 + 1.3 * unit(rng)});
  }
  return p;
}

}  // namespace testing_support
