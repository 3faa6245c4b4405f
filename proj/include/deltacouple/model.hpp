#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "deltacouple/types.hpp"

namespace deltacouple {

enum class PotentialKind { Constant, Linear, Exponential };
enum class Side { Left, Right };

/// One diabatic curve.
///
///   Constant     V(x) = offset
///   Linear       V(x) = slope * x
///   Exponential  V(x) = amplitude * exp(rate * x), amplitude > 0
///
/// The sign of slope/rate sets the orientation: a positive slope or rate rises
/// towards x -> +inf and leaves the channel open only on the left.
class PotentialSpec {
 public:
  static PotentialSpec constant(double offset);
  static PotentialSpec linear(double slope);
  static PotentialSpec exponential(double amplitude, double rate);

  PotentialKind kind() const noexcept { return kind_; }
  double offset() const;
  double slope() const;
  double amplitude() const;
  double rate() const;

  double operator()(double x) const;

  bool operator==(const PotentialSpec&) const = default;

 private:
  PotentialSpec(PotentialKind kind, double a, double b)
      : kind_(kind), a_(a), b_(b) {}

  PotentialKind kind_;
  double a_;
  double b_;
};

/// Off-diagonal coupling strength * delta(x - position).
struct CouplingPoint {
  double position = 0.0;
  double strength = 0.0;

  bool operator==(const CouplingPoint&) const = default;
};

/// Channel indices are zero based: channel 0 is the hub.
struct Incident {
  std::size_t channel = 0;
  Side side = Side::Left;

  bool operator==(const Incident&) const = default;
};

/// N channels in a star: channel 0 is coupled to channel n (n >= 1) through
/// couplings[n - 1]; channels 1..N-1 are mutually uncoupled.
struct StarProblem {
  std::vector<PotentialSpec> channels;
  std::vector<CouplingPoint> couplings;
  double mass = 1.0;
  double hbar = 1.0;
  double energy = 0.0;
  Incident incident;

  std::size_t size() const noexcept { return channels.size(); }
  bool operator==(const StarProblem&) const = default;
};

enum class ChannelClass { Open, Closed, Forbidden };

/// Asymptotic classification of one channel side. `wavenumber` holds k for
/// open constant/exponential sides, the decay constant kappa for closed
/// sides, the Airy scale (2m|p|/hbar^2)^(1/3) for the open side of a linear
/// channel, and 0 for forbidden sides.
struct ChannelStatus {
  Side side = Side::Left;
  ChannelClass cls = ChannelClass::Forbidden;
  double wavenumber = 0.0;
};

ChannelStatus classify_channel(const PotentialSpec& spec, double energy,
                               double mass, double hbar, Side side);

/// Returns the problem unchanged if every invariant holds, throws otherwise.
StarProblem validate_problem(StarProblem problem);

/// Couplings of the hub at each distinct position, sorted by position.
/// Used by every route that needs the hub's region structure.
std::vector<double> distinct_positions(const std::vector<CouplingPoint>& cps);

// ---------------------------------------------------------------------------
// Results shared by all routes.

struct SideAmplitude {
  ChannelClass cls = ChannelClass::Forbidden;
  /// Amplitude of the incoming wave (1 on the incident side, else 0).
  Complex incoming{0.0, 0.0};
  /// Outgoing amplitude on open sides, decaying/regular amplitude otherwise.
  Complex outgoing{0.0, 0.0};
  /// Outgoing flux / incident flux; 0 on sides that carry no flux.
  double probability = 0.0;
};

struct ChannelSolution {
  SideAmplitude left;
  SideAmplitude right;
  /// Coefficient pairs of the fundamental solutions in interior regions
  /// (hub channel with several distinct coupling points); may be empty.
  std::vector<std::pair<Complex, Complex>> interior;
};

struct ScatteringSolution {
  std::vector<ChannelSolution> channels;
  Incident incident;
  /// Total probability to leave in any channel other than the incident one.
  double t_cross_total = 0.0;
  /// Per-channel cross probability (entry for the incident channel is 0).
  std::vector<double> t_cross;
  /// Reflection back into the incident channel.
  double r_back = 0.0;
  /// Transmission in the incident channel; empty if the far side is not open.
  std::optional<double> t_same;
  /// |1 - sum of all outgoing probabilities|.
  double flux_residual = 0.0;
  /// Condition number of the solved linear system (routes that have one).
  std::optional<double> condition;
};

/// Fills the derived totals of a solution from its per-side probabilities.
ScatteringSolution summarize(std::vector<ChannelSolution> channels,
                             Incident incident);

}  // namespace deltacouple
