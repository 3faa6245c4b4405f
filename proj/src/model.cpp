#include "deltacouple/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace deltacouple {

namespace {

void require(bool ok, const std::string& what,
             ErrorCode code = ErrorCode::InvalidArgument) {
  if (!ok) throw Error(code, what);
}

ChannelClass open_or_closed(double kinetic) {
  return kinetic > 0.0 ? ChannelClass::Open : ChannelClass::Closed;
}

}  // namespace

PotentialSpec PotentialSpec::constant(double offset) {
  require(std::isfinite(offset), "constant potential: offset must be finite");
  return {PotentialKind::Constant, offset, 0.0};
}

PotentialSpec PotentialSpec::linear(double slope) {
  require(std::isfinite(slope) && slope != 0.0,
          "linear potential: slope must be finite and nonzero");
  return {PotentialKind::Linear, slope, 0.0};
}

PotentialSpec PotentialSpec::exponential(double amplitude, double rate) {
  require(std::isfinite(amplitude) && amplitude > 0.0,
          "exponential potential: amplitude must be positive");
  require(std::isfinite(rate) && rate != 0.0,
          "exponential potential: rate must be finite and nonzero");
  return {PotentialKind::Exponential, amplitude, rate};
}

double PotentialSpec::offset() const {
  require(kind_ == PotentialKind::Constant, "offset: not a constant potential");
  return a_;
}

double PotentialSpec::slope() const {
  require(kind_ == PotentialKind::Linear, "slope: not a linear potential");
  return a_;
}

double PotentialSpec::amplitude() const {
  require(kind_ == PotentialKind::Exponential,
          "amplitude: not an exponential potential");
  return a_;
}

double PotentialSpec::rate() const {
  require(kind_ == PotentialKind::Exponential,
          "rate: not an exponential potential");
  return b_;
}

double PotentialSpec::operator()(double x) const {
  switch (kind_) {
    case PotentialKind::Constant:
      return a_;
    case PotentialKind::Linear:
      return a_ * x;
    case PotentialKind::Exponential:
      return a_ * std::exp(b_ * x);
  }
  return 0.0;
}

ChannelStatus classify_channel(const PotentialSpec& spec, double energy,
                               double mass, double hbar, Side side) {
  require(std::isfinite(energy), "energy must be finite");
  require(mass > 0.0 && hbar > 0.0, "mass and hbar must be positive");
  const double scale = 2.0 * mass / (hbar * hbar);

  ChannelStatus status;
  status.side = side;
  switch (spec.kind()) {
    case PotentialKind::Constant: {
      const double kinetic = energy - spec.offset();
      require(kinetic != 0.0, "threshold energy", ErrorCode::Threshold);
      status.cls = open_or_closed(kinetic);
      status.wavenumber = std::sqrt(scale * std::abs(kinetic));
      break;
    }
    case PotentialKind::Linear: {
      const bool rises_right = spec.slope() > 0.0;
      const bool forbidden = (side == Side::Right) == rises_right;
      status.cls = forbidden ? ChannelClass::Forbidden : ChannelClass::Open;
      status.wavenumber =
          forbidden ? 0.0 : std::cbrt(scale * std::abs(spec.slope()));
      break;
    }
    case PotentialKind::Exponential: {
      const bool rises_right = spec.rate() > 0.0;
      const bool forbidden = (side == Side::Right) == rises_right;
      if (forbidden) {
        status.cls = ChannelClass::Forbidden;
        status.wavenumber = 0.0;
      } else {
        require(energy != 0.0, "threshold energy", ErrorCode::Threshold);
        status.cls = open_or_closed(energy);
        status.wavenumber = std::sqrt(scale * std::abs(energy));
      }
      break;
    }
  }
  return status;
}

StarProblem validate_problem(StarProblem problem) {
  const std::size_t n = problem.channels.size();
  require(n >= 2, "channels: need at least 2 channels (N >= 2)");
  require(problem.couplings.size() + 1 == n, "couplings must number N-1");
  require(std::isfinite(problem.mass) && problem.mass > 0.0,
          "mass: must be positive");
  require(std::isfinite(problem.hbar) && problem.hbar > 0.0,
          "hbar: must be positive");
  require(std::isfinite(problem.energy), "energy: must be finite");
  for (std::size_t i = 0; i < problem.couplings.size(); ++i) {
    const auto& c = problem.couplings[i];
    require(std::isfinite(c.position),
            "couplings[" + std::to_string(i) + "].position: must be finite");
    require(std::isfinite(c.strength) && c.strength >= 0.0,
            "couplings[" + std::to_string(i) + "].strength: must be >= 0");
  }
  require(problem.incident.channel < n, "incident.channel: out of range");

  for (const auto& spec : problem.channels) {
    for (Side s : {Side::Left, Side::Right}) {
      classify_channel(spec, problem.energy, problem.mass, problem.hbar, s);
    }
  }
  const auto status =
      classify_channel(problem.channels[problem.incident.channel],
                       problem.energy, problem.mass, problem.hbar,
                       problem.incident.side);
  require(status.cls == ChannelClass::Open, "no propagating incident wave",
          ErrorCode::NoIncidentWave);
  return problem;
}

std::vector<double> distinct_positions(const std::vector<CouplingPoint>& cps) {
  std::vector<double> xs;
  xs.reserve(cps.size());
  for (const auto& c : cps) xs.push_back(c.position);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

ScatteringSolution summarize(std::vector<ChannelSolution> channels,
                             Incident incident) {
  ScatteringSolution out;
  out.incident = incident;
  out.t_cross.assign(channels.size(), 0.0);

  double total = 0.0;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const double p = channels[c].left.probability + channels[c].right.probability;
    total += p;
    if (c != incident.channel) {
      out.t_cross[c] = p;
      out.t_cross_total += p;
    }
  }
  const auto& own = channels[incident.channel];
  const bool from_left = incident.side == Side::Left;
  const SideAmplitude& back = from_left ? own.left : own.right;
  const SideAmplitude& through = from_left ? own.right : own.left;
  out.r_back = back.probability;
  if (through.cls == ChannelClass::Open) out.t_same = through.probability;
  out.flux_residual = std::abs(1.0 - total);
  out.channels = std::move(channels);
  return out;
}

}  // namespace deltacouple
