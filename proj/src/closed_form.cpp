#include "deltacouple/closed_form.hpp"

#include <cmath>
#include <numbers>

#include "deltacouple/model.hpp"
#include "deltacouple/specfun.hpp"

namespace deltacouple {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

void require_physical(double coupling, double mass, double hbar) {
  if (!(std::isfinite(coupling) && coupling >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "coupling: must be >= 0");
  }
  if (!(std::isfinite(mass) && mass > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "mass: must be positive");
  }
  if (!(std::isfinite(hbar) && hbar > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "hbar: must be positive");
  }
}

ChannelStatus incident_side(const PotentialSpec& spec, double energy,
                            double mass, double hbar) {
  const ChannelStatus s =
      classify_channel(spec, energy, mass, hbar, Side::Left);
  if (s.cls != ChannelClass::Open) {
    throw Error(ErrorCode::NoIncidentWave, "no propagating incident wave");
  }
  return s;
}

TransitionResult finish(double reflected, std::optional<double> same,
                        double cross) {
  TransitionResult r;
  r.t_cross = cross;
  r.r_back = reflected;
  r.t_same = same;
  r.flux_residual = std::abs(1.0 - reflected - same.value_or(0.0) - cross);
  return r;
}

}  // namespace

TwoStateSolution solve_constant_pair(double v1, double v2, double coupling,
                                     double mass, double hbar, double energy) {
  require_physical(coupling, mass, hbar);
  const auto ch1 = incident_side(PotentialSpec::constant(v1), energy, mass, hbar);
  const auto ch2 = classify_channel(PotentialSpec::constant(v2), energy, mass,
                                    hbar, Side::Right);
  const double k1 = ch1.wavenumber;
  const double g = 2.0 * mass * coupling / (hbar * hbar);

  TwoStateSolution out;
  auto& amp = out.amplitudes;
  if (ch2.cls == ChannelClass::Open) {
    const double k2 = ch2.wavenumber;
    const double den = k1 * k2 + 0.25 * g * g;
    amp.b = -0.25 * g * g / den;
    amp.c = k1 * k2 / den;
    amp.d = amp.f = -0.5 * kI * g * k1 / den;
    const double cross = (k2 / k1) * (std::norm(amp.d) + std::norm(amp.f));
    out.result = finish(std::norm(amp.b), std::norm(amp.c), cross);
  } else {
    const double kappa = ch2.wavenumber;
    amp.c = 1.0 / (1.0 - kI * g * g / (4.0 * k1 * kappa));
    amp.b = amp.c - 1.0;
    amp.d = amp.f = -g * amp.c / (2.0 * kappa);
    out.result = finish(std::norm(amp.b), std::norm(amp.c), 0.0);
  }
  return out;
}

double constant_pair_transition(double v1, double v2, double coupling,
                                double mass, double hbar, double energy) {
  require_physical(coupling, mass, hbar);
  const double k1 =
      incident_side(PotentialSpec::constant(v1), energy, mass, hbar).wavenumber;
  const auto ch2 = classify_channel(PotentialSpec::constant(v2), energy, mass,
                                    hbar, Side::Right);
  if (ch2.cls != ChannelClass::Open) return 0.0;
  const double k2 = ch2.wavenumber;
  const double h2 = hbar * hbar;
  const double amp = mass * coupling * k1 * h2 /
                     (k1 * k2 * h2 * h2 + mass * mass * coupling * coupling);
  return 2.0 * (k2 / k1) * amp * amp;
}

TwoStateSolution solve_linear_pair(double p1, double p2, double coupling,
                                   double mass, double hbar, double energy) {
  require_physical(coupling, mass, hbar);
  if (!(p1 > 0.0 && p2 > 0.0 && std::isfinite(p1) && std::isfinite(p2))) {
    throw Error(ErrorCode::UseMatcher,
                "linear pair needs p1, p2 > 0: use generic matcher");
  }
  if (!std::isfinite(energy)) {
    throw Error(ErrorCode::InvalidArgument, "energy must be finite");
  }
  const double scale = 2.0 * mass / (hbar * hbar);
  const double c1 = std::cbrt(scale * p1);
  const double c2 = std::cbrt(scale * p2);
  const double g = scale * coupling;
  constexpr double w = 1.0 / kPi;

  // Both arguments at the coupling point are -c_i E / p_i.
  const AiryPair z1 = airy(-c1 * energy / p1);
  const AiryPair z2 = airy(-c2 * energy / p2);
  const double a1 = z1.ai;
  const double a2 = z2.ai;
  const Complex in1{z1.ai, z1.bi};
  const Complex out1{z1.ai, -z1.bi};
  const Complex out2{z2.ai, -z2.bi};

  TwoStateSolution sol;
  auto& amp = sol.amplitudes;
  const Complex den = c1 * c2 * w * w + g * g * a1 * a2 * out1 * out2;
  amp.c = 2.0 * c1 * c2 * w * w / den;
  amp.f = g * amp.c * a1 * a2 / (kI * c2 * w);
  amp.d = amp.f * out2 / a2;
  amp.b = (amp.c * a1 - in1) / out1;
  // Currents of Ai -+ iBi are c_i / pi in magnitude.
  const double cross = (c2 / c1) * std::norm(amp.f);
  sol.result = finish(std::norm(amp.b), std::nullopt, cross);
  return sol;
}

double compact_linear_transition(double energy) {
  const double c = std::cbrt(2.0);
  const AiryPair v = airy(-c * energy);
  const double ai = v.ai, bi = v.bi, aip = v.ai_prime, bip = v.bi_prime;
  const double c2 = c * c;
  const double n = ai * ai * (-aip * bi + ai * bip);
  const Complex d = -8.0 * kI * ai * ai * ai * bi + c2 * aip * aip * bi * bi +
                    4.0 * ai * ai * ai * ai - 2.0 * c2 * ai * aip * bi * bip +
                    ai * ai * (-4.0 * bi * bi + c2 * bip * bip);
  return 16.0 * c2 * std::norm(n / d);
}

TwoStateSolution solve_exponential_pair(double v0, double rate,
                                        double coupling, double mass,
                                        double hbar, double energy) {
  require_physical(coupling, mass, hbar);
  if (!(rate > 0.0 && std::isfinite(rate))) {
    throw Error(ErrorCode::UseMatcher,
                "exponential pair needs rate > 0: use generic matcher");
  }
  const auto spec = PotentialSpec::exponential(v0, rate);
  incident_side(spec, energy, mass, hbar);

  const double mu = 2.0 * std::sqrt(2.0 * mass * energy) / (rate * hbar);
  const double beta = 2.0 * std::sqrt(2.0 * mass * v0) / (rate * hbar);
  const double g = 2.0 * mass * coupling / (hbar * hbar);

  const ImagOrderBessel b = bessel_imag_order(mu, beta);
  const Complex i_in = b.i;
  const Complex i_out = std::conj(b.i);
  const double kv = b.k;

  TwoStateSolution sol;
  auto& amp = sol.amplitudes;
  const double a2 = rate * rate;
  amp.c = (2.0 * kI * a2 * std::sinh(kPi * mu) / kPi) /
          (4.0 * g * g * kv * kv * i_out * i_out - a2);
  amp.f = -2.0 * g * amp.c * kv * kv / rate;
  amp.d = amp.f * i_out / kv;
  amp.b = (amp.c * kv - i_in) / i_out;
  // I_{i mu} and I_{-i mu} carry equal and opposite currents.
  sol.result = finish(std::norm(amp.b), std::nullopt, std::norm(amp.f));
  return sol;
}

}  // namespace deltacouple
