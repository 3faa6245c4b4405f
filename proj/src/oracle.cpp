#include "deltacouple/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "deltacouple/specfun.hpp"

namespace deltacouple {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

// ---------------------------------------------------------------------------
// Channel solutions, coded independently of the matcher's basis.

enum class Wave { InLeft, AccLeft, InRight, AccRight };

class ChannelWaves {
 public:
  ChannelWaves(const PotentialSpec& spec, double energy, double mass,
               double hbar)
      : spec_(spec), e_(energy), m_(mass), hbar_(hbar),
        g_(2.0 * mass / (hbar * hbar)) {}

  ValueSlope operator()(Wave w, double x) const {
    switch (spec_.kind()) {
      case PotentialKind::Constant:
        return constant(w, x);
      case PotentialKind::Linear:
        return linear(w, x);
      case PotentialKind::Exponential:
        return exponential(w, x);
    }
    return {};
  }

  double current(Wave w, double x) const {
    const ValueSlope u = (*this)(w, x);
    return hbar_ / m_ * (std::conj(u.value) * u.slope).imag();
  }

 private:
  static bool left(Wave w) { return w == Wave::InLeft || w == Wave::AccLeft; }
  static bool in(Wave w) { return w == Wave::InLeft || w == Wave::InRight; }

  ValueSlope constant(Wave w, double x) const {
    const double d = g_ * (e_ - spec_.offset());
    if (d > 0.0) {
      const double k = std::sqrt(d);
      // e^{ikx} travels right: incoming on the left, outgoing on the right.
      const bool right_moving = left(w) == in(w);
      const Complex q = right_moving ? kI * k : -kI * k;
      const Complex e = std::exp(q * x);
      return {e, q * e};
    }
    if (in(w)) throw Error(ErrorCode::NoIncidentWave, "no incoming wave");
    const double kappa = std::sqrt(-d);
    const double q = left(w) ? kappa : -kappa;
    const double e = std::exp(q * x);
    return {e, q * e};
  }

  // Picks u = a + i s b (s = +-1) with the current sign required by w.
  template <typename F>
  ValueSlope travelling(Wave w, F pair) const {
    ValueSlope plus = pair(1.0);
    const double j = (std::conj(plus.value) * plus.slope).imag();
    const bool want_positive = left(w) == in(w);
    return (j > 0.0) == want_positive ? plus : pair(-1.0);
  }

  ValueSlope linear(Wave w, double x) const {
    const double p = spec_.slope();
    const double c = std::cbrt(g_ * p);
    const AiryPair a = airy(c * (x - e_ / p));
    const bool open_left = p > 0.0;
    if (left(w) != open_left) {
      if (in(w)) throw Error(ErrorCode::NoIncidentWave, "no incoming wave");
      return {a.ai, c * a.ai_prime};
    }
    return travelling(w, [&](double s) {
      return ValueSlope{Complex(a.ai, s * a.bi),
                        c * Complex(a.ai_prime, s * a.bi_prime)};
    });
  }

  ValueSlope exponential(Wave w, double x) const {
    const double a = spec_.rate();
    const double arg0 = 2.0 * std::sqrt(g_ * spec_.amplitude()) / std::abs(a);
    const double order = 2.0 * std::sqrt(g_ * std::abs(e_)) / std::abs(a);
    const double xi = arg0 * std::exp(0.5 * a * x);
    const double dxi = 0.5 * a * xi;
    const bool open_left = a > 0.0;
    const bool wall = left(w) != open_left;
    if (wall || e_ < 0.0) {
      if (in(w)) throw Error(ErrorCode::NoIncidentWave, "no incoming wave");
    }
    if (e_ < 0.0) {
      const RealOrderBessel b = bessel_real_order(order, xi);
      return wall ? ValueSlope{b.k, dxi * b.k_prime}
                  : ValueSlope{b.i, dxi * b.i_prime};
    }
    const ImagOrderBessel b = bessel_imag_order(order, xi);
    if (wall) return {b.k, dxi * b.k_prime};
    return travelling(w, [&](double s) {
      return s > 0.0 ? ValueSlope{b.i, dxi * b.i_prime}
                     : ValueSlope{std::conj(b.i), dxi * std::conj(b.i_prime)};
    });
  }

  PotentialSpec spec_;
  double e_, m_, hbar_, g_;
};

std::vector<double> channel_points(const StarProblem& p, std::size_t c) {
  return c == 0 ? distinct_positions(p.couplings)
                : std::vector<double>{p.couplings[c - 1].position};
}

// Free scattering wave phi of the incident channel: phi = acc_far / alpha,
// with own coefficients r (incident side) and t (far side).
struct Free {
  Wave acc_far;
  Complex alpha;
  Complex r;
  Complex t;
};

Free free_wave(const ChannelWaves& w, Side side, double anchor) {
  const bool from_left = side == Side::Left;
  const Wave in = from_left ? Wave::InLeft : Wave::InRight;
  const Wave acc_near = from_left ? Wave::AccLeft : Wave::AccRight;
  const Wave acc_far = from_left ? Wave::AccRight : Wave::AccLeft;
  Eigen::Matrix2cd m;
  const ValueSlope a = w(in, anchor);
  const ValueSlope b = w(acc_near, anchor);
  const ValueSlope f = w(acc_far, anchor);
  m << a.value, b.value, a.slope, b.slope;
  const Eigen::Vector2cd ab = m.fullPivLu().solve(Eigen::Vector2cd(f.value, f.slope));
  return {acc_far, ab(0), ab(1) / ab(0), 1.0 / ab(0)};
}

}  // namespace

ScatteringSolution dense_match_solve(const StarProblem& problem) {
  const StarProblem p = validate_problem(problem);
  const std::size_t n = p.size();
  const double g = 2.0 * p.mass / (p.hbar * p.hbar);

  std::vector<ChannelWaves> waves;
  std::vector<std::vector<double>> pts(n);
  for (std::size_t c = 0; c < n; ++c) {
    waves.emplace_back(p.channels[c], p.energy, p.mass, p.hbar);
    pts[c] = channel_points(p, c);
  }

  // Columns: every channel's left coefficient, then interior pairs, then
  // every right coefficient.
  std::vector<int> left_col(n), right_col(n);
  std::vector<std::vector<int>> mid_col(n);
  int cols = 0;
  for (std::size_t c = 0; c < n; ++c) left_col[c] = cols++;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 1; r < pts[c].size(); ++r) {
      mid_col[c].push_back(cols);
      cols += 2;
    }
  }
  for (std::size_t c = 0; c < n; ++c) right_col[c] = cols++;

  const std::size_t src = p.incident.channel;
  const Free phi = free_wave(waves[src], p.incident.side, pts[src].front());
  auto phi_at = [&](double x) {
    return waves[src](phi.acc_far, x).value / phi.alpha;
  };

  MatrixXc a = MatrixXc::Zero(cols, cols);
  VectorXc rhs = VectorXc::Zero(cols);

  // Adds coef * (scattered part of channel c in region r) at x.
  auto put = [&](Eigen::Index row, std::size_t c, std::size_t r, double x,
                 Complex coef, bool slope) {
    const auto& w = waves[c];
    auto pick = [&](Wave which) {
      const ValueSlope v = w(which, x);
      return slope ? v.slope : v.value;
    };
    if (r == 0) {
      a(row, left_col[c]) += coef * pick(Wave::AccLeft);
    } else if (r == pts[c].size()) {
      a(row, right_col[c]) += coef * pick(Wave::AccRight);
    } else {
      a(row, mid_col[c][r - 1]) += coef * pick(Wave::AccLeft);
      a(row, mid_col[c][r - 1] + 1) += coef * pick(Wave::AccRight);
    }
  };

  Eigen::Index row = 0;
  // Jump rows, spokes first.
  for (std::size_t c = n - 1; c >= 1; --c) {
    const double x = p.couplings[c - 1].position;
    const double k = p.couplings[c - 1].strength;
    put(row, c, 1, x, 1.0, true);
    put(row, c, 0, x, -1.0, true);
    const auto hub_r = static_cast<std::size_t>(
        std::find(pts[0].begin(), pts[0].end(), x) - pts[0].begin());
    put(row, 0, hub_r, x, -g * k, false);
    if (src == 0) rhs(row) += g * k * phi_at(x);
    ++row;
  }
  for (std::size_t i = 0; i < pts[0].size(); ++i) {
    const double x = pts[0][i];
    put(row, 0, i + 1, x, 1.0, true);
    put(row, 0, i, x, -1.0, true);
    for (std::size_t c = 1; c < n; ++c) {
      if (p.couplings[c - 1].position != x) continue;
      const double k = p.couplings[c - 1].strength;
      put(row, c, 0, x, -g * k, false);
      if (src == c) rhs(row) += g * k * phi_at(x);
    }
    ++row;
  }
  // Continuity rows.
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < pts[c].size(); ++i) {
      put(row, c, i, pts[c][i], 1.0, false);
      put(row, c, i + 1, pts[c][i], -1.0, false);
      ++row;
    }
  }

  Eigen::VectorXd scale(cols);
  for (int j = 0; j < cols; ++j) {
    const double m = a.col(j).cwiseAbs().maxCoeff();
    scale(j) = m > 0.0 ? 1.0 / m : 1.0;
  }
  const MatrixXc as = a * scale.asDiagonal();
  const Eigen::JacobiSVD<MatrixXc> svd(as);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                              : INFINITY;
  if (!(cond <= 1e12)) {
    throw Error(ErrorCode::Degenerate, "near-threshold or degenerate system");
  }
  const VectorXc coef = scale.asDiagonal() * as.fullPivLu().solve(rhs);

  const Side side = p.incident.side;
  const Wave in_wave = side == Side::Left ? Wave::InLeft : Wave::InRight;
  const double anchor = pts[src].front();
  const double j_in = std::abs(waves[src].current(in_wave, anchor));

  std::vector<ChannelSolution> channels(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (Side s : {Side::Left, Side::Right}) {
      const bool is_left = s == Side::Left;
      SideAmplitude amp;
      amp.cls = classify_channel(p.channels[c], p.energy, p.mass, p.hbar, s).cls;
      amp.outgoing = coef(is_left ? left_col[c] : right_col[c]);
      if (c == src) {
        amp.outgoing += side == s ? phi.r : phi.t;
        if (side == s) amp.incoming = 1.0;
      }
      if (amp.cls == ChannelClass::Open) {
        const Wave acc = is_left ? Wave::AccLeft : Wave::AccRight;
        amp.probability = std::norm(amp.outgoing) *
                          std::abs(waves[c].current(acc, pts[c].front())) / j_in;
      }
      (is_left ? channels[c].left : channels[c].right) = amp;
    }
    for (int col : mid_col[c]) {
      channels[c].interior.emplace_back(coef(col), coef(col + 1));
    }
  }
  ScatteringSolution sol = summarize(std::move(channels), p.incident);
  sol.condition = cond;
  return sol;
}

// ---------------------------------------------------------------------------
// Smeared-coupling finite differences.

namespace {

enum class EndKind { Plane, Decay, Airy, Dirichlet };

// Boundary closure psi_ghost = gamma psi_end + known and the data to read the
// outgoing amplitude back.
struct End {
  EndKind kind = EndKind::Dirichlet;
  Complex gamma;
  Complex known;
  double q = 0.0;         // discrete wavenumber (Plane)
  Complex in_end;         // incoming wave at the end node
  Complex out_end;        // outgoing wave at the end node
  double current_in = 0.0;
  double current_out = 0.0;
};

[[noreturn]] void underresolved(const std::string& why) {
  throw Error(ErrorCode::GridUnderresolved, "grid underresolved: " + why);
}

double gaussian(double x, double sigma) {
  return std::exp(-0.5 * x * x / (sigma * sigma)) /
         (sigma * std::sqrt(2.0 * kPi));
}

// Decay exponent int kappa dx accumulated from the classically allowed
// region to the end node, along the grid.
double decay_exponent(const PotentialSpec& spec, const StarProblem& p,
                      double x_end, double x_inner, double h) {
  const double g = 2.0 * p.mass / (p.hbar * p.hbar);
  const int steps = static_cast<int>(std::ceil(std::abs(x_end - x_inner) / h));
  double sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double x = x_inner + (x_end - x_inner) * i / std::max(steps, 1);
    const double d = g * (spec(x) - p.energy);
    if (d > 0.0) sum += std::sqrt(d);
  }
  return sum * std::abs(x_end - x_inner) / std::max(steps, 1);
}

End make_end(const StarProblem& p, std::size_t c, Side side, double x_end,
             double h, double x_inner) {
  const PotentialSpec& spec = p.channels[c];
  const double g = 2.0 * p.mass / (p.hbar * p.hbar);
  const ChannelStatus st =
      classify_channel(spec, p.energy, p.mass, p.hbar, side);
  const bool incident = p.incident.channel == c && p.incident.side == side;
  const double a_in = incident ? 1.0 : 0.0;
  const double dir = side == Side::Left ? 1.0 : -1.0;  // incoming direction
  End e;

  if (st.cls == ChannelClass::Forbidden ||
      (spec.kind() == PotentialKind::Exponential && st.cls == ChannelClass::Closed)) {
    if (decay_exponent(spec, p, x_end, x_inner, h) < std::log(1e4)) {
      underresolved("wall end too shallow");
    }
    return e;
  }
  if (spec.kind() == PotentialKind::Linear) {
    const ChannelWaves w(spec, p.energy, p.mass, p.hbar);
    const Wave in = side == Side::Left ? Wave::InLeft : Wave::InRight;
    const Wave out = side == Side::Left ? Wave::AccLeft : Wave::AccRight;
    const double x_ghost = x_end - dir * h;
    e.kind = EndKind::Airy;
    e.in_end = w(in, x_end).value;
    e.out_end = w(out, x_end).value;
    e.gamma = w(out, x_ghost).value / e.out_end;
    e.known = a_in * (w(in, x_ghost).value - e.gamma * e.in_end);
    e.current_in = std::abs(w.current(in, x_end));
    e.current_out = std::abs(w.current(out, x_end));
    return e;
  }
  const double v_end = spec.kind() == PotentialKind::Constant ? spec.offset() : 0.0;
  if (spec.kind() == PotentialKind::Exponential &&
      spec(x_end) > 1e-4 * std::abs(p.energy)) {
    underresolved("exponential tail not reached");
  }
  const double k2 = g * (p.energy - v_end);
  if (k2 > 0.0) {
    const double cq = 1.0 - 0.5 * h * h * k2;
    if (cq <= -1.0) underresolved("step too large for wavenumber");
    const double q = std::acos(cq) / h;
    // Incoming e^{i dir q x}, outgoing e^{-i dir q x}.
    const Complex in_phase = std::exp(kI * dir * q * x_end);
    e.kind = EndKind::Plane;
    e.q = q;
    e.in_end = in_phase;
    e.out_end = 1.0 / in_phase;
    e.gamma = std::exp(kI * q * h);
    e.known = a_in * in_phase * (std::exp(-kI * q * h) - std::exp(kI * q * h));
    // Discrete current (hbar / m h) Im(conj(psi_j) psi_{j+1}) of a unit wave.
    e.current_in = e.current_out = p.hbar / p.mass * std::sin(q * h) / h;
    return e;
  }
  const double kd = std::acosh(1.0 - 0.5 * h * h * k2) / h;
  e.kind = EndKind::Decay;
  e.gamma = std::exp(-kd * h);
  return e;
}

struct GridSolution {
  std::vector<ChannelSolution> channels;
};

GridSolution solve_on_grid(const SmearedProblem& sp, int intervals) {
  const StarProblem& p = sp.base;
  const std::size_t n = p.size();
  const double x0 = sp.grid.x_min;
  const double h = (sp.grid.x_max - sp.grid.x_min) / intervals;
  const int nodes = intervals + 1;
  const double g = 2.0 * p.mass / (p.hbar * p.hbar);
  const double h2g = h * h * g;
  auto idx = [&](std::size_t c, int j) {
    return static_cast<int>(c) * nodes + j;
  };

  for (const auto& cp : p.couplings) {
    double sum = 0.0;
    for (int j = 0; j < nodes; ++j) sum += gaussian(x0 + j * h - cp.position, sp.sigma);
    if (std::abs(sum * h - 1.0) > 1e-12) underresolved("coupling integral");
  }

  std::vector<End> left(n), right(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto pts = channel_points(p, c);
    left[c] = make_end(p, c, Side::Left, sp.grid.x_min, h, pts.front());
    right[c] = make_end(p, c, Side::Right, sp.grid.x_max, h, pts.back());
  }

  using Sparse = Eigen::SparseMatrix<Complex>;
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(nodes) * n * 5);
  VectorXc rhs = VectorXc::Zero(static_cast<Eigen::Index>(nodes * n));

  for (std::size_t c = 0; c < n; ++c) {
    for (int j = 0; j < nodes; ++j) {
      const double x = x0 + j * h;
      const int r = idx(c, j);
      Complex diag = -2.0 + h2g * (p.energy - p.channels[c](x));
      if (j > 0) trip.emplace_back(r, idx(c, j - 1), 1.0);
      if (j + 1 < nodes) trip.emplace_back(r, idx(c, j + 1), 1.0);
      if (j == 0) {
        diag += left[c].gamma;
        rhs(r) -= left[c].known;
      }
      if (j + 1 == nodes) {
        diag += right[c].gamma;
        rhs(r) -= right[c].known;
      }
      trip.emplace_back(r, r, diag);
    }
  }
  for (std::size_t c = 1; c < n; ++c) {
    const auto& cp = p.couplings[c - 1];
    for (int j = 0; j < nodes; ++j) {
      const double w = cp.strength * gaussian(x0 + j * h - cp.position, sp.sigma);
      if (w < 1e-300) continue;
      trip.emplace_back(idx(0, j), idx(c, j), -h2g * w);
      trip.emplace_back(idx(c, j), idx(0, j), -h2g * w);
    }
  }
  Sparse a(rhs.size(), rhs.size());
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Sparse> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorCode::Degenerate, "near-threshold or degenerate system");
  }
  const VectorXc psi = lu.solve(rhs);

  const std::size_t src = p.incident.channel;
  const End& inc = p.incident.side == Side::Left ? left[src] : right[src];
  GridSolution out;
  out.channels.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (Side s : {Side::Left, Side::Right}) {
      const bool is_left = s == Side::Left;
      const End& e = is_left ? left[c] : right[c];
      const Complex end_value = psi(idx(c, is_left ? 0 : nodes - 1));
      const bool incident = c == src && p.incident.side == s;
      SideAmplitude amp;
      amp.cls = classify_channel(p.channels[c], p.energy, p.mass, p.hbar, s).cls;
      if (incident) amp.incoming = 1.0;
      if (e.kind == EndKind::Plane || e.kind == EndKind::Airy) {
        const Complex own = incident ? e.in_end : Complex{};
        amp.outgoing = (end_value - own) / e.out_end;
        amp.probability = std::norm(amp.outgoing) * e.current_out / inc.current_in;
      } else {
        amp.outgoing = end_value;
      }
      (is_left ? out.channels[c].left : out.channels[c].right) = amp;
    }
  }
  return out;
}

}  // namespace

SmearedProblem default_smeared(const StarProblem& problem, double sigma) {
  const StarProblem p = validate_problem(problem);
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sigma: must be positive");
  }
  const double g = 2.0 * p.mass / (p.hbar * p.hbar);
  const auto xs = distinct_positions(p.couplings);
  double lo = xs.front() - 12.0 * sigma;
  double hi = xs.back() + 12.0 * sigma;
  double v_min = INFINITY;

  for (const auto& spec : p.channels) {
    switch (spec.kind()) {
      case PotentialKind::Constant:
        v_min = std::min(v_min, spec.offset());
        break;
      case PotentialKind::Linear: {
        const double slope = spec.slope();
        const double c = std::cbrt(g * std::abs(slope));
        const double turn = p.energy / slope;
        // Ai(12) ~ 1e-11 on the forbidden side; a few oscillations on the
        // open side.
        if (slope > 0.0) {
          hi = std::max(hi, turn + 12.0 / c);
          lo = std::min(lo, turn - 4.0 / c);
        } else {
          lo = std::min(lo, turn - 12.0 / c);
          hi = std::max(hi, turn + 4.0 / c);
        }
        break;
      }
      case PotentialKind::Exponential: {
        const double a = spec.rate();
        const double v0 = spec.amplitude();
        const double tail = std::log(1e-12 * std::max(1.0, std::abs(p.energy)) / v0) / a;
        // Five decay lengths in the wall: int kappa dx ~ (2/|a|) sqrt(g V).
        const double v_wall =
            std::max(p.energy, 0.0) + std::pow(17.5 * std::abs(a), 2) / g;
        const double wall = std::log(v_wall / v0) / a;
        lo = std::min(lo, std::min(tail, wall));
        hi = std::max(hi, std::max(tail, wall));
        v_min = std::min(v_min, 0.0);
        break;
      }
    }
  }
  for (const auto& spec : p.channels) {
    v_min = std::min({v_min, spec(lo), spec(hi)});
  }
  const double k_max = std::sqrt(std::max(g * (p.energy - v_min), 1e-300));

  SmearedProblem sp;
  sp.base = p;
  sp.sigma = sigma;
  sp.grid = {lo, hi, std::min(sigma / 20.0, 0.1 / k_max)};
  return sp;
}

ScatteringSolution smeared_solve(const SmearedProblem& sp) {
  const StarProblem p = validate_problem(sp.base);
  if (!(sp.sigma > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sigma: must be positive");
  }
  const Grid& grid = sp.grid;
  if (!(grid.h > 0.0 && grid.x_max > grid.x_min)) {
    throw Error(ErrorCode::InvalidArgument, "grid: need x_min < x_max, h > 0");
  }
  if (grid.h > 0.25 * sp.sigma) underresolved("h > sigma / 4");
  for (const auto& cp : p.couplings) {
    if (cp.position - 10.0 * sp.sigma < grid.x_min ||
        cp.position + 10.0 * sp.sigma > grid.x_max) {
      underresolved("couplings closer than 10 sigma to the grid ends");
    }
  }
  const int intervals =
      static_cast<int>(std::ceil((grid.x_max - grid.x_min) / grid.h));
  if (static_cast<double>(intervals) * 2.0 * p.size() > 2e7) {
    underresolved("too many grid points");
  }

  SmearedProblem checked = sp;
  checked.base = p;
  GridSolution fine = solve_on_grid(checked, sp.richardson ? 2 * intervals : intervals);
  if (sp.richardson) {
    const GridSolution coarse = solve_on_grid(checked, intervals);
    for (std::size_t c = 0; c < p.size(); ++c) {
      for (auto side : {&ChannelSolution::left, &ChannelSolution::right}) {
        SideAmplitude& f = fine.channels[c].*side;
        const SideAmplitude& g = coarse.channels[c].*side;
        f.probability = (4.0 * f.probability - g.probability) / 3.0;
      }
    }
  }
  return summarize(std::move(fine.channels), p.incident);
}

}  // namespace deltacouple
