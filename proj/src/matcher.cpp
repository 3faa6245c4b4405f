#include "deltacouple/matcher.hpp"

#include <cmath>
#include <numbers>

#include "deltacouple/specfun.hpp"

namespace deltacouple {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

Region region_of(Side side) {
  return side == Side::Left ? Region::Left : Region::Right;
}

double exponential_arg0(const PotentialSpec& spec, double mass, double hbar) {
  return 2.0 * std::sqrt(2.0 * mass * spec.amplitude()) /
         (std::abs(spec.rate()) * hbar);
}

double exponential_order(const PotentialSpec& spec, double energy, double mass,
                         double hbar) {
  return 2.0 * std::sqrt(2.0 * mass * std::abs(energy)) /
         (std::abs(spec.rate()) * hbar);
}

// A term of a region's wavefunction; column < 0 marks the incoming wave with
// its fixed unit amplitude.
struct Term {
  BasisSolution basis;
  int column;
};

using RegionTerms = std::vector<Term>;

struct Layout {
  // channel -> region (left to right) -> terms
  std::vector<std::vector<RegionTerms>> regions;
  // channel -> sorted distinct coupling positions
  std::vector<std::vector<double>> points;
  std::vector<std::string> labels;
  double incident_current = 0.0;
};

struct Assembled {
  Layout layout;
  MatchSystem system;
  Eigen::PartialPivLU<MatrixXc> lu;
  Eigen::VectorXd column_scale;
};

RegionTerms outer_region(const StarProblem& p, std::size_t c, Side side,
                         Layout& layout) {
  const auto basis =
      build_basis(p.channels[c], p.energy, p.mass, p.hbar, side);
  const bool incident = p.incident.channel == c && p.incident.side == side;
  const std::string name = "c" + std::to_string(c) +
                           (side == Side::Left ? ".left" : ".right");
  RegionTerms terms;
  for (const auto& b : basis) {
    if (b.role() == BasisRole::Incoming) {
      if (!incident) continue;
      layout.incident_current = std::abs(b.current());
      terms.push_back({b, -1});
      continue;
    }
    const char* tag = b.role() == BasisRole::Outgoing   ? ".out"
                      : b.role() == BasisRole::Decaying ? ".dec"
                                                        : ".reg";
    terms.push_back({b, static_cast<int>(layout.labels.size())});
    layout.labels.push_back(name + tag);
  }
  return terms;
}

Layout make_layout(const StarProblem& p) {
  Layout layout;
  const std::size_t n = p.size();
  layout.regions.resize(n);
  layout.points.resize(n);
  layout.points[0] = distinct_positions(p.couplings);
  for (std::size_t c = 1; c < n; ++c) {
    layout.points[c] = {p.couplings[c - 1].position};
  }
  for (std::size_t c = 0; c < n; ++c) {
    auto& regions = layout.regions[c];
    regions.push_back(outer_region(p, c, Side::Left, layout));
    for (std::size_t r = 1; r < layout.points[c].size(); ++r) {
      const auto [u, v] =
          fundamental_pair(p.channels[c], p.energy, p.mass, p.hbar);
      const std::string name = "c" + std::to_string(c) + ".r" + std::to_string(r);
      const int col = static_cast<int>(layout.labels.size());
      regions.push_back({{u, col}, {v, col + 1}});
      layout.labels.push_back(name + ".a");
      layout.labels.push_back(name + ".b");
    }
    regions.push_back(outer_region(p, c, Side::Right, layout));
  }
  return layout;
}

class RowWriter {
 public:
  RowWriter(MatrixXc& m, VectorXc& rhs) : m_(m), rhs_(rhs) {}

  void add(Eigen::Index row, const RegionTerms& terms, double x, Complex coef,
           bool slope) {
    for (const auto& t : terms) {
      const ValueSlope vs = t.basis.at(x);
      const Complex v = coef * (slope ? vs.slope : vs.value);
      if (t.column >= 0) {
        m_(row, t.column) += v;
      } else {
        rhs_(row) -= v;
      }
    }
  }

 private:
  MatrixXc& m_;
  VectorXc& rhs_;
};

std::size_t point_index(const std::vector<double>& pts, double x) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i] == x) return i;
  }
  return pts.size();
}

Assembled build_system(const StarProblem& p) {
  Assembled out;
  out.layout = make_layout(p);
  const Layout& L = out.layout;
  const auto size = static_cast<Eigen::Index>(L.labels.size());
  MatchSystem& sys = out.system;
  sys.matrix = MatrixXc::Zero(size, size);
  sys.rhs = VectorXc::Zero(size);
  sys.labels = L.labels;
  RowWriter w(sys.matrix, sys.rhs);
  const double g = 2.0 * p.mass / (p.hbar * p.hbar);

  Eigen::Index row = 0;
  const auto& hub_pts = L.points[0];
  for (std::size_t i = 0; i < hub_pts.size(); ++i) {
    const double x = hub_pts[i];
    const auto& before = L.regions[0][i];
    const auto& after = L.regions[0][i + 1];
    w.add(row, before, x, 1.0, false);
    w.add(row, after, x, -1.0, false);
    ++row;
    w.add(row, after, x, 1.0, true);
    w.add(row, before, x, -1.0, true);
    for (std::size_t c = 1; c < p.size(); ++c) {
      const auto& cp = p.couplings[c - 1];
      if (cp.position != x) continue;
      w.add(row, L.regions[c][0], x, -g * cp.strength, false);
    }
    ++row;
  }
  for (std::size_t c = 1; c < p.size(); ++c) {
    const auto& cp = p.couplings[c - 1];
    const double x = cp.position;
    const auto& before = L.regions[c][0];
    const auto& after = L.regions[c][1];
    w.add(row, before, x, 1.0, false);
    w.add(row, after, x, -1.0, false);
    ++row;
    w.add(row, after, x, 1.0, true);
    w.add(row, before, x, -1.0, true);
    w.add(row, L.regions[0][point_index(hub_pts, x)], x, -g * cp.strength,
          false);
    ++row;
  }

  out.column_scale = Eigen::VectorXd::Ones(size);
  for (Eigen::Index j = 0; j < size; ++j) {
    const double m = sys.matrix.col(j).cwiseAbs().maxCoeff();
    if (m > 0.0) out.column_scale(j) = 1.0 / m;
  }
  out.lu.compute(sys.matrix * out.column_scale.asDiagonal());
  const double rcond = out.lu.rcond();
  sys.condition = rcond > 0.0 ? 1.0 / rcond : INFINITY;
  return out;
}

void check_condition(double cond) {
  if (!(cond <= kMaxCondition)) {
    throw Error(ErrorCode::Degenerate, "near-threshold or degenerate system");
  }
}

SideAmplitude side_amplitude(const StarProblem& p, const Layout& L,
                             const VectorXc& x, std::size_t c, Side side) {
  const auto& terms =
      side == Side::Left ? L.regions[c].front() : L.regions[c].back();
  SideAmplitude s;
  s.cls = classify_channel(p.channels[c], p.energy, p.mass, p.hbar, side).cls;
  for (const auto& t : terms) {
    if (t.column < 0) {
      s.incoming = 1.0;
      continue;
    }
    s.outgoing = x(t.column);
    if (s.cls == ChannelClass::Open) {
      s.probability = std::norm(s.outgoing) * std::abs(t.basis.current()) /
                      L.incident_current;
    }
  }
  return s;
}

}  // namespace

BasisSolution BasisSolution::plane(Complex q, double hbar_over_m,
                                   BasisRole role, Region region) {
  BasisSolution b;
  b.form_ = BasisForm::Plane;
  b.q_ = q;
  b.hbar_over_m_ = hbar_over_m;
  b.role_ = role;
  b.region_ = region;
  return b;
}

BasisSolution BasisSolution::airy(double scale, double shift, Complex alpha,
                                  Complex beta, double hbar_over_m,
                                  BasisRole role, Region region) {
  BasisSolution b;
  b.form_ = BasisForm::Airy;
  b.scale_ = scale;
  b.shift_ = shift;
  b.alpha_ = alpha;
  b.beta_ = beta;
  b.hbar_over_m_ = hbar_over_m;
  b.role_ = role;
  b.region_ = region;
  return b;
}

BasisSolution BasisSolution::bessel(BesselKind kind, double order,
                                    double arg0, double half_rate,
                                    double hbar_over_m, BasisRole role,
                                    Region region) {
  BasisSolution b;
  b.form_ = BasisForm::Bessel;
  b.bessel_ = kind;
  b.order_ = order;
  b.arg0_ = arg0;
  b.half_rate_ = half_rate;
  b.hbar_over_m_ = hbar_over_m;
  b.role_ = role;
  b.region_ = region;
  return b;
}

ValueSlope BasisSolution::at(double x) const {
  switch (form_) {
    case BasisForm::Plane: {
      const Complex e = std::exp(q_ * x);
      return {e, q_ * e};
    }
    case BasisForm::Airy: {
      const AiryPair a = deltacouple::airy(scale_ * (x - shift_));
      return {alpha_ * a.ai + beta_ * a.bi,
              scale_ * (alpha_ * a.ai_prime + beta_ * a.bi_prime)};
    }
    case BasisForm::Bessel: {
      const double xi = arg0_ * std::exp(half_rate_ * x);
      const double dxi = half_rate_ * xi;
      switch (bessel_) {
        case BesselKind::IPlus:
        case BesselKind::IMinus:
        case BesselKind::K: {
          const ImagOrderBessel f = bessel_imag_order(order_, xi);
          if (bessel_ == BesselKind::K) return {f.k, dxi * f.k_prime};
          if (bessel_ == BesselKind::IPlus) return {f.i, dxi * f.i_prime};
          return {std::conj(f.i), dxi * std::conj(f.i_prime)};
        }
        case BesselKind::IReal:
        case BesselKind::KReal: {
          const RealOrderBessel f = bessel_real_order(order_, xi);
          if (bessel_ == BesselKind::IReal) return {f.i, dxi * f.i_prime};
          return {f.k, dxi * f.k_prime};
        }
      }
    }
  }
  return {};
}

double BasisSolution::current() const {
  switch (form_) {
    case BasisForm::Plane:
      return q_.real() == 0.0 ? hbar_over_m_ * q_.imag() : 0.0;
    case BasisForm::Airy:
      // W[Ai, Bi] = 1/pi.
      return hbar_over_m_ * scale_ * (std::conj(alpha_) * beta_).imag() / kPi;
    case BasisForm::Bessel: {
      // W[I_{i mu}, I_{-i mu}](xi) = -2i sinh(pi mu) / (pi xi).
      const double j = hbar_over_m_ * half_rate_ * std::sinh(kPi * order_) / kPi;
      if (bessel_ == BesselKind::IPlus) return j;
      if (bessel_ == BesselKind::IMinus) return -j;
      return 0.0;
    }
  }
  return 0.0;
}

std::vector<BasisSolution> build_basis(const PotentialSpec& spec,
                                       double energy, double mass, double hbar,
                                       Side side) {
  using BK = BasisSolution::BesselKind;
  const ChannelStatus st = classify_channel(spec, energy, mass, hbar, side);
  const double hm = hbar / mass;
  const Region region = region_of(side);
  const bool left = side == Side::Left;
  const bool open = st.cls == ChannelClass::Open;

  switch (spec.kind()) {
    case PotentialKind::Constant: {
      const double k = st.wavenumber;
      if (open) {
        const Complex in = left ? kI * k : -kI * k;
        return {BasisSolution::plane(in, hm, BasisRole::Incoming, region),
                BasisSolution::plane(-in, hm, BasisRole::Outgoing, region)};
      }
      return {BasisSolution::plane(left ? k : -k, hm, BasisRole::Decaying,
                                   region)};
    }
    case PotentialKind::Linear: {
      const double p = spec.slope();
      const double s = p > 0.0 ? 1.0 : -1.0;
      const double c = std::cbrt(2.0 * mass * std::abs(p) / (hbar * hbar));
      const double shift = energy / p;
      if (open) {
        return {BasisSolution::airy(s * c, shift, 1.0, kI, hm,
                                    BasisRole::Incoming, region),
                BasisSolution::airy(s * c, shift, 1.0, -kI, hm,
                                    BasisRole::Outgoing, region)};
      }
      return {BasisSolution::airy(s * c, shift, 1.0, 0.0, hm,
                                  BasisRole::Decaying, region)};
    }
    case PotentialKind::Exponential: {
      const double arg0 = exponential_arg0(spec, mass, hbar);
      const double half_rate = 0.5 * spec.rate();
      const double order = exponential_order(spec, energy, mass, hbar);
      if (open) {
        return {BasisSolution::bessel(BK::IPlus, order, arg0, half_rate, hm,
                                      BasisRole::Incoming, region),
                BasisSolution::bessel(BK::IMinus, order, arg0, half_rate, hm,
                                      BasisRole::Outgoing, region)};
      }
      if (st.cls == ChannelClass::Closed) {
        return {BasisSolution::bessel(BK::IReal, order, arg0, half_rate, hm,
                                      BasisRole::Regular, region)};
      }
      const BK wall = energy > 0.0 ? BK::K : BK::KReal;
      return {BasisSolution::bessel(wall, order, arg0, half_rate, hm,
                                    BasisRole::Decaying, region)};
    }
  }
  return {};
}

std::pair<BasisSolution, BasisSolution> fundamental_pair(
    const PotentialSpec& spec, double energy, double mass, double hbar) {
  using BK = BasisSolution::BesselKind;
  const double hm = hbar / mass;
  constexpr auto role = BasisRole::Fundamental;
  constexpr auto region = Region::Interior;
  switch (spec.kind()) {
    case PotentialKind::Constant: {
      const ChannelStatus st =
          classify_channel(spec, energy, mass, hbar, Side::Left);
      const Complex q = st.cls == ChannelClass::Open
                            ? Complex(0.0, st.wavenumber)
                            : Complex(st.wavenumber, 0.0);
      return {BasisSolution::plane(q, hm, role, region),
              BasisSolution::plane(-q, hm, role, region)};
    }
    case PotentialKind::Linear: {
      const double p = spec.slope();
      const double c = std::cbrt(2.0 * mass * std::abs(p) / (hbar * hbar));
      const double scale = p > 0.0 ? c : -c;
      return {BasisSolution::airy(scale, energy / p, 1.0, 0.0, hm, role, region),
              BasisSolution::airy(scale, energy / p, 0.0, 1.0, hm, role,
                                  region)};
    }
    case PotentialKind::Exponential: {
      if (energy == 0.0) {
        throw Error(ErrorCode::Threshold, "threshold energy");
      }
      const double arg0 = exponential_arg0(spec, mass, hbar);
      const double half_rate = 0.5 * spec.rate();
      const double order = exponential_order(spec, energy, mass, hbar);
      const bool above = energy > 0.0;
      return {BasisSolution::bessel(above ? BK::IPlus : BK::IReal, order, arg0,
                                    half_rate, hm, role, region),
              BasisSolution::bessel(above ? BK::K : BK::KReal, order, arg0,
                                    half_rate, hm, role, region)};
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown potential kind");
}

MatchSystem assemble(const StarProblem& problem) {
  Assembled a = build_system(validate_problem(problem));
  check_condition(a.system.condition);
  return std::move(a.system);
}

double match_condition(const StarProblem& problem) {
  if (problem.channels.size() < 2 ||
      problem.couplings.size() + 1 != problem.channels.size()) {
    throw Error(ErrorCode::InvalidArgument, "couplings must number N-1");
  }
  return build_system(problem).system.condition;
}

ScatteringSolution solve_star(const StarProblem& problem) {
  const StarProblem p = validate_problem(problem);
  const Assembled a = build_system(p);
  check_condition(a.system.condition);
  const VectorXc x =
      a.column_scale.asDiagonal() * a.lu.solve(a.system.rhs).eval();

  const Layout& L = a.layout;
  std::vector<ChannelSolution> channels(p.size());
  for (std::size_t c = 0; c < p.size(); ++c) {
    auto& ch = channels[c];
    ch.left = side_amplitude(p, L, x, c, Side::Left);
    ch.right = side_amplitude(p, L, x, c, Side::Right);
    for (std::size_t r = 1; r + 1 < L.regions[c].size(); ++r) {
      const auto& terms = L.regions[c][r];
      ch.interior.emplace_back(x(terms[0].column), x(terms[1].column));
    }
  }
  ScatteringSolution sol = summarize(std::move(channels), p.incident);
  sol.condition = a.system.condition;
  return sol;
}

}  // namespace deltacouple
