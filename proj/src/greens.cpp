#include "deltacouple/greens.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace deltacouple {

struct GreenFn::Bare {
  BasisSolution lo;
  BasisSolution hi;
  // (2m/hbar^2) / W[lo, hi]
  Complex factor;
  std::optional<std::size_t> channel;
  Origin origin;
};

struct GreenFn::Node {
  GreenKind kind = GreenKind::Bare;
  Bare bare;
  std::vector<Stage> stages;
};

GreenFn compose_stage(const GreenFn& hub, const GreenFn& spoke,
                      double coupling, double position, GreenKind kind,
                      const std::string& pole_message);

namespace {

const BasisSolution& acceptable(const std::vector<BasisSolution>& basis) {
  for (const auto& b : basis) {
    if (b.role() != BasisRole::Incoming) return b;
  }
  throw Error(ErrorCode::DefectiveBasis, "defective basis");
}

const BasisSolution& incoming(const std::vector<BasisSolution>& basis) {
  for (const auto& b : basis) {
    if (b.role() == BasisRole::Incoming) return b;
  }
  throw Error(ErrorCode::NoIncidentWave, "no propagating incident wave");
}

// Uncoupled scattering solution phi of one channel with unit incoming wave on
// `side`: phi = in + r out on that side and t acc on the far side, where out
// and acc are the acceptable solutions.
struct FreeWave {
  BasisSolution acc_far;
  Complex alpha;  // phi = acc_far / alpha
  Complex r;
  Complex t;
  double incident_current = 0.0;

  Complex operator()(double x) const { return acc_far.at(x).value / alpha; }
};

FreeWave free_wave(const PotentialSpec& spec, const StarProblem& p, Side side,
                   double anchor) {
  const Side far = side == Side::Left ? Side::Right : Side::Left;
  const auto near_basis = build_basis(spec, p.energy, p.mass, p.hbar, side);
  const auto far_basis = build_basis(spec, p.energy, p.mass, p.hbar, far);
  const BasisSolution& in = incoming(near_basis);
  const BasisSolution& out = acceptable(near_basis);
  const BasisSolution& acc = acceptable(far_basis);

  const ValueSlope a = in.at(anchor);
  const ValueSlope b = out.at(anchor);
  const ValueSlope c = acc.at(anchor);
  const Complex det = a.value * b.slope - a.slope * b.value;
  const Complex alpha = (c.value * b.slope - c.slope * b.value) / det;
  const Complex beta = (a.value * c.slope - a.slope * c.value) / det;
  return {acc, alpha, beta / alpha, 1.0 / alpha, std::abs(in.current())};
}

SideAmplitude side_amplitude(const StarProblem& p, std::size_t c, Side side,
                             const BasisSolution& acc, Complex coef,
                             double incident_current) {
  SideAmplitude s;
  s.cls = classify_channel(p.channels[c], p.energy, p.mass, p.hbar, side).cls;
  if (p.incident.channel == c && p.incident.side == side) s.incoming = 1.0;
  s.outgoing = coef;
  if (s.cls == ChannelClass::Open) {
    s.probability = std::norm(coef) * std::abs(acc.current()) / incident_current;
  }
  return s;
}

// Coefficient of phi's own wave on `side`.
Complex own_part(const FreeWave& phi, Side incident_side, Side side) {
  return incident_side == side ? phi.r : phi.t;
}

}  // namespace

Complex GreenFn::operator()(double x, double xp) const {
  if (node_->stages.empty()) {
    const Bare& b = node_->bare;
    const double lo = std::min(x, xp);
    const double hi = std::max(x, xp);
    return b.factor * b.lo.at(lo).value * b.hi.at(hi).value;
  }
  return table({x, xp})(0, 1);
}

MatrixXc GreenFn::table(const std::vector<double>& points) const {
  std::vector<double> pts = points;
  for (const auto& s : node_->stages) pts.push_back(s.position);
  const auto n = static_cast<Eigen::Index>(pts.size());

  const Bare& b = node_->bare;
  std::vector<Complex> lo(pts.size()), hi(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    lo[i] = b.lo.at(pts[i]).value;
    hi[i] = b.hi.at(pts[i]).value;
  }
  MatrixXc t(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      t(i, j) = pts[i] <= pts[j] ? b.factor * lo[i] * hi[j]
                                 : b.factor * lo[j] * hi[i];
    }
  }
  auto c = static_cast<Eigen::Index>(points.size());
  for (const auto& s : node_->stages) {
    const VectorXc col = t.col(c);
    const Eigen::Matrix<Complex, 1, Eigen::Dynamic> row = t.row(c);
    t.noalias() += (s.v / s.denominator) * col * row;
    ++c;
  }
  const auto m = static_cast<Eigen::Index>(points.size());
  return t.topLeftCorner(m, m);
}

GreenKind GreenFn::kind() const noexcept { return node_->kind; }

std::size_t GreenFn::level() const noexcept { return node_->stages.size(); }

std::optional<std::size_t> GreenFn::channel() const noexcept {
  return node_->bare.channel;
}

const GreenFn::Origin& GreenFn::origin() const noexcept {
  return node_->bare.origin;
}

const BasisSolution& GreenFn::left_solution() const noexcept {
  return node_->bare.lo;
}

const BasisSolution& GreenFn::right_solution() const noexcept {
  return node_->bare.hi;
}

const std::vector<GreenFn::Stage>& GreenFn::stages() const noexcept {
  return node_->stages;
}

GreenFn bare_green(const PotentialSpec& spec, double energy, double mass,
                   double hbar, std::optional<std::size_t> channel) {
  const auto left = build_basis(spec, energy, mass, hbar, Side::Left);
  const auto right = build_basis(spec, energy, mass, hbar, Side::Right);
  auto node = std::make_shared<GreenFn::Node>(GreenFn::Node{
      GreenKind::Bare,
      GreenFn::Bare{acceptable(left), acceptable(right), {}, channel,
                    {spec, energy, mass, hbar}},
      {}});
  const ValueSlope u = node->bare.lo.at(0.0);
  const ValueSlope v = node->bare.hi.at(0.0);
  const Complex w = u.value * v.slope - u.slope * v.value;
  const double scale = std::abs(u.value * v.slope) + std::abs(u.slope * v.value);
  if (!(std::abs(w) > 1e-14 * scale)) {
    throw Error(ErrorCode::DefectiveBasis, "defective basis");
  }
  node->bare.factor = 2.0 * mass / (hbar * hbar) / w;
  return GreenFn(std::move(node));
}

GreenFn compose_stage(const GreenFn& hub, const GreenFn& spoke,
                      double coupling, double position, GreenKind kind,
                      const std::string& pole_message) {
  if (!(std::isfinite(coupling) && coupling >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "coupling: must be >= 0");
  }
  GreenFn::Stage stage;
  stage.spoke = std::make_shared<const GreenFn>(spoke);
  stage.strength = coupling;
  stage.position = position;
  stage.v = coupling * coupling * spoke(position, position);
  stage.denominator = 1.0 - stage.v * hub(position, position);
  if (!(std::abs(stage.denominator) > kMinDenominator)) {
    throw Error(ErrorCode::GreenPole, pole_message);
  }
  auto node = std::make_shared<GreenFn::Node>(*hub.node_);
  node->kind = kind;
  node->stages.push_back(std::move(stage));
  return GreenFn(std::move(node));
}

GreenFn compose_two_state(const GreenFn& g1, const GreenFn& g2,
                          double coupling, double position) {
  return compose_stage(g1, g2, coupling, position, GreenKind::TwoState,
                       "pole of composed Green's function");
}

GreenFn compose_chain(const GreenFn& hub, const std::vector<SpokeTerm>& spokes) {
  GreenFn g = hub;
  for (std::size_t n = 0; n < spokes.size(); ++n) {
    const auto& s = spokes[n];
    g = compose_stage(g, s.green, s.strength, s.position, GreenKind::Chain,
                      "pole at stage " + std::to_string(n + 1));
  }
  return g;
}

GreenFn compose_problem(const StarProblem& problem) {
  const StarProblem p = validate_problem(problem);
  const GreenFn hub = bare_green(p.channels[0], p.energy, p.mass, p.hbar, 0);
  std::vector<SpokeTerm> spokes;
  for (std::size_t c = 1; c < p.size(); ++c) {
    spokes.push_back({bare_green(p.channels[c], p.energy, p.mass, p.hbar, c),
                      p.couplings[c - 1].strength,
                      p.couplings[c - 1].position});
  }
  return compose_chain(hub, spokes);
}

ScatteringSolution extract_solution(const GreenFn& g,
                                    const StarProblem& problem) {
  const StarProblem p = validate_problem(problem);
  const auto& stages = g.stages();
  const auto built_for = [&](const GreenFn& k, std::size_t c) {
    const auto& o = k.origin();
    return o.spec == p.channels[c] && o.energy == p.energy &&
           o.mass == p.mass && o.hbar == p.hbar;
  };
  if (g.channel() != 0u || stages.size() + 1 != p.size() || !built_for(g, 0)) {
    throw Error(ErrorCode::InvalidArgument,
                "green function inconsistent with problem");
  }
  // stage_of[c] = stage folding channel c.
  std::vector<std::size_t> stage_of(p.size(), stages.size());
  for (std::size_t m = 0; m < stages.size(); ++m) {
    const auto c = stages[m].spoke->channel();
    if (!c || *c == 0 || *c >= p.size() || stage_of[*c] != stages.size() ||
        stages[m].spoke->level() != 0 || !built_for(*stages[m].spoke, *c) ||
        stages[m].position != p.couplings[*c - 1].position ||
        stages[m].strength != p.couplings[*c - 1].strength) {
      throw Error(ErrorCode::InvalidArgument,
                  "green function inconsistent with problem");
    }
    stage_of[*c] = m;
  }

  double x_left = stages[0].position;
  double x_right = x_left;
  for (const auto& s : stages) {
    x_left = std::min(x_left, s.position);
    x_right = std::max(x_right, s.position);
  }
  // Table rows: 0 = x_left, 1 = x_right, 2 + m = stage m.
  const auto at = [&](std::size_t m) { return static_cast<Eigen::Index>(2 + m); };
  const MatrixXc full = g.table([&] {
    std::vector<double> pts{x_left, x_right};
    for (const auto& s : stages) pts.push_back(s.position);
    return pts;
  }());

  const std::size_t src = p.incident.channel;
  const Side side = p.incident.side;
  const double anchor =
      src == 0 ? x_left : p.couplings[src - 1].position;
  const FreeWave phi = free_wave(p.channels[src], p, side, anchor);

  // Hub: psi_1 = hub_free + sum_m G(x, x_m) w_m.
  std::vector<Complex> w(stages.size(), 0.0);
  if (src == 0) {
    for (std::size_t m = 0; m < stages.size(); ++m) {
      w[m] = stages[m].v * phi(stages[m].position);
    }
  } else {
    w[stage_of[src]] = stages[stage_of[src]].strength * phi(anchor);
  }
  auto scattered = [&](Eigen::Index row) {
    Complex s = 0.0;
    for (std::size_t m = 0; m < stages.size(); ++m) s += full(row, at(m)) * w[m];
    return s;
  };
  auto hub_at_stage = [&](std::size_t m) {
    Complex v = scattered(at(m));
    if (src == 0) v += phi(stages[m].position);
    return v;
  };

  const BasisSolution& hub_lo = g.left_solution();
  const BasisSolution& hub_hi = g.right_solution();
  Complex hub_left = scattered(0) / hub_lo.at(x_left).value;
  Complex hub_right = scattered(1) / hub_hi.at(x_right).value;
  if (src == 0) {
    hub_left += own_part(phi, side, Side::Left);
    hub_right += own_part(phi, side, Side::Right);
  }

  std::vector<ChannelSolution> channels(p.size());
  channels[0].left = side_amplitude(p, 0, Side::Left, hub_lo, hub_left,
                                    phi.incident_current);
  channels[0].right = side_amplitude(p, 0, Side::Right, hub_hi, hub_right,
                                     phi.incident_current);
  for (std::size_t c = 1; c < p.size(); ++c) {
    const std::size_t m = stage_of[c];
    const GreenFn& spoke = *stages[m].spoke;
    const double x = stages[m].position;
    const Complex drive = stages[m].strength * spoke(x, x) * hub_at_stage(m);
    Complex left = drive / spoke.left_solution().at(x).value;
    Complex right = drive / spoke.right_solution().at(x).value;
    if (c == src) {
      left += own_part(phi, side, Side::Left);
      right += own_part(phi, side, Side::Right);
    }
    channels[c].left = side_amplitude(p, c, Side::Left, spoke.left_solution(),
                                      left, phi.incident_current);
    channels[c].right = side_amplitude(p, c, Side::Right,
                                       spoke.right_solution(), right,
                                       phi.incident_current);
  }
  return summarize(std::move(channels), p.incident);
}

ScatteringSolution solve_greens(const StarProblem& problem) {
  return extract_solution(compose_problem(problem), problem);
}

}  // namespace deltacouple
