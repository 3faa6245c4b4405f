#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "deltacouple/matcher.hpp"
#include "deltacouple/model.hpp"
#include "deltacouple/types.hpp"

namespace deltacouple {

enum class GreenKind { Bare, TwoState, Chain };

/// Outgoing-wave Green's function G(x, x'; E) of (E - H) G = delta(x - x').
///
/// A bare kernel is (2m/hbar^2) u_<(x_<) u_>(x_>) / W[u_<, u_>] with u_<, u_>
/// the acceptable solutions on the left and right. A composed kernel is a bare
/// hub dressed by a list of point stages; each stage n folds in
///
///   G_n(x, x') = G_{n-1}(x, x')
///              + v_n G_{n-1}(x, x_n) G_{n-1}(x_n, x') / (1 - v_n G_{n-1}(x_n, x_n)),
///   v_n = K_n^2 G_n^0(x_n, x_n).
///
/// Values are immutable and cheap to copy.
class GreenFn {
 public:
  Complex operator()(double x, double xp) const;

  /// G(a, b) for every pair of `points`; one pass through the stages.
  MatrixXc table(const std::vector<double>& points) const;

  GreenKind kind() const noexcept;
  /// Number of folded stages (0 for a bare kernel).
  std::size_t level() const noexcept;
  /// Channel label of the bare hub kernel.
  std::optional<std::size_t> channel() const noexcept;

  /// Curve and parameters the bare hub kernel was built from.
  struct Origin {
    PotentialSpec spec;
    double energy = 0.0;
    double mass = 1.0;
    double hbar = 1.0;
  };
  const Origin& origin() const noexcept;

  /// Acceptable solutions of the underlying bare kernel.
  const BasisSolution& left_solution() const noexcept;
  const BasisSolution& right_solution() const noexcept;

  struct Stage {
    std::shared_ptr<const GreenFn> spoke;
    double strength = 0.0;
    double position = 0.0;
    Complex v;
    Complex denominator;
  };
  const std::vector<Stage>& stages() const noexcept;

 private:
  struct Bare;
  struct Node;
  explicit GreenFn(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  friend GreenFn bare_green(const PotentialSpec&, double, double, double,
                            std::optional<std::size_t>);
  friend GreenFn compose_stage(const GreenFn&, const GreenFn&, double, double,
                               GreenKind, const std::string&);

  std::shared_ptr<const Node> node_;
};

/// Stage pole threshold on |1 - v G(x_n, x_n)|.
inline constexpr double kMinDenominator = 1e-12;

GreenFn bare_green(const PotentialSpec& spec, double energy, double mass,
                   double hbar, std::optional<std::size_t> channel = {});

GreenFn compose_two_state(const GreenFn& g1, const GreenFn& g2,
                          double coupling, double position);

struct SpokeTerm {
  GreenFn green;
  double strength = 0.0;
  double position = 0.0;
};

/// Folds the spokes into the hub in the given order.
GreenFn compose_chain(const GreenFn& hub, const std::vector<SpokeTerm>& spokes);

/// Bare kernels of every channel of a validated problem, composed in
/// channel order.
GreenFn compose_problem(const StarProblem& problem);

/// Wavefunction amplitudes and probabilities from a composed kernel. Every
/// stage spoke must be a bare kernel labelled with its channel index.
ScatteringSolution extract_solution(const GreenFn& g, const StarProblem& problem);

/// compose_problem followed by extract_solution.
ScatteringSolution solve_greens(const StarProblem& problem);

}  // namespace deltacouple
