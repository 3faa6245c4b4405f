#pragma once

#include <string>
#include <utility>
#include <vector>

#include "deltacouple/model.hpp"
#include "deltacouple/types.hpp"

namespace deltacouple {

enum class BasisForm { Plane, Airy, Bessel };
enum class BasisRole { Incoming, Outgoing, Decaying, Regular, Fundamental };
enum class Region { Left, Right, Interior };

/// One exact solution of an uncoupled channel equation.
///
///   Plane   u = exp(q x), q = +-ik or +-kappa
///   Airy    u = alpha Ai(z) + beta Bi(z), z = scale (x - shift)
///   Bessel  u = F(xi), xi = arg0 exp(half_rate x), F one of I_{+i mu},
///           I_{-i mu}, K_{i mu}, or I_nu, K_nu (real order) below E = 0
class BasisSolution {
 public:
  enum class BesselKind { IPlus, IMinus, K, IReal, KReal };

  static BasisSolution plane(Complex q, double hbar_over_m, BasisRole role,
                             Region region);
  static BasisSolution airy(double scale, double shift, Complex alpha,
                            Complex beta, double hbar_over_m, BasisRole role,
                            Region region);
  static BasisSolution bessel(BesselKind kind, double order, double arg0,
                              double half_rate, double hbar_over_m,
                              BasisRole role, Region region);

  BasisForm form() const noexcept { return form_; }
  BasisRole role() const noexcept { return role_; }
  Region region() const noexcept { return region_; }

  ValueSlope at(double x) const;

  /// Probability current (hbar/m) Im(conj(u) u'), from the Wronskian of the
  /// underlying special-function pair; position independent.
  double current() const;

 private:
  BasisSolution() = default;

  BasisForm form_ = BasisForm::Plane;
  BasisRole role_ = BasisRole::Fundamental;
  Region region_ = Region::Left;
  double hbar_over_m_ = 1.0;
  Complex q_;
  double scale_ = 0.0;
  double shift_ = 0.0;
  Complex alpha_;
  Complex beta_;
  BesselKind bessel_ = BesselKind::K;
  double order_ = 0.0;
  double arg0_ = 0.0;
  double half_rate_ = 0.0;
};

/// Outer-region basis: {incoming, outgoing} on an open side, otherwise a
/// single decaying solution (regular I_nu on the closed tail of an
/// exponential channel below zero energy).
std::vector<BasisSolution> build_basis(const PotentialSpec& spec,
                                       double energy, double mass, double hbar,
                                       Side side);

/// Two independent solutions for a region between coupling points.
std::pair<BasisSolution, BasisSolution> fundamental_pair(
    const PotentialSpec& spec, double energy, double mass, double hbar);

struct MatchSystem {
  MatrixXc matrix;
  VectorXc rhs;
  /// One name per unknown (column), e.g. "c0.left.out", "c0.r1.a".
  std::vector<std::string> labels;
  /// Condition number of the column-equilibrated matrix.
  double condition = 0.0;
};

/// Condition numbers above this make assemble/solve_star throw.
inline constexpr double kMaxCondition = 1e12;

/// Continuity and derivative-jump rows at every coupling point; the
/// incoming wave (unit amplitude) is moved to the right-hand side.
MatchSystem assemble(const StarProblem& problem);

/// Condition number of the matching matrix without validating incidence or
/// thresholding the result. A channel closed on the incident side
/// contributes no incoming wave, so all-closed problems give the homogeneous
/// bound-state system.
double match_condition(const StarProblem& problem);

ScatteringSolution solve_star(const StarProblem& problem);

}  // namespace deltacouple
