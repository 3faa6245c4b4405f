#include <doctest.h>

#include <cmath>
#include <random>

#include "deltacouple/closed_form.hpp"
#include "deltacouple/matcher.hpp"
#include "deltacouple/oracle.hpp"
#include "helpers.hpp"

using namespace deltacouple;
using namespace testing_support;

TEST_CASE("dense solve agrees with the matcher") {
  const auto d = dense_match_solve(const_pair(6.0));
  CHECK(std::abs(d.t_cross_total - 0.281567059127255) < 1e-12);
  CHECK(std::abs(d.t_cross_total - solve_star(const_pair(6.0)).t_cross_total) < 1e-12);
  CHECK(d.condition.has_value());

  std::mt19937 rng(31);
  for (int n = 0; n < 40; ++n) {
    const StarProblem p = random_star(rng, 2 + n % 4, false, n % 2 == 0);
    const auto a = dense_match_solve(p);
    const auto b = solve_star(p);
    CHECK(std::abs(a.t_cross_total - b.t_cross_total) < 1e-10);
    CHECK(std::abs(a.r_back - b.r_back) < 1e-10);
    CHECK(a.flux_residual < 1e-8);
  }
}

TEST_CASE("dense solve special cases") {
  const auto d = dense_match_solve(const_pair(9.0, 0.0));
  CHECK(d.t_cross_total == 0.0);
  CHECK(std::abs(*d.t_same - 1.0) < 1e-15);

  StarProblem three;
  three.channels = {PotentialSpec::constant(0.0), PotentialSpec::constant(5.0),
                    PotentialSpec::constant(5.0)};
  three.couplings = {{0.0, 1.0}, {0.0, 1.0}};
  three.energy = 6.0;
  const auto a = dense_match_solve(three);
  const auto b = dense_match_solve(const_pair(6.0, std::sqrt(2.0)));
  CHECK(std::abs(a.t_cross_total - b.t_cross_total) < 1e-10);
  CHECK(std::abs(a.r_back - b.r_back) < 1e-10);

  CHECK_THROWS_AS(dense_match_solve(const_pair(5.0)), Error);
}

TEST_CASE("smeared coupling approaches the delta limit") {
  SUBCASE("constant pair at E=6 with h=1e-3") {
    SmearedProblem sp = default_smeared(const_pair(6.0), 1e-2);
    sp.grid.h = 1e-3;
    const auto s = smeared_solve(sp);
    CHECK(std::abs(s.t_cross_total - 0.28157) < 2e-3);
    CHECK(s.flux_residual < 1e-6);
  }

  SUBCASE("error shrinks monotonically with sigma") {
    const double exact = constant_pair_transition(0.0, 5.0, 1.0, 1.0, 1.0, 8.0);
    double last = 1.0;
    for (double sigma : {0.04, 0.02, 0.01}) {
      const double err = std::abs(smeared_solve(default_smeared(const_pair(8.0), sigma)).t_cross_total - exact);
      CAPTURE(sigma);
      CHECK(err < last);
      last = err;
    }
    CHECK(last < 2e-3);
  }

  SUBCASE("zero coupling") {
    const auto s = smeared_solve(default_smeared(const_pair(6.0, 0.0), 0.02));
    CHECK(s.t_cross_total < 1e-12);
    CHECK(std::abs(*s.t_same - 1.0) < 1e-6);
  }

  SUBCASE("linear pair") {
    const auto s = smeared_solve(default_smeared(linear_pair(1.0), 0.01));
    CHECK(std::abs(s.t_cross_total - 0.915071502423150) < 2e-3);
    CHECK(s.flux_residual < 1e-6);
  }
}

TEST_CASE("halving h changes the smeared result at second order") {
  SmearedProblem sp = default_smeared(const_pair(7.0), 0.02);
  sp.richardson = false;
  const double h = sp.grid.h;
  double t[3];
  for (int i = 0; i < 3; ++i) {
    sp.grid.h = h / (1 << i);
    t[i] = smeared_solve(sp).t_cross_total;
  }
  const double ratio = (t[0] - t[1]) / (t[1] - t[2]);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("smeared solve rejects grids that cannot resolve the problem") {
  SmearedProblem sp = default_smeared(const_pair(6.0), 0.02);
  sp.grid.h = 0.02;
  try {
    smeared_solve(sp);
    FAIL("expected an underresolved grid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridUnderresolved);
    CHECK(std::string(e.what()).find("grid underresolved") == 0);
  }
  sp = default_smeared(const_pair(6.0), 0.02);
  sp.grid.x_max = 0.1;
  CHECK_THROWS_AS(smeared_solve(sp), Error);
  CHECK_THROWS_AS(default_smeared(const_pair(6.0), 0.0), Error);
}
