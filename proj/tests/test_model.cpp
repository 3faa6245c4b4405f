#include <doctest.h>

#include <cmath>

#include "deltacouple/model.hpp"
#include "helpers.hpp"

using namespace deltacouple;
using testing_support::const_pair;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("potential specs evaluate their curves") {
  CHECK(PotentialSpec::constant(5.0)(-3.0) == 5.0);
  CHECK(PotentialSpec::linear(-2.0)(1.5) == -3.0);
  CHECK(PotentialSpec::exponential(2.0, -1.0)(1.0) == doctest::Approx(2.0 / std::exp(1.0)));
  CHECK_THROWS_AS(PotentialSpec::linear(0.0), Error);
  CHECK_THROWS_AS(PotentialSpec::exponential(0.0, 1.0), Error);
  CHECK_THROWS_AS(PotentialSpec::exponential(1.0, 0.0), Error);
  CHECK_THROWS_AS(PotentialSpec::constant(0.0).slope(), Error);
}

TEST_CASE("classify_channel on constant curves") {
  const auto open = classify_channel(PotentialSpec::constant(0.0), 6.0, 1.0, 1.0, Side::Right);
  CHECK(open.cls == ChannelClass::Open);
  CHECK(open.wavenumber == doctest::Approx(std::sqrt(12.0)).epsilon(1e-15));

  const auto closed = classify_channel(PotentialSpec::constant(5.0), 3.0, 1.0, 1.0, Side::Right);
  CHECK(closed.cls == ChannelClass::Closed);
  CHECK(closed.wavenumber == doctest::Approx(2.0).epsilon(1e-15));

  CHECK(code_of([] { classify_channel(PotentialSpec::constant(5.0), 5.0, 1.0, 1.0, Side::Left); }) ==
        ErrorCode::Threshold);
}

TEST_CASE("classify_channel on linear and exponential curves") {
  const auto up = PotentialSpec::linear(1.0);
  CHECK(classify_channel(up, 1.0, 1.0, 1.0, Side::Right).cls == ChannelClass::Forbidden);
  CHECK(classify_channel(up, 1.0, 1.0, 1.0, Side::Left).cls == ChannelClass::Open);
  CHECK(classify_channel(up, 1.0, 1.0, 1.0, Side::Left).wavenumber ==
        doctest::Approx(std::cbrt(2.0)));
  const auto down = PotentialSpec::linear(-1.0);
  CHECK(classify_channel(down, 1.0, 1.0, 1.0, Side::Left).cls == ChannelClass::Forbidden);
  CHECK(classify_channel(down, 1.0, 1.0, 1.0, Side::Right).cls == ChannelClass::Open);

  const auto wall = PotentialSpec::exponential(1.0, 1.0);
  const auto left = classify_channel(wall, 2.0, 1.0, 1.0, Side::Left);
  CHECK(left.cls == ChannelClass::Open);
  CHECK(left.wavenumber == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(classify_channel(wall, 2.0, 1.0, 1.0, Side::Right).cls == ChannelClass::Forbidden);
  CHECK(classify_channel(wall, -1.0, 1.0, 1.0, Side::Left).cls == ChannelClass::Closed);
  CHECK(code_of([&] { classify_channel(wall, 0.0, 1.0, 1.0, Side::Left); }) ==
        ErrorCode::Threshold);
}

TEST_CASE("classify_channel scales with energy") {
  for (double v : {-2.0, 0.0, 3.0}) {
    for (double e : {4.0, 7.5}) {
      const auto a = classify_channel(PotentialSpec::constant(v), e, 1.0, 1.0, Side::Left);
      const auto b = classify_channel(PotentialSpec::constant(2 * v), 2 * e, 1.0, 1.0, Side::Left);
      CHECK(std::abs(b.wavenumber / a.wavenumber - std::sqrt(2.0)) < 1e-12 * std::sqrt(2.0));
    }
  }
}

TEST_CASE("validate_problem") {
  CHECK(validate_problem(const_pair(6.0)) == const_pair(6.0));

  StarProblem p = const_pair(6.0);
  p.channels.push_back(PotentialSpec::constant(1.0));
  try {
    validate_problem(p);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("couplings must number N-1") != std::string::npos);
  }

  p = const_pair(3.0);
  p.incident.channel = 1;
  try {
    validate_problem(p);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoIncidentWave);
    CHECK(std::string(e.what()) == "no propagating incident wave");
  }

  p = const_pair(6.0);
  p.couplings[0].strength = -1.0;
  CHECK_THROWS_AS(validate_problem(p), Error);
  p = const_pair(6.0);
  p.mass = 0.0;
  CHECK_THROWS_AS(validate_problem(p), Error);
  p = const_pair(6.0);
  p.channels.pop_back();
  p.couplings.clear();
  CHECK_THROWS_AS(validate_problem(p), Error);
}

TEST_CASE("distinct_positions sorts and merges") {
  const auto xs = distinct_positions({{1.0, 1.0}, {-0.5, 1.0}, {1.0, 2.0}, {0.0, 0.3}});
  REQUIRE(xs.size() == 3);
  CHECK(xs[0] == -0.5);
  CHECK(xs[1] == 0.0);
  CHECK(xs[2] == 1.0);
}
