#include "shiftdyn/operator_core.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "shiftdyn/shift_dynamics.hpp"
#include "support.hpp"

using namespace shiftdyn;
using shiftdyn::testing::random_pm_ranged_term;
using shiftdyn::testing::window_deviation;

TEST_CASE("compose of constant shifts multiplies coefficients and adds offsets") {
  const Operator a(BasisShiftOp::constant(1, 2.0));
  const Operator b(BasisShiftOp::constant(1, 3.0));
  const Operator c = compose(a, b);
  REQUIRE(c.single_shift());
  CHECK(c.terms().front().offset == 2);
  for (index_t j = -5; j <= 5; ++j) CHECK(c.terms().front().coeff(j) == doctest::Approx(6.0));
}

TEST_CASE("weight composed with its inverse is the identity") {
  const auto w = weights_half_double();
  const Operator prod = compose(Operator(w->weight(0)), Operator(w->inverse_weight(0)));
  CHECK(window_deviation(prod, Operator::identity(), 20) < 1e-12);
}

TEST_CASE("two-step ratio weight product acts as expected on e_{-1}") {
  const auto w = weights_example_3_2();
  const Operator prod = compose(Operator(w->weight(2)), Operator(w->weight(1)));
  const auto image = prod.column(-1);
  REQUIRE(image.size() == 1);
  CHECK(image[0].first == 1);
  CHECK(image[0].second == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  // dense route agrees
  const DenseOp d1 = materialize(compose(Operator(w->weight(1)), Operator::projection(3)), {8});
  const Operator d2 = compose(Operator(w->weight(2)), Operator(d1));
  CHECK(d2.dense().at(1, -1) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("restricted product norms match the hand-computed values") {
  const auto w = weights_example_3_2();
  const Operator w21 = compose(Operator(w->weight(2)), Operator(w->weight(1)));
  CHECK(operator_norm(w21, Projection{1}) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  const Operator w32 = compose(Operator(w->weight(3)), Operator(w->weight(2)));
  CHECK(operator_norm(w32, Projection{1}) == doctest::Approx(9.0 / 8.0).epsilon(1e-12));

  CHECK(operator_norm(Operator::projection(4)) == doctest::Approx(1.0));
}

TEST_CASE("adjoint basics") {
  CHECK(window_deviation(adjoint(Operator::identity()), Operator::identity(), 10) == 0.0);

  const Operator fwd = unitary_bilateral();
  const Operator back = unitary_bilateral_inverse();
  CHECK(window_deviation(adjoint(fwd), back, 10) == 0.0);

  const auto w = weights_half_double();
  const Operator w1(w->weight(0));
  CHECK(window_deviation(adjoint(adjoint(w1)), w1, 10) == 0.0);
}

TEST_CASE("dense adjoint is the transpose and an involution") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  DenseOp d = DenseOp::zero({4});
  for (index_t r = -4; r <= 4; ++r)
    for (index_t c = -4; c <= 4; ++c) d.entries(d.window.slot(r), d.window.slot(c)) = val(rng);
  const Operator a(d);
  const Operator astar = adjoint(a);
  for (index_t r = -4; r <= 4; ++r)
    for (index_t c = -4; c <= 4; ++c) CHECK(astar.dense().at(r, c) == d.at(c, r));
  CHECK(window_deviation(adjoint(astar), a, 4) == 0.0);
}

TEST_CASE("built-in weights: inverse round trip and dense agreement") {
  for (const auto& w : {weights_example_3_2(), weights_half_double(), weights_third_triple_sq(),
                        weights_example_3_11(2.0)}) {
    for (index_t j = -20; j <= 20; ++j) {
      const Operator prod = compose(Operator(w->weight(j)), Operator(w->inverse_weight(j)));
      for (index_t k = -20; k <= 20; ++k) {
        const auto col = prod.column(k);
        REQUIRE(col.size() == 1);
        CHECK(col[0].first == k);
        CHECK(std::abs(col[0].second - 1.0) < 1e-12);
      }
      // dense materializations of the restricted ops agree entrywise
      const Operator restricted = compose(prod, Operator::projection(20));
      CHECK(window_deviation(restricted, Operator::projection(20), 25) < 1e-12);
    }
  }
}

TEST_CASE("exact max-coefficient norm equals the dense singular value") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<index_t> mdist(1, 10);
  for (int trial = 0; trial < 25; ++trial) {
    const index_t m = mdist(rng);
    const Operator op(random_pm_ranged_term(rng, m));
    const double exact = operator_norm(op);
    const double dense = operator_norm(Operator(materialize(op, {30})));
    CHECK(std::abs(exact - dense) < 1e-10);
  }
}

TEST_CASE("C*-identity holds for exact and dense routes") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator a(random_pm_ranged_term(rng, 6));
    const double na = operator_norm(a);
    CHECK(std::abs(operator_norm(adjoint(a)) - na) < 1e-10);
    CHECK(std::abs(operator_norm(compose(adjoint(a), a)) - na * na) < 1e-10);

    const Operator d(materialize(a, {15}));
    const double nd = operator_norm(d);
    CHECK(std::abs(operator_norm(adjoint(d)) - nd) < 1e-10 * std::max(1.0, nd));
    CHECK(std::abs(operator_norm(compose(adjoint(d), d)) - nd * nd) <
          1e-10 * std::max(1.0, nd * nd));
  }
}

TEST_CASE("materialization off the window is a hard error") {
  const Operator shift_up(BasisShiftOp::constant(1, 1.0));
  CHECK_THROWS_AS(materialize(shift_up, {5}), WindowOverflow);

  // restricted so the top column would escape
  const Operator edge = compose(shift_up, Operator::projection(5));
  CHECK_THROWS_AS(materialize(edge, {5}), WindowOverflow);
  CHECK_NOTHROW(materialize(edge, {6}));
}

TEST_CASE("dense composition rejects escaping images instead of truncating") {
  const Operator p = Operator::projection(5);
  const DenseOp dp = materialize(p, {5});
  const Operator shift_up(BasisShiftOp::constant(1, 1.0));
  CHECK_THROWS_AS(compose(shift_up, Operator(dp)), WindowOverflow);
}

TEST_CASE("dense product agrees with exact composition inside the window") {
  const auto w = weights_example_3_2();
  const Operator a(w->weight(1));
  const Operator b(w->weight(2));
  const Operator exact = compose(compose(b, a), Operator::projection(6));

  const DenseOp da = materialize(compose(a, Operator::projection(6)), {10});
  const Operator dense = compose(b, Operator(da));
  CHECK(window_deviation(exact, dense, 10) < 1e-12);
}

TEST_CASE("norm of an unrestricted full-support operator is rejected") {
  const Operator w(weights_example_3_2()->weight(1));
  CHECK_THROWS_AS(operator_norm(w), InvalidParameter);
  CHECK_NOTHROW(operator_norm(w, Projection{3}));
}

TEST_CASE("inverse surfaces a zero coefficient as an error at evaluation") {
  const BasisShiftOp p1 = BasisShiftOp::projection(1);
  const BasisShiftOp inv = inverse(p1);
  CHECK_THROWS_AS(inv.coeff(5), InvalidParameter);
}

TEST_CASE("non-finite matrices surface as iteration failures") {
  DenseOp d = DenseOp::zero({2});
  d.entries(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(operator_norm(Operator(d)), NonConvergence);
}

TEST_CASE("shift sums with overlapping images use the gram norm") {
  // A = P_1 + (shift by 2 restricted to [-1,1]); columns overlap at rows
  std::vector<BasisShiftOp> terms;
  terms.push_back(BasisShiftOp::projection(1));
  terms.push_back(compose(BasisShiftOp::constant(2, 1.0), BasisShiftOp::projection(1)));
  const Operator a(terms);
  const double exact = operator_norm(a);
  const double dense = operator_norm(Operator(materialize(a, {6})));
  CHECK(exact == doctest::Approx(dense).epsilon(1e-10));
}
