#include "shiftdyn/witnesses.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace shiftdyn;
using shiftdyn::testing::random_fjm;
using shiftdyn::testing::window_deviation;

namespace {

ModuleVector block_p1_at_zero() {
  ModuleVector b;
  b.set(0, Operator::projection(1));
  return b;
}

}  // namespace

TEST_CASE("identity-weight extension is exactly periodic") {
  const GeneralizedShift shift = family_constant(BasisShiftOp::identity());
  const ModuleVector ext = periodic_extension(shift, block_p1_at_zero(), 3, 2);
  REQUIRE(ext.coords.size() == 5);
  for (index_t c : {-6, -3, 0, 3, 6}) {
    REQUIRE(ext.has(c));
    CHECK(window_deviation(ext.at(c), Operator::projection(1), 4) == 0.0);
  }
  CHECK(periodic_interior_residual(shift, ext, 3) == 0.0);
}

TEST_CASE("geometric extension tails decay at the walk rate") {
  const GeneralizedShift shift = family_example_3_11(2.0);
  const index_t n = 6, L = 10;
  const ModuleVector ext = periodic_extension(shift, block_p1_at_zero(), n, L);
  for (index_t l = 1; l <= L; ++l) {
    const double expected = std::pow(2.0, static_cast<double>(2 - l * n));
    CHECK(operator_norm(ext.at(l * n)) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(operator_norm(ext.at(-l * n)) == doctest::Approx(expected).epsilon(1e-12));
  }
  // the whole tail beyond the block is bounded by the geometric sum
  const ModuleVector tail = restrict_coords(ext, [&](index_t c) { return c != 0; });
  double bound = 0.0;
  for (index_t l = 1; l <= L; ++l) {
    bound += 2.0 * std::pow(2.0, static_cast<double>(2 - l * n));
  }
  CHECK(module_norm(tail) <= bound + 1e-12);
  CHECK(periodic_interior_residual(shift, ext, n) < 1e-10);
}

TEST_CASE("ratio-weight extensions satisfy interior periodicity") {
  const GeneralizedShift shift = family_example_3_2();
  const ModuleVector ext = periodic_extension(shift, block_p1_at_zero(), 4, 20);
  CHECK(periodic_interior_residual(shift, ext, 4) < 1e-10);
}

TEST_CASE("blocks wider than the period are rejected") {
  ModuleVector wide;
  wide.set(0, Operator::projection(1));
  wide.set(3, Operator::projection(1));
  const GeneralizedShift shift = family_constant(BasisShiftOp::identity());
  CHECK_THROWS_AS(periodic_extension(shift, wide, 3, 1), InvalidParameter);
  CHECK_NOTHROW(periodic_extension(shift, wide, 4, 1));
}

TEST_CASE("transitivity witness lands inside eps for the geometric weights") {
  const GeneralizedShift shift = family_example_3_11(2.0);
  const FjmSpec spec{1, 1};
  const ModuleVector x = make_fjm_vector(spec);
  const WitnessReport wr = transitivity_witness(shift, x, x, 50, spec);
  CHECK(wr.input_error < 1e-6);
  CHECK(wr.output_errors.front() < 1e-6);
  CHECK(wr.input_error <= wr.predicted_input_bound + 1e-12);
  CHECK(wr.output_errors.front() <= wr.predicted_output_bounds.front() + 1e-12);
}

TEST_CASE("non-decaying weights leave the witness at the scale of the data") {
  const GeneralizedShift shift = family_constant(BasisShiftOp::identity());
  const FjmSpec spec{1, 1};
  const ModuleVector x = make_fjm_vector(spec);
  const WitnessReport wr = transitivity_witness(shift, x, x, 50, spec);
  CHECK(wr.output_errors.front() > 1.0);
}

TEST_CASE("zero data gives a zero witness") {
  const GeneralizedShift shift = family_example_3_11(2.0);
  const FjmSpec spec{1, 1};
  const ModuleVector zero;
  const WitnessReport wr = transitivity_witness(shift, zero, zero, 9, spec);
  CHECK(wr.witness.empty());
  CHECK(wr.input_error == 0.0);
  CHECK(wr.output_errors.front() == 0.0);
}

TEST_CASE("support collisions are rejected") {
  const GeneralizedShift shift = family_example_3_11(2.0);
  const FjmSpec spec{2, 1};
  const ModuleVector x = make_fjm_vector(spec);
  CHECK_THROWS_AS(transitivity_witness(shift, x, x, 4, spec), SupportCollision);
  CHECK_NOTHROW(transitivity_witness(shift, x, x, 5, spec));
}

TEST_CASE("witness errors respect the propagated bound on random data") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<index_t> jm(1, 2);
  for (int trial = 0; trial < 25; ++trial) {
    const FjmSpec spec{jm(rng), jm(rng)};
    const GeneralizedShift shift =
        trial % 2 == 0 ? family_example_3_11(2.0) : family_example_3_2();
    const ModuleVector x = random_fjm(rng, spec.J, spec.m);
    const ModuleVector y = random_fjm(rng, spec.J, spec.m);
    const index_t t = 2 * spec.J + 1 + (trial % 7) * 15;
    const WitnessReport wr = transitivity_witness(shift, x, y, t, spec);
    CHECK(wr.input_error <= wr.predicted_input_bound * (1.0 + 1e-10) + 1e-12);
    CHECK(wr.output_errors.front() <= wr.predicted_output_bounds.front() * (1.0 + 1e-10) + 1e-12);
  }
}

TEST_CASE("witness soundness: the budget premise forces errors below eps") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<index_t> jm(1, 2);
  std::uniform_real_distribution<double> slack(0.1, 2.0);
  int premise_held = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const FjmSpec spec{jm(rng), jm(rng)};
    const bool geometric = trial % 2 == 0;
    const GeneralizedShift shift =
        geometric ? family_example_3_11(2.0) : family_example_3_2();
    const ModuleVector x = random_fjm(rng, spec.J, spec.m);
    const ModuleVector y = random_fjm(rng, spec.J, spec.m);
    const index_t t = geometric ? 2 * spec.J + 10 + 5 * (trial % 5)
                                : 500 + 700 * (trial % 5);

    double quad = 0.0;  // worst quadruple entry; dD = dG = 0 for the default rule
    for (index_t j = -spec.J; j <= spec.J; ++j) {
      quad = std::max(quad,
                      forward_product_norm(shift.W, j, t, Operator::projection(spec.m)));
      quad = std::max(quad,
                      backward_product_norm(shift.W, j, t, Operator::projection(spec.m)));
    }
    const double scale = std::max({module_norm(x), module_norm(y), 1.0});
    const double eps = quad * 2.0 * static_cast<double>(2 * spec.J + 1) * scale *
                       (1.0 + slack(rng));
    if (eps <= 0.0) continue;
    ++premise_held;  // eps is chosen so the premise holds by construction
    const WitnessReport wr = transitivity_witness(shift, x, y, t, spec);
    CHECK(wr.input_error < eps);
    CHECK(wr.output_errors.front() < eps);
  }
  CHECK(premise_held >= 30);
}

TEST_CASE("disjoint witness errors shrink along the exponent sequence") {
  const DisjointShiftPair pair = family_example_3_6();
  const std::vector<GeneralizedShift> shifts{pair.first, pair.second};
  const FjmSpec spec{1, 1};
  const ModuleVector x = make_fjm_vector(spec);
  const std::vector<ModuleVector> targets{x, x};

  double prev_in = 1e300;
  std::vector<double> prev_out{1e300, 1e300};
  for (index_t n : {20, 40, 60}) {
    const WitnessReport wr = disjoint_witness(shifts, x, targets, n, spec);
    CHECK(wr.input_error < prev_in);
    CHECK(wr.output_errors[0] < prev_out[0]);
    CHECK(wr.output_errors[1] < prev_out[1]);
    prev_in = wr.input_error;
    prev_out = wr.output_errors;
    if (n == 60) {
      CHECK(wr.input_error < 1e-4);
      CHECK(wr.output_errors[0] < 1e-4);
      CHECK(wr.output_errors[1] < 1e-4);
    }
    CHECK(wr.input_error <= wr.predicted_input_bound + 1e-12);
    CHECK(wr.output_errors[0] <= wr.predicted_output_bounds[0] + 1e-12);
    CHECK(wr.output_errors[1] <= wr.predicted_output_bounds[1] + 1e-12);
  }
}

TEST_CASE("single-shift disjoint witness reduces to the transitivity witness") {
  const GeneralizedShift shift = family_example_3_11(2.0);
  const FjmSpec spec{1, 1};
  const ModuleVector x = make_fjm_vector(spec);
  const WitnessReport lone = disjoint_witness({shift}, x, {x}, 40, spec);
  const WitnessReport plain = transitivity_witness(shift, x, x, 40, spec);
  CHECK(lone.input_error == doctest::Approx(plain.input_error).epsilon(1e-12));
  CHECK(lone.output_errors.front() ==
        doctest::Approx(plain.output_errors.front()).epsilon(1e-12));
  bool noted = false;
  for (const auto& n : lone.notes) {
    if (n.find("single shift") != std::string::npos) noted = true;
  }
  CHECK(noted);
}

TEST_CASE("identical shifts cannot approach two distinct targets") {
  const auto w = weights_half_double();
  const GeneralizedShift a(unitary_identity(), w);
  const GeneralizedShift b(unitary_bilateral(), w);
  const FjmSpec spec{1, 1};
  std::mt19937_64 rng(5);
  const ModuleVector x = make_fjm_vector(spec);
  const ModuleVector y1 = make_fjm_vector(spec);
  const ModuleVector y2 = random_fjm(rng, spec.J, spec.m);
  const double gap = module_norm(subtract(y1, y2));
  REQUIRE(gap > 0.1);
  for (index_t n : {10, 30, 50}) {
    const WitnessReport wr = disjoint_witness({a, b}, x, {y1, y2}, n, spec);
    const double worst = std::max(wr.output_errors[0], wr.output_errors[1]);
    CHECK(worst >= gap / 2.0 - 1e-9);
  }
}

TEST_CASE("disjoint witness preconditions") {
  const DisjointShiftPair pair = family_example_3_6();
  const FjmSpec spec{1, 1};
  const ModuleVector x = make_fjm_vector(spec);

  CHECK_THROWS_AS(disjoint_witness({pair.first, pair.second}, x, {x, x}, 3, spec),
                  SupportCollision);

  const GeneralizedShift same_u(unitary_identity(), pair.second.W);
  CHECK_THROWS_AS(disjoint_witness({pair.first, same_u}, x, {x, x}, 40, spec),
                  StarConditionUnverified);
}

TEST_CASE("certified return sets for the geometric weights") {
  const GeneralizedShift shift = family_example_3_11(2.0);
  const FjmSpec spec{1, 1};
  const ModuleVector x = make_fjm_vector(spec);
  const ReturnSet rs = return_set_scan(shift, x, x, spec, 0.1, 200);
  CHECK_FALSE(rs.members.empty());
  CHECK(rs.trailing_run_start() <= 30);
  CHECK(lower_density(rs) >= 0.8);

  const GeneralizedShift idw = family_constant(BasisShiftOp::identity());
  CHECK(return_set_scan(idw, x, x, spec, 0.1, 100).members.empty());

  const double huge = 2.0 * module_norm(x) + 1.0;
  const ReturnSet all = return_set_scan(idw, x, x, spec, huge, 60);
  CHECK(all.members.size() == static_cast<std::size_t>(60 - 2 * spec.J));
}

TEST_CASE("certified membership grows with eps") {
  const GeneralizedShift shift = family_example_3_11(2.0);
  const FjmSpec spec{1, 1};
  const ModuleVector x = make_fjm_vector(spec);
  const ReturnSet tight = return_set_scan(shift, x, x, spec, 0.02, 80);
  const ReturnSet loose = return_set_scan(shift, x, x, spec, 0.3, 80);
  for (index_t n : tight.members) CHECK(loose.contains(n));
  CHECK(loose.members.size() >= tight.members.size());
}
