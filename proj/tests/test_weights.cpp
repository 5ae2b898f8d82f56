#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "kernelscore/weights.hpp"
#include "support/test_support.hpp"

using namespace kernelscore;

namespace {

double w1(const WeightSpec& w, double z) {
  return eval_weight(w, std::span<const double>(&z, 1));
}

double v1(const ChainingSpec& v, double z) {
  return eval_chaining(v, std::span<const double>(&z, 1))[0];
}

// Integral of a univariate weight over [a, b], split at the kind's own
// breakpoints so indicator pieces are integrated exactly.
double integrate_weight(const WeightSpec& w, double a, double b) {
  std::vector<double> cuts{a, b};
  switch (w.kind) {
    case WeightKind::AboveThreshold:
    case WeightKind::BelowThreshold:
      cuts.push_back(w.thresholds[0]);
      break;
    case WeightKind::Interval:
      cuts.push_back(w.lower);
      cuts.push_back(w.upper);
      break;
    case WeightKind::LinearHalfSpace:
      if (w.coefficients[0] != 0.0) cuts.push_back(w.offset / w.coefficients[0]);
      break;
    default:
      break;
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = std::max(a, cuts[i]), hi = std::min(b, cuts[i + 1]);
    if (hi > lo) total += kstest::gauss5([&](double z) { return w1(w, z); }, lo, hi, 400);
  }
  return total;
}

std::vector<WeightSpec> univariate_weights() {
  return {WeightSpec::constant(),
          WeightSpec::above(0.4),
          WeightSpec::below(-0.3),
          WeightSpec::interval(-1.0, 0.5),
          WeightSpec::half_space({2.0}, 1.0),
          WeightSpec::half_space({-1.0}, 0.0),
          WeightSpec::gaussian_cdf(0.2, 0.7)};
}

}  // namespace

TEST_CASE("weight evaluations match hand-computed values") {
  std::vector<double> z1{1.0, -2.0};
  CHECK(eval_weight(WeightSpec::half_space({1.0, 1.0}, 0.0), z1) == 0.0);

  std::vector<double> z2{30.0, 26.0, 25.0};
  CHECK(eval_weight(WeightSpec::above({25.0, 25.0, 25.0}), z2) == 1.0);

  CHECK(w1(WeightSpec::gaussian_cdf(0.0, 0.5), 0.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("weights stay inside the unit interval and indicators are binary") {
  auto gen = kstest::rng(7);
  for (const WeightSpec& w : univariate_weights()) {
    for (int rep = 0; rep < 200; ++rep) {
      double z = kstest::random_vector(gen, 1, 2.0)[0];
      double value = w1(w, z);
      CHECK(value >= 0.0);
      CHECK(value <= 1.0);
      if (w.binary()) CHECK((value == 0.0 || value == 1.0));
    }
  }
  WeightSpec mv = WeightSpec::gaussian_cdf({0.0, 1.0}, {1.0, 0.5});
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> z = kstest::random_vector(gen, 2, 2.0);
    double value = eval_weight(mv, z);
    CHECK(value >= 0.0);
    CHECK(value <= 1.0);
  }
}

TEST_CASE("chaining evaluations match hand-computed values") {
  ChainingSpec above50 = ChainingSpec::from_weight(WeightSpec::above(50.0));
  CHECK(v1(above50, 30.0) == doctest::Approx(50.0).epsilon(1e-14));
  CHECK(v1(above50, 60.0) == doctest::Approx(60.0).epsilon(1e-14));

  ChainingSpec plane = ChainingSpec::plane_projection(0.0);
  std::vector<double> z{1.0, -3.0};
  std::vector<double> projected = eval_chaining(plane, z);
  CHECK(projected[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(projected[1] == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(projected[0] + projected[1] == doctest::Approx(0.0).epsilon(1e-14));

  ChainingSpec collapse =
      ChainingSpec::collapse_outside(WeightSpec::above({1.0, 1.0}), {1.0, 1.0});
  std::vector<double> outside{0.0, 5.0};
  std::vector<double> collapsed = eval_chaining(collapse, outside);
  CHECK(collapsed[0] == 1.0);
  CHECK(collapsed[1] == 1.0);
}

TEST_CASE("chaining differences integrate the weight") {
  auto gen = kstest::rng(13);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (const WeightSpec& w : univariate_weights()) {
    ChainingSpec v = ChainingSpec::from_weight(w);
    for (int rep = 0; rep < 15; ++rep) {
      double a = unif(gen), b = unif(gen);
      double lo = std::min(a, b), hi = std::max(a, b);
      if (hi - lo < 1e-3) continue;
      double diff = v1(v, hi) - v1(v, lo);
      CHECK(std::abs(diff - integrate_weight(w, lo, hi)) < 1e-8);
    }
  }
}

TEST_CASE("univariate chaining functions are non-decreasing") {
  for (const WeightSpec& w : univariate_weights()) {
    ChainingSpec v = ChainingSpec::from_weight(w);
    double prev = v1(v, -4.0);
    for (double z = -4.0 + 0.05; z <= 4.0; z += 0.05) {
      double cur = v1(v, z);
      CHECK(cur >= prev - 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("integrated gaussian chaining is strictly increasing per coordinate") {
  ChainingSpec v = ChainingSpec::gaussian_integrated({0.0, 1.0}, {1.0, 0.5});
  auto gen = kstest::rng(19);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> z = kstest::random_vector(gen, 2, 2.0);
    std::vector<double> base = eval_chaining(v, z);
    for (std::size_t j = 0; j < 2; ++j) {
      std::vector<double> bumped = z;
      bumped[j] += 1e-4;
      std::vector<double> moved = eval_chaining(v, bumped);
      CHECK(moved[j] > base[j]);
    }
  }
}

TEST_CASE("weight and chaining validation") {
  std::vector<double> z{0.0};
  CHECK_THROWS_AS(eval_weight(WeightSpec::above({1.0, 2.0}), z), std::invalid_argument);
  CHECK_THROWS_AS(eval_weight(WeightSpec::half_space({1.0, 1.0}, 0.0), z),
                  std::invalid_argument);

  WeightSpec smooth = WeightSpec::gaussian_cdf(0.0, 1.0);
  CHECK_THROWS_AS(ChainingSpec::collapse_outside(smooth, {0.0}).validate(),
                  std::invalid_argument);

  WeightSpec bad_sigma = WeightSpec::gaussian_cdf(0.0, 0.0);
  CHECK_THROWS_AS(bad_sigma.validate(), std::invalid_argument);

  WeightSpec bad_interval = WeightSpec::interval(1.0, -1.0);
  CHECK_THROWS_AS(bad_interval.validate(), std::invalid_argument);
}
