#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "kernelscore/kernels.hpp"
#include "support/test_support.hpp"

using namespace kernelscore;

namespace {

TransformedKernel plain(KernelSpec base) { return TransformedKernel::plain(std::move(base)); }

std::vector<TransformedKernel> sample_kernels(std::size_t d) {
  std::vector<TransformedKernel> kernels;
  if (d == 1) kernels.push_back(plain(KernelSpec::absolute_difference()));
  kernels.push_back(plain(KernelSpec::euclidean_power(d, 1.0)));
  kernels.push_back(plain(KernelSpec::euclidean_power(d, 1.5)));
  kernels.push_back(plain(KernelSpec::variogram(d, 0.5)));
  kernels.push_back(plain(KernelSpec::inverse_multiquadric(d)));

  WeightSpec orthant = WeightSpec::above(std::vector<double>(d, 0.25));
  std::vector<double> x0(d, 0.25);
  kernels.push_back(TransformedKernel::chained(
      KernelSpec::euclidean_power(d, 1.0), ChainingSpec::collapse_outside(orthant, x0)));
  kernels.push_back(
      TransformedKernel::vertically_rescaled(KernelSpec::euclidean_power(d, 1.0), orthant, x0));
  kernels.push_back(
      TransformedKernel::vertically_rescaled(KernelSpec::inverse_multiquadric(d), orthant, {}));
  kernels.push_back(TransformedKernel::centered(KernelSpec::euclidean_power(d, 1.0), x0));
  return kernels;
}

}  // namespace

TEST_CASE("kernel evaluations match hand-computed values") {
  std::vector<double> origin{0.0, 0.0}, p34{3.0, 4.0};
  CHECK(evaluate_kernel(plain(KernelSpec::euclidean_power(2, 1.0)), origin, p34) ==
        doctest::Approx(5.0).epsilon(1e-14));

  std::vector<double> a{1.0, 3.0}, b{1.0, 2.0};
  CHECK(evaluate_kernel(plain(KernelSpec::variogram(2, 1.0)), a, b) ==
        doctest::Approx(2.0).epsilon(1e-14));

  std::vector<double> y{0.3, -0.7};
  CHECK(evaluate_kernel(plain(KernelSpec::inverse_multiquadric(2)), y, y) ==
        doctest::Approx(-1.0).epsilon(1e-14));

  TransformedKernel chained = TransformedKernel::chained(
      KernelSpec::absolute_difference(), ChainingSpec::from_weight(WeightSpec::above(1.0)));
  std::vector<double> u{0.2}, v{0.7};
  CHECK(evaluate_kernel(chained, u, v) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("kernel diagonal vanishes except for the bounded kernel") {
  auto gen = kstest::rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x = kstest::random_vector(gen, 3);
    CHECK(evaluate_kernel(plain(KernelSpec::euclidean_power(3, 1.3)), x, x) == 0.0);
    CHECK(evaluate_kernel(plain(KernelSpec::variogram(3, 0.5)), x, x) == 0.0);
    CHECK(evaluate_kernel(plain(KernelSpec::inverse_multiquadric(3)), x, x) ==
          doctest::Approx(-1.0).epsilon(1e-14));
  }
}

TEST_CASE("kernels are symmetric under every transform") {
  auto gen = kstest::rng(17);
  for (std::size_t d : {std::size_t{1}, std::size_t{3}}) {
    for (const TransformedKernel& k : sample_kernels(d)) {
      for (int rep = 0; rep < 25; ++rep) {
        std::vector<double> x = kstest::random_vector(gen, d);
        std::vector<double> y = kstest::random_vector(gen, d);
        CHECK(evaluate_kernel(k, x, y) == evaluate_kernel(k, y, x));
      }
    }
  }
}

TEST_CASE("sampled conditional negative definiteness") {
  auto gen = kstest::rng(23);
  std::normal_distribution<double> coef(0.0, 1.0);
  for (std::size_t d : {std::size_t{1}, std::size_t{2}}) {
    for (const TransformedKernel& k : sample_kernels(d)) {
      for (int rep = 0; rep < 40; ++rep) {
        std::size_t n = 2 + static_cast<std::size_t>(gen() % 7);
        std::vector<std::vector<double>> pts;
        for (std::size_t i = 0; i < n; ++i) pts.push_back(kstest::random_vector(gen, d, 1.5));
        std::vector<double> c(n);
        double mean = 0.0;
        for (double& ci : c) {
          ci = coef(gen);
          mean += ci;
        }
        mean /= static_cast<double>(n);
        for (double& ci : c) ci -= mean;  // coefficients sum to zero
        double quad = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j)
            quad += c[i] * c[j] * evaluate_kernel(k, pts[i], pts[j]);
        CHECK(quad <= 1e-9);
      }
    }
  }
}

TEST_CASE("empirical kernel score worked examples") {
  EnsembleForecast two = EnsembleForecast::from_values({0.0, 2.0});
  std::vector<double> y{1.0};
  CHECK(empirical_kernel_score(plain(KernelSpec::absolute_difference()), two, y) ==
        doctest::Approx(0.5).epsilon(1e-14));

  // Perfect deterministic forecast scores zero for vanishing-diagonal kernels.
  EnsembleForecast perfect = EnsembleForecast::from_rows({{1.5, -2.0}, {1.5, -2.0}, {1.5, -2.0}});
  std::vector<double> obs{1.5, -2.0};
  CHECK(empirical_kernel_score(plain(KernelSpec::euclidean_power(2, 1.0)), perfect, obs) ==
        doctest::Approx(0.0).epsilon(1e-14));

  EnsembleForecast dirac = EnsembleForecast::from_rows({{1.5, -2.0}});
  CHECK(empirical_kernel_score(plain(KernelSpec::inverse_multiquadric(2)), dirac, obs) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("empirical energy distance worked examples") {
  TransformedKernel abs1 = plain(KernelSpec::absolute_difference());
  EnsembleForecast zero = EnsembleForecast::from_values({0.0});
  EnsembleForecast one = EnsembleForecast::from_values({1.0});
  CHECK(empirical_energy_distance(abs1, zero, one) == doctest::Approx(1.0).epsilon(1e-14));

  TransformedKernel eucl = plain(KernelSpec::euclidean_power(2, 1.0));
  EnsembleForecast pa = EnsembleForecast::from_rows({{0.0, 0.0}});
  EnsembleForecast pb = EnsembleForecast::from_rows({{3.0, 4.0}});
  CHECK(empirical_energy_distance(eucl, pa, pb) == doctest::Approx(5.0).epsilon(1e-14));

  auto gen = kstest::rng(5);
  EnsembleForecast ens = kstest::random_ensemble(gen, 9, 2);
  CHECK(empirical_energy_distance(eucl, ens, ens) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("empirical energy distance is non-negative for vanishing-diagonal kernels") {
  auto gen = kstest::rng(6);
  for (std::size_t d : {std::size_t{1}, std::size_t{3}}) {
    for (const TransformedKernel& k : sample_kernels(d)) {
      if (!k.base.zero_diagonal()) continue;
      if (k.transform == KernelTransform::VerticallyRescaled) continue;
      for (int rep = 0; rep < 15; ++rep) {
        EnsembleForecast a = kstest::random_ensemble(gen, 6, d);
        EnsembleForecast b = kstest::random_ensemble(gen, 9, d);
        CHECK(empirical_energy_distance(k, a, b) >= -1e-12);
      }
    }
  }
}

TEST_CASE("energy distance to a Dirac measure equals the kernel score") {
  auto gen = kstest::rng(31);
  for (std::size_t d : {std::size_t{1}, std::size_t{3}}) {
    for (const TransformedKernel& k : sample_kernels(d)) {
      if (!k.base.zero_diagonal()) continue;
      if (k.transform == KernelTransform::VerticallyRescaled) continue;  // rho(y, y) != 0
      for (int rep = 0; rep < 10; ++rep) {
        EnsembleForecast ens = kstest::random_ensemble(gen, 7, d);
        std::vector<double> y = kstest::random_vector(gen, d);
        EnsembleForecast dirac(1, d);
        for (std::size_t j = 0; j < d; ++j) dirac.at(0, j) = y[j];
        CHECK(empirical_energy_distance(k, ens, dirac) ==
              doctest::Approx(empirical_kernel_score(k, ens, y)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("collapse chaining coincides with vertical re-scaling for binary weights") {
  auto gen = kstest::rng(41);
  for (std::size_t d : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
    WeightSpec w = WeightSpec::above(std::vector<double>(d, 0.2));
    std::vector<double> x0(d, 0.2);
    std::vector<KernelSpec> bases = {KernelSpec::euclidean_power(d, 1.0),
                                     KernelSpec::variogram(d, 0.5)};
    if (d == 1) bases.push_back(KernelSpec::absolute_difference());
    for (const KernelSpec& base : bases) {
      TransformedKernel tw =
          TransformedKernel::chained(base, ChainingSpec::collapse_outside(w, x0));
      TransformedKernel vr = TransformedKernel::vertically_rescaled(base, w, x0);
      for (int rep = 0; rep < 25; ++rep) {
        EnsembleForecast ens = kstest::random_ensemble(gen, 8, d);
        std::vector<double> y = kstest::random_vector(gen, d);
        double a = empirical_kernel_score(tw, ens, y);
        double b = empirical_kernel_score(vr, ens, y);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("Monte-Carlo propriety of kernel scores on discrete distributions") {
  auto gen = kstest::rng(57);
  for (std::size_t d : {std::size_t{1}, std::size_t{2}}) {
    for (const TransformedKernel& k : sample_kernels(d)) {
      kstest::AtomDistribution p{kstest::random_ensemble(gen, 4, d)};
      kstest::AtomDistribution q{kstest::random_ensemble(gen, 5, d)};
      auto score = [&](const kstest::AtomDistribution& dist, std::span<const double> y) {
        return empirical_kernel_score(k, dist.atoms, y);
      };
      auto outcome = kstest::propriety_mc(q, p, score, 100000, gen);
      CHECK(outcome.mean_diff <= 3.0 * outcome.stderr_ + 1e-12);
    }
  }
}

TEST_CASE("kernel input validation") {
  TransformedKernel eucl = plain(KernelSpec::euclidean_power(2, 1.0));
  std::vector<double> ok{0.0, 1.0}, bad{0.0}, inf{0.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(evaluate_kernel(eucl, ok, bad), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_kernel(eucl, ok, inf), std::invalid_argument);

  CHECK_THROWS_AS(KernelSpec::euclidean_power(2, 2.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::euclidean_power(2, 0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::variogram(2, -1.0).validate(), std::invalid_argument);
  KernelSpec bad_h = KernelSpec::variogram(2, 0.5, {1.0, 2.0, 2.0, 1.0});
  CHECK_THROWS_AS(bad_h.validate(), std::invalid_argument);

  CHECK_THROWS_AS(
      TransformedKernel::centered(KernelSpec::inverse_multiquadric(2), {0.0, 0.0}).validate(),
      std::invalid_argument);

  EnsembleForecast empty;
  std::vector<double> y{1.0, 1.0};
  CHECK_THROWS_AS(empirical_kernel_score(eucl, empty, y), std::invalid_argument);
}
