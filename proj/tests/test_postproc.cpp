#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "kernelscore/postproc.hpp"
#include "support/test_support.hpp"

using namespace kernelscore;

using kstest::synthetic_csgd;

TEST_CASE("csgd distribution censoring and closed forms") {
  // Exponential margin (shape 1): quantile(tau) = -scale * log(1 - tau) - shift.
  CsgdDistribution expo{1.0, 1.0, 0.0};
  CHECK(expo.quantile(0.5) == doctest::Approx(-std::log(0.5)).epsilon(1e-10));

  // Shift chosen so the point mass at zero is exactly 0.6.
  CsgdDistribution censored{1.0, 1.0, -std::log(0.4)};
  CHECK(censored.zero_mass() == doctest::Approx(0.6).epsilon(1e-12));
  std::vector<double> q = csgd_quantiles(censored, 21);
  for (std::size_t i = 0; i < q.size(); ++i) {
    double tau = static_cast<double>(i + 1) / 22.0;
    if (tau <= 0.6)
      CHECK(q[i] == 0.0);
    else
      CHECK(q[i] > 0.0);
  }
  CHECK(std::is_sorted(q.begin(), q.end()));

  // Distribution function is non-decreasing with the censored mass at zero.
  CHECK(censored.cdf(-1.0) == 0.0);
  CHECK(censored.cdf(0.0) == doctest::Approx(censored.zero_mass()).epsilon(1e-14));
  double prev = 0.0;
  for (double y = 0.0; y < 8.0; y += 0.05) {
    double cur = censored.cdf(y);
    CHECK(cur >= prev);
    prev = cur;
  }

  auto gen = kstest::rng(3);
  std::uniform_real_distribution<double> unif(0.1, 3.0);
  for (int rep = 0; rep < 10; ++rep) {
    CsgdDistribution dist{unif(gen), unif(gen), unif(gen)};
    std::vector<double> qs = csgd_quantiles(dist, 15);
    CHECK(std::is_sorted(qs.begin(), qs.end()));
  }
}

TEST_CASE("csgd fit recovers the generating model") {
  CsgdParams truth{0.5, 0.8, 0.4, 0.3, 0.2, 0.0};
  std::vector<CsgdTrainingCase> train = synthetic_csgd(truth, 3000, 101);
  CsgdParams fitted = fit_csgd(train, 7);

  for (double xbar : {0.5, 1.0, 2.0, 3.5}) {
    for (double s : {0.5, 1.0, 1.6}) {
      double mu_true = truth.alpha + truth.beta * xbar;
      double sd_true = truth.gamma + truth.delta * s;
      double mu_fit = fitted.alpha + fitted.beta * xbar;
      double sd_fit = fitted.gamma + fitted.delta * s;
      CHECK(std::abs(mu_fit / mu_true - 1.0) < 0.08);
      CHECK(std::abs(sd_fit / sd_true - 1.0) < 0.12);
    }
  }
}

TEST_CASE("csgd fit matches heavy censoring frequencies") {
  CsgdParams truth{0.2, 0.5, 0.5, 0.4, 1.0, 0.0};
  std::vector<CsgdTrainingCase> train = synthetic_csgd(truth, 3000, 103, 1.0, 1.0);
  double empirical_zero = 0.0;
  for (const auto& c : train)
    if (c.y == 0.0) empirical_zero += 1.0;
  empirical_zero /= static_cast<double>(train.size());
  REQUIRE(empirical_zero > 0.1);  // censored branch genuinely exercised

  CsgdParams fitted = fit_csgd(train, 11);
  double fitted_zero = 0.0;
  for (const auto& c : train) fitted_zero += csgd_predict(fitted, c.xbar, c.s).zero_mass();
  fitted_zero /= static_cast<double>(train.size());
  CHECK(std::abs(fitted_zero - empirical_zero) < 0.02);
}

TEST_CASE("csgd fit keeps the zero mass negligible for positive data") {
  CsgdParams truth{2.0, 1.0, 0.5, 0.3, 0.0, 0.0};
  std::vector<CsgdTrainingCase> train = synthetic_csgd(truth, 2000, 107);
  for (auto& c : train) c.y += 1.0;  // push data well away from zero
  CsgdParams fitted = fit_csgd(train, 13);
  double mass = 0.0;
  for (const auto& c : train) mass += csgd_predict(fitted, c.xbar, c.s).zero_mass();
  mass /= static_cast<double>(train.size());
  CHECK(mass < 0.01);
}

TEST_CASE("csgd fit handles a degenerate spread covariate") {
  CsgdParams truth{1.0, 0.5, 0.6, 0.0, 0.1, 0.0};
  std::vector<CsgdTrainingCase> train = synthetic_csgd(truth, 1500, 109);
  for (auto& c : train) c.s = 0.0;
  CsgdParams fitted = fit_csgd(train, 17);
  CHECK(fitted.delta == 0.0);
  CHECK(std::isfinite(fitted.log_likelihood));
}

TEST_CASE("csgd fit input validation") {
  std::vector<CsgdTrainingCase> tiny(5);
  CHECK_THROWS_AS(fit_csgd(tiny, 1), std::invalid_argument);
  std::vector<CsgdTrainingCase> negative(30, {1.0, 0.5, -1.0});
  CHECK_THROWS_AS(fit_csgd(negative, 1), std::invalid_argument);
}

TEST_CASE("comonotonic and ECC reorderings") {
  std::vector<std::vector<double>> margins = {{1.0, 2.0, 3.0}, {10.0, 20.0, 30.0}};
  CopulaPlan com;
  com.kind = CopulaKind::Comonotonic;
  ReorderedEnsemble zipped = reorder(com, margins, 1);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(zipped.members.at(i, 0) == margins[0][i]);
    CHECK(zipped.members.at(i, 1) == margins[1][i]);
  }

  CopulaPlan ecc;
  ecc.kind = CopulaKind::Ecc;
  ecc.template_ensemble =
      EnsembleForecast::from_rows({{1.0, 10.0}, {2.0, 20.0}, {3.0, 30.0}});
  ReorderedEnsemble self = reorder(ecc, margins, 1);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(self.members.at(i, j) == ecc.template_ensemble.at(i, j));

  // A template with reversed dependence flips the coupling.
  ecc.template_ensemble =
      EnsembleForecast::from_rows({{1.0, 30.0}, {2.0, 20.0}, {3.0, 10.0}});
  ReorderedEnsemble flipped = reorder(ecc, margins, 1);
  CHECK(flipped.members.at(0, 0) == 1.0);
  CHECK(flipped.members.at(0, 1) == 30.0);
}

TEST_CASE("independence reordering preserves the margins") {
  std::vector<std::vector<double>> margins = {{1.0, 2.0, 3.0, 4.0}, {5.0, 6.0, 7.0, 8.0}};
  CopulaPlan ind;
  ind.kind = CopulaKind::Independence;
  ReorderedEnsemble out = reorder(ind, margins, 21);
  for (std::size_t j = 0; j < margins.size(); ++j) {
    std::vector<double> column;
    for (std::size_t i = 0; i < out.members.size(); ++i) column.push_back(out.members.at(i, j));
    std::sort(column.begin(), column.end());
    CHECK(column == margins[j]);
  }
}

TEST_CASE("gaussian grid simulation couples levels into a permutation") {
  std::vector<std::vector<double>> margins = {{1.0, 2.0, 3.0, 4.0, 5.0},
                                              {1.5, 2.5, 3.5, 4.5, 5.5}};
  CopulaPlan plan;
  plan.kind = CopulaKind::GaussianGrid;
  plan.mode = GridMode::Simulate;
  plan.correlation = {1.0, 0.4, 0.4, 1.0};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ReorderedEnsemble out = reorder(plan, margins, seed);
    REQUIRE(out.members.size() == 5);
    for (std::size_t j = 0; j < 2; ++j) {
      std::vector<double> column;
      for (std::size_t i = 0; i < 5; ++i) column.push_back(out.members.at(i, j));
      std::sort(column.begin(), column.end());
      CHECK(column == margins[j]);  // each level used exactly once
    }
  }
}

TEST_CASE("gaussian grid with identity correlation samples permutations uniformly") {
  std::vector<std::vector<double>> margins = {{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}};
  CopulaPlan plan;
  plan.kind = CopulaKind::GaussianGrid;
  plan.mode = GridMode::Simulate;
  plan.correlation = {1.0, 0.0, 0.0, 1.0};

  std::map<std::string, std::uint64_t> frequency;
  const int seeds = 3000;
  for (int seed = 0; seed < seeds; ++seed) {
    ReorderedEnsemble out = reorder(plan, margins, static_cast<std::uint64_t>(seed));
    // Encode the permutation: rank of dim-2 level matched to each dim-1 level.
    std::string key(3, '?');
    for (std::size_t i = 0; i < 3; ++i) {
      int a = static_cast<int>(out.members.at(i, 0)) - 1;
      int b = static_cast<int>(out.members.at(i, 1)) - 1;
      key[static_cast<std::size_t>(a)] = static_cast<char>('0' + b);
    }
    ++frequency[key];
  }
  REQUIRE(frequency.size() == 6);
  std::vector<std::uint64_t> counts;
  for (const auto& [key, count] : frequency) counts.push_back(count);
  CHECK(kstest::chi_square_uniform_pvalue(counts) > 0.01);
}

TEST_CASE("gaussian grid near-unit correlation is nearly comonotonic") {
  std::vector<std::vector<double>> margins = {{1.0, 2.0, 3.0, 4.0, 5.0},
                                              {1.0, 2.0, 3.0, 4.0, 5.0}};
  CopulaPlan plan;
  plan.kind = CopulaKind::GaussianGrid;
  plan.mode = GridMode::Simulate;
  plan.correlation = {1.0, 0.999, 0.999, 1.0};
  std::size_t matches = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    ReorderedEnsemble out = reorder(plan, margins, seed);
    for (std::size_t i = 0; i < out.members.size(); ++i) {
      if (out.members.at(i, 0) == out.members.at(i, 1)) ++matches;
      ++total;
    }
  }
  CHECK(static_cast<double>(matches) / static_cast<double>(total) >= 0.95);
}

TEST_CASE("gaussian grid weight mode returns normalized combination weights") {
  std::vector<std::vector<double>> margins = {{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}};
  CopulaPlan plan;
  plan.kind = CopulaKind::GaussianGrid;
  plan.mode = GridMode::Weight;
  plan.correlation = {1.0, 0.5, 0.5, 1.0};
  ReorderedEnsemble out = reorder(plan, margins, 1);
  REQUIRE(out.members.size() == 9);
  REQUIRE(out.weights.size() == 9);
  double total = 0.0;
  for (double w : out.weights) {
    CHECK(w >= 0.0);
    total += w;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  // Positive dependence favours concordant corner combinations.
  double concordant = out.weights[0] + out.weights[8];
  double discordant = out.weights[2] + out.weights[6];
  CHECK(concordant > discordant);
}

TEST_CASE("gaussian grid rejects oversized grids and bad matrices") {
  std::vector<std::vector<double>> margins(4, std::vector<double>(40));
  for (auto& m : margins)
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<double>(i);
  CopulaPlan plan;
  plan.kind = CopulaKind::GaussianGrid;
  plan.grid_cap = 1000000;
  plan.correlation.assign(16, 0.0);
  for (int i = 0; i < 4; ++i) plan.correlation[i * 4 + i] = 1.0;
  CHECK_THROWS_AS(reorder(plan, margins, 1), std::invalid_argument);  // 40^4 > cap

  std::vector<std::vector<double>> small = {{1.0, 2.0}, {3.0, 4.0}};
  CopulaPlan bad;
  bad.kind = CopulaKind::GaussianGrid;
  bad.correlation = {1.0, 0.5, 0.2, 1.0};  // asymmetric
  CHECK_THROWS_AS(reorder(bad, small, 1), std::invalid_argument);
  bad.correlation = {1.0, 1.1, 1.1, 1.0};  // not positive definite
  CHECK_THROWS_AS(reorder(bad, small, 1), std::invalid_argument);
}

TEST_CASE("rank-based correlation estimation") {
  auto gen = kstest::rng(301);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double rho = 0.6;
  std::vector<std::vector<double>> obs(4000, std::vector<double>(2));
  for (auto& row : obs) {
    double z1 = noise(gen), z2 = noise(gen);
    row[0] = z1;
    row[1] = rho * z1 + std::sqrt(1.0 - rho * rho) * z2;
  }
  std::vector<double> corr = estimate_correlation(obs);
  CHECK(corr[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(corr[3] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(corr[1] == doctest::Approx(rho).epsilon(0.12));
  CHECK(corr[1] == corr[2]);
}
