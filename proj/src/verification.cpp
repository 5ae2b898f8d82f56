#include "kernelscore/verification.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "kernelscore/math.hpp"
#include "kernelscore/rng.hpp"

namespace kernelscore {

DmTestResult dm_test(std::span<const double> scores_a, std::span<const double> scores_b,
                     double level, int hac_lag) {
  if (scores_a.size() != scores_b.size())
    throw std::invalid_argument("dm_test: score sequences must be paired");
  const std::size_t n = scores_a.size();
  if (n < 2) throw std::invalid_argument("dm_test: need at least two cases");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("dm_test: invalid level");

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = scores_a[i] - scores_b[i];

  CompensatedSum sum;
  for (double v : d) sum.add(v);
  const double nn = static_cast<double>(n);
  const double mean = sum.value() / nn;

  auto autocov = [&](std::size_t lag) {
    CompensatedSum s;
    for (std::size_t i = lag; i < n; ++i) s.add((d[i] - mean) * (d[i - lag] - mean));
    return s.value() / nn;
  };

  double variance;
  if (hac_lag > 0) {
    variance = autocov(0);
    for (int k = 1; k <= hac_lag && static_cast<std::size_t>(k) < n; ++k)
      variance += 2.0 * (1.0 - static_cast<double>(k) / (hac_lag + 1.0)) * autocov(k);
    variance = std::max(variance, 0.0);
  } else {
    CompensatedSum s;
    for (double v : d) s.add((v - mean) * (v - mean));
    variance = s.value() / (nn - 1.0);
  }

  DmTestResult result;
  result.n = n;
  if (!(variance > 0.0)) {
    result.statistic = std::numeric_limits<double>::quiet_NaN();
    result.p_value = 1.0;
    result.direction = Direction::NoDecision;
    return result;
  }

  result.statistic = mean / std::sqrt(variance / nn);
  result.p_value = 2.0 * normal_cdf(-std::abs(result.statistic));
  if (result.p_value < level)
    result.direction = result.statistic < 0.0 ? Direction::FavorsA : Direction::FavorsB;
  else
    result.direction = Direction::NoDecision;
  return result;
}

DmTestResult dm_test(const std::vector<std::optional<double>>& scores_a,
                     const std::vector<std::optional<double>>& scores_b, double level,
                     int hac_lag) {
  if (scores_a.size() != scores_b.size())
    throw std::invalid_argument("dm_test: score sequences must be paired");
  std::vector<double> a, b;
  a.reserve(scores_a.size());
  b.reserve(scores_b.size());
  for (std::size_t i = 0; i < scores_a.size(); ++i) {
    if (scores_a[i] && scores_b[i]) {
      a.push_back(*scores_a[i]);
      b.push_back(*scores_b[i]);
    }
  }
  return dm_test(std::span<const double>(a), std::span<const double>(b), level, hac_lag);
}

RankHistogram rank_histogram(std::span<const ForecastCase> cases, std::uint64_t seed) {
  RankHistogram hist;
  if (cases.empty()) return hist;
  const std::size_t m = cases.front().ensemble.size();
  hist.counts.assign(m + 1, 0);
  auto rng = make_engine(derive_seed(seed, 0));

  for (const ForecastCase& c : cases) {
    if (c.ensemble.dimension() != 1 || c.observation.size() != 1)
      throw std::invalid_argument("rank_histogram: univariate cases required");
    if (c.ensemble.size() != m)
      throw std::invalid_argument("rank_histogram: ensemble size must be constant");
    const double y = c.observation[0];
    std::size_t below = 0, ties = 0;
    for (std::size_t i = 0; i < m; ++i) {
      double x = c.ensemble.at(i, 0);
      if (x < y)
        ++below;
      else if (x == y)
        ++ties;
    }
    std::size_t rank = below + 1;
    if (ties > 0) rank += std::uniform_int_distribution<std::size_t>(0, ties)(rng);
    ++hist.counts[rank - 1];
    ++hist.n;
  }
  return hist;
}

namespace {

// Number of pooled points componentwise <= each pooled point.
std::vector<std::size_t> pre_ranks(const EnsembleForecast& ensemble,
                                   std::span<const double> y) {
  const std::size_t m = ensemble.size();
  const std::size_t d = ensemble.dimension();
  const std::size_t total = m + 1;
  auto point = [&](std::size_t idx) {
    return idx < m ? ensemble.member(idx) : y;
  };
  std::vector<std::size_t> ranks(total, 0);
  for (std::size_t i = 0; i < total; ++i) {
    auto xi = point(i);
    for (std::size_t j = 0; j < total; ++j) {
      auto xj = point(j);
      bool leq = true;
      for (std::size_t k = 0; k < d; ++k) {
        if (xj[k] > xi[k]) {
          leq = false;
          break;
        }
      }
      if (leq) ++ranks[i];
    }
  }
  return ranks;
}

}  // namespace

RankHistogram multivariate_rank_histogram(std::span<const ForecastCase> cases,
                                          std::uint64_t seed) {
  RankHistogram hist;
  if (cases.empty()) return hist;
  const std::size_t m = cases.front().ensemble.size();
  hist.counts.assign(m + 1, 0);
  auto rng = make_engine(derive_seed(seed, 1));

  for (const ForecastCase& c : cases) {
    if (c.ensemble.size() != m)
      throw std::invalid_argument("multivariate_rank_histogram: ensemble size must be constant");
    if (c.observation.size() != c.ensemble.dimension())
      throw std::invalid_argument("multivariate_rank_histogram: dimension mismatch");
    std::vector<std::size_t> ranks = pre_ranks(c.ensemble, c.observation);
    const std::size_t obs_rank = ranks.back();
    std::size_t below = 0, ties = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (ranks[i] < obs_rank)
        ++below;
      else if (ranks[i] == obs_rank)
        ++ties;
    }
    std::size_t rank = below + 1;
    if (ties > 0) rank += std::uniform_int_distribution<std::size_t>(0, ties)(rng);
    ++hist.counts[rank - 1];
    ++hist.n;
  }
  return hist;
}

}  // namespace kernelscore
