#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kernelscore/ensemble.hpp"

namespace kernelscore {

enum class Direction { FavorsA, FavorsB, NoDecision };

struct DmTestResult {
  double statistic = 0.0;  // NaN when the differential variance is zero
  double p_value = 1.0;    // two-sided, standard normal reference
  Direction direction = Direction::NoDecision;
  std::size_t n = 0;
};

// Diebold-Mariano test on paired score sequences (lower score = better
// forecast). FavorsA when the statistic is negative and p < level.
// hac_lag > 0 switches to a Newey-West variance with that truncation lag;
// the default treats cases as independent.
DmTestResult dm_test(std::span<const double> scores_a, std::span<const double> scores_b,
                     double level, int hac_lag = 0);

// Same test with undefined cases dropped pairwise first.
DmTestResult dm_test(const std::vector<std::optional<double>>& scores_a,
                     const std::vector<std::optional<double>>& scores_b, double level,
                     int hac_lag = 0);

struct RankHistogram {
  std::vector<std::uint64_t> counts;  // ranks 1..M+1
  std::uint64_t n = 0;
};

// Rank of the observation when pooled with the ensemble members; ties are
// resolved at random with the given seed. Univariate cases only.
RankHistogram rank_histogram(std::span<const ForecastCase> cases, std::uint64_t seed);

// Multivariate rank histogram: each pooled point is pre-ranked by the number
// of pooled points componentwise <= it, and the observation's rank among the
// pre-ranks is tallied, ties resolved at random.
RankHistogram multivariate_rank_histogram(std::span<const ForecastCase> cases,
                                          std::uint64_t seed);

}  // namespace kernelscore
