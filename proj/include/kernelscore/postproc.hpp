#pragma once

#include <cstdint>
#include <vector>

#include "kernelscore/ensemble.hpp"

namespace kernelscore {

// Regression coefficients of the censored shifted Gamma model. The predicted
// mean is alpha + beta * xbar and the predicted standard deviation
// gamma + delta * s; all coefficients are constrained non-negative through a
// square-root link during fitting.
struct CsgdParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double shift = 0.0;           // xi
  double log_likelihood = 0.0;  // at the fitted optimum
};

// Gamma distribution with the given shape/scale, shifted left by `shift` and
// censored below at zero, so P(Y = 0) = F(shift; shape, scale).
struct CsgdDistribution {
  double shape = 1.0;
  double scale = 1.0;
  double shift = 0.0;

  double cdf(double y) const;
  double quantile(double tau) const;
  double zero_mass() const { return cdf(0.0); }
};

struct CsgdTrainingCase {
  double xbar = 0.0;  // ensemble mean
  double s = 0.0;     // ensemble standard deviation
  double y = 0.0;     // observed accumulation, >= 0
};

// Maximum likelihood fit via derivative-free simplex search with random
// restarts; the seed controls the restart draws only.
CsgdParams fit_csgd(std::span<const CsgdTrainingCase> train, std::uint64_t seed = 1);

// Predictive distribution implied by fitted coefficients for one case.
CsgdDistribution csgd_predict(const CsgdParams& params, double xbar, double s);

// Equidistant-quantile sample at levels i / (M + 1); non-decreasing.
std::vector<double> csgd_quantiles(const CsgdDistribution& dist, std::size_t members);

enum class CopulaKind { Independence, Comonotonic, Ecc, GaussianGrid };
enum class GridMode { Simulate, Weight };

struct CopulaPlan {
  CopulaKind kind = CopulaKind::Independence;
  EnsembleForecast template_ensemble;   // Ecc
  std::vector<double> correlation;      // GaussianGrid, row-major d x d
  GridMode mode = GridMode::Simulate;   // GaussianGrid
  std::size_t grid_cap = 1'000'000;     // largest admissible M^d grid
};

struct ReorderedEnsemble {
  EnsembleForecast members;
  std::vector<double> weights;  // Weight mode only; sums to one
};

// Couples d marginal samples (each M ascending values) into a multivariate
// ensemble according to the copula plan. Simulate-type outputs use every
// marginal value exactly once per dimension.
ReorderedEnsemble reorder(const CopulaPlan& plan,
                          const std::vector<std::vector<double>>& margins, std::uint64_t seed);

// Rank-based (Spearman) correlation matrix of observation vectors, mapped to
// the Gaussian-copula scale and nudged onto the positive definite cone if
// required.
std::vector<double> estimate_correlation(const std::vector<std::vector<double>>& observations);

}  // namespace kernelscore
