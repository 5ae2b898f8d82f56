#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kernelscore/ensemble.hpp"
#include "kernelscore/kernels.hpp"
#include "kernelscore/weights.hpp"

namespace kernelscore {

enum class ScoreFamily { Crps, Energy, Variogram, InverseMultiquadric };

enum class WeightingMode {
  Unweighted,
  ThresholdWeighted,           // kernel inputs deformed by a chaining function
  OutcomeWeighted,             // conditional score scaled by w(y); not a kernel score
  OutcomeWeightedComplemented, // outcome-weighted plus a Brier score on P(w > 0)
  VerticallyRescaled           // kernel output multiplied by w(x) w(x')
};

struct ScoreRequest {
  ScoreFamily family = ScoreFamily::Crps;
  double beta = 1.0;            // energy exponent
  double p = 0.5;               // variogram order
  std::vector<double> h;        // variogram scaling; empty = all ones
  WeightingMode mode = WeightingMode::Unweighted;
  ChainingSpec chaining;        // ThresholdWeighted
  WeightSpec weight;            // OutcomeWeighted / Complemented / VerticallyRescaled
  std::vector<double> center;   // VerticallyRescaled x0 (ignored for the bounded kernel)
  std::string label;

  KernelSpec kernel_for(std::size_t d) const;
  // The transformed kernel driving the score; valid for every mode except the
  // outcome-weighted ones, which do not correspond to a kernel.
  TransformedKernel transformed_kernel(std::size_t d) const;
  void validate(std::size_t d) const;
};

// Scores a single forecast case. Returns nullopt when the score is undefined
// (outcome weighting with no ensemble mass on {w > 0}).
std::optional<double> score_case(const ScoreRequest& req, const EnsembleForecast& ensemble,
                                 std::span<const double> y);

struct ScoreResult {
  std::vector<std::optional<double>> per_case;
  double mean = 0.0;
  double stderr_ = 0.0;         // sample std of defined per-case scores / sqrt(n)
  std::size_t defined_count = 0;
  std::size_t undefined_count = 0;
};

ScoreResult score_dataset(const ScoreRequest& req, std::span<const ForecastCase> cases);

// Precomputes the member-member part of a score for one fixed ensemble so
// repeated evaluation against many observations is cheap. Pairwise sums use
// sorted prefix sums for the absolute-difference kernel and a feature-space
// expansion for the variogram kernel; the remaining kernels fall back to
// direct double loops.
class PreparedScorer {
 public:
  PreparedScorer(const ScoreRequest& req, const EnsembleForecast& ensemble);

  std::optional<double> score(std::span<const double> y) const;
  std::size_t dimension() const { return dimension_; }

 private:
  double cross_weighted_sum(std::span<const double> y,
                            std::span<const double> y_features) const;
  void point_features(std::span<const double> x, std::span<double> out) const;

  ScoreRequest req_;
  KernelSpec kernel_;
  std::size_t dimension_ = 0;
  EnsembleForecast members_;            // chained copies under threshold weighting
  std::vector<double> member_weight_;   // w(x_m); empty means unit weights
  std::vector<double> member_center_;   // rho(x_m, x0) for centred re-scaling
  double self_term_ = 0.0;              // (1/(2 M^2)) double sum for the active kernel
  double wbar_ = 0.0;                   // mean member weight (outcome modes)
  double weight_sum_ = 0.0;             // sum of member weights
  double center_w_sum_ = 0.0;           // sum of rho(x_m, x0) w(x_m)

  // Absolute-difference kernel: members sorted with prefix sums of w, w x.
  std::vector<double> sorted_x_, prefix_w_, prefix_wx_;

  // Variogram kernel: per-member feature rows (h-scaled pairwise increments)
  // plus the weighted moments that pairwise sums reduce to.
  std::size_t n_features_ = 0;
  std::vector<double> features_;        // M x F
  std::vector<double> feature_wsum_;    // sum_m w_m psi_m
  double feature_wsq_ = 0.0;            // sum_m w_m |psi_m|^2
  std::vector<double> center_features_; // psi(x0) for centred re-scaling
};

// Quantile-integral form of the threshold-weighted CRPS. The supplied values
// are treated as an equally likely sample (the usual equidistant-quantile
// representation); levels are validated but only the values enter the
// reconstruction. Midpoint rule with `nodes` integration nodes. Serves as a
// cross-check against the kernel form rather than a production path.
double quantile_twcrps(const std::vector<std::pair<double, double>>& quantiles,
                       const ChainingSpec& v, double y, std::size_t nodes = 10000);

}  // namespace kernelscore
