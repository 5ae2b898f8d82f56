#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kernelscore/ensemble.hpp"
#include "kernelscore/scores.hpp"

namespace kernelscore {

// Competing forecast distributions built as location-dependent combinations
// of a standard Gaussian G and a heavy-tailed Student-t H (4 degrees of
// freedom): F1 matches G where the mixing function is close to one and H
// elsewhere; F2 swaps the roles. The mixing function is a univariate Gaussian
// distribution function evaluated at the coordinate sum.
struct MixtureSpec {
  std::size_t dimension = 1;
  double mix_mean = 0.0;
  double mix_sd = 0.5;
  double student_dof = 4.0;
  // Test hook: forces the mixing function to a constant.
  std::optional<double> fixed_mix;

  double mixing(std::span<const double> z) const;
  void validate() const;
};

enum class MixtureSide { F1, F2 };

// n draws from the requested mixture; deterministic given the seed.
// Univariate draws invert the distribution function by bisection;
// multivariate draws use exact-ratio rejection sampling from the density
// combination with a half/half Gaussian-Student proposal.
EnsembleForecast sample_mixture(const MixtureSpec& spec, MixtureSide side, std::size_t n,
                                std::uint64_t seed);

enum class SimWeightKind { Univariate, Orthant, HalfSpaceSum };

enum class SimVariant {
  Unweighted,
  ThresholdLocalising,     // collapse chaining, centred per weight kind
  ThresholdNonLocalising,  // componentwise max / plane projection (d >= 2 only)
  OutcomeWeighted,
  OutcomeWeightedBrier,
  VerticallyRescaled       // centred at the origin
};

struct ExperimentConfig {
  std::size_t dimension = 1;
  std::size_t n_observations = 100;
  std::size_t ensemble_size = 100;
  std::size_t repetitions = 1000;
  std::vector<double> thresholds;      // empty = default grid for the weight kind
  SimWeightKind weight_kind = SimWeightKind::Univariate;
  std::vector<ScoreFamily> families;   // empty = default set for the dimension
  std::vector<SimVariant> variants;    // empty = all applicable
  double level = 0.05;
  std::uint64_t seed = 1;
  unsigned threads = 0;                // 0 = hardware concurrency
  double undefined_fraction_limit = 0.5;
  bool swap_forecasts = false;         // draws F2 where F1 would be drawn and vice versa

  void apply_defaults();
  void validate() const;
};

struct RejectionCurve {
  std::vector<double> thresholds;
  std::vector<double> rate_f1;            // rejections favouring F1
  std::vector<double> rate_f2;            // rejections favouring F2
  std::vector<std::uint64_t> reps_used;   // repetitions retained per threshold
};

struct ExperimentEntry {
  ScoreFamily family;
  SimVariant variant;
  RejectionCurve curve;
};

// Builds the score request evaluated at one threshold of the experiment;
// exposed so the CLI and tests share the exact construction.
ScoreRequest make_sim_request(ScoreFamily family, SimVariant variant, SimWeightKind kind,
                              double threshold, std::size_t dimension);

std::vector<ExperimentEntry> run_experiment(const ExperimentConfig& cfg);

}  // namespace kernelscore
