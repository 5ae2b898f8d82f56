#include "kernelscore/names.hpp"

#include <stdexcept>

namespace kernelscore {

std::string to_string(ScoreFamily family) {
  switch (family) {
    case ScoreFamily::Crps:
      return "crps";
    case ScoreFamily::Energy:
      return "energy";
    case ScoreFamily::Variogram:
      return "variogram";
    case ScoreFamily::InverseMultiquadric:
      return "ims";
  }
  return "?";
}

std::string to_string(WeightingMode mode) {
  switch (mode) {
    case WeightingMode::Unweighted:
      return "none";
    case WeightingMode::ThresholdWeighted:
      return "threshold_weighted";
    case WeightingMode::OutcomeWeighted:
      return "outcome_weighted";
    case WeightingMode::OutcomeWeightedComplemented:
      return "outcome_weighted_brier";
    case WeightingMode::VerticallyRescaled:
      return "vertically_rescaled";
  }
  return "?";
}

std::string to_string(SimVariant variant) {
  switch (variant) {
    case SimVariant::Unweighted:
      return "none";
    case SimVariant::ThresholdLocalising:
      return "tw_loc";
    case SimVariant::ThresholdNonLocalising:
      return "tw_non";
    case SimVariant::OutcomeWeighted:
      return "ow";
    case SimVariant::OutcomeWeightedBrier:
      return "ow_brier";
    case SimVariant::VerticallyRescaled:
      return "vr";
  }
  return "?";
}

std::string to_string(SimWeightKind kind) {
  switch (kind) {
    case SimWeightKind::Univariate:
      return "univariate";
    case SimWeightKind::Orthant:
      return "orthant";
    case SimWeightKind::HalfSpaceSum:
      return "half_space";
  }
  return "?";
}

std::string to_string(Direction direction) {
  switch (direction) {
    case Direction::FavorsA:
      return "favors_a";
    case Direction::FavorsB:
      return "favors_b";
    case Direction::NoDecision:
      return "no_decision";
  }
  return "?";
}

ScoreFamily parse_score_family(const std::string& name) {
  if (name == "crps") return ScoreFamily::Crps;
  if (name == "energy" || name == "es") return ScoreFamily::Energy;
  if (name == "variogram" || name == "vs") return ScoreFamily::Variogram;
  if (name == "ims") return ScoreFamily::InverseMultiquadric;
  throw std::invalid_argument("unknown score family: " + name);
}

WeightingMode parse_weighting_mode(const std::string& name) {
  if (name == "none") return WeightingMode::Unweighted;
  if (name == "threshold_weighted" || name == "tw") return WeightingMode::ThresholdWeighted;
  if (name == "outcome_weighted" || name == "ow") return WeightingMode::OutcomeWeighted;
  if (name == "outcome_weighted_brier" || name == "ow_brier")
    return WeightingMode::OutcomeWeightedComplemented;
  if (name == "vertically_rescaled" || name == "vr") return WeightingMode::VerticallyRescaled;
  throw std::invalid_argument("unknown weighting mode: " + name);
}

SimVariant parse_sim_variant(const std::string& name) {
  if (name == "none") return SimVariant::Unweighted;
  if (name == "tw_loc") return SimVariant::ThresholdLocalising;
  if (name == "tw_non") return SimVariant::ThresholdNonLocalising;
  if (name == "ow") return SimVariant::OutcomeWeighted;
  if (name == "ow_brier") return SimVariant::OutcomeWeightedBrier;
  if (name == "vr") return SimVariant::VerticallyRescaled;
  throw std::invalid_argument("unknown simulation variant: " + name);
}

SimWeightKind parse_sim_weight_kind(const std::string& name) {
  if (name == "univariate") return SimWeightKind::Univariate;
  if (name == "orthant") return SimWeightKind::Orthant;
  if (name == "half_space") return SimWeightKind::HalfSpaceSum;
  throw std::invalid_argument("unknown simulation weight kind: " + name);
}

}  // namespace kernelscore
