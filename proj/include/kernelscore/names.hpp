#pragma once

#include <string>

#include "kernelscore/scores.hpp"
#include "kernelscore/simstudy.hpp"
#include "kernelscore/verification.hpp"

namespace kernelscore {

std::string to_string(ScoreFamily family);
std::string to_string(WeightingMode mode);
std::string to_string(SimVariant variant);
std::string to_string(SimWeightKind kind);
std::string to_string(Direction direction);

ScoreFamily parse_score_family(const std::string& name);
WeightingMode parse_weighting_mode(const std::string& name);
SimVariant parse_sim_variant(const std::string& name);
SimWeightKind parse_sim_weight_kind(const std::string& name);

}  // namespace kernelscore
