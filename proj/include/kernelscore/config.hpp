#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "kernelscore/postproc.hpp"
#include "kernelscore/scores.hpp"
#include "kernelscore/simstudy.hpp"

namespace kernelscore {

// Raised by malformed configuration; maps to the usage-error exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReorderConfig {
  CopulaPlan plan;
  std::string correlation_from;  // estimate the matrix from this observation CSV
  std::string template_from;     // ECC template matrix CSV
};

struct RunConfig {
  std::uint64_t seed = 1;
  double level = 0.05;
  int hac_lag = 0;
  std::vector<ScoreRequest> requests;
  ExperimentConfig experiment;
  bool has_experiment = false;
  ReorderConfig reorder;
  bool has_reorder = false;
};

// Flat key/value text with repeatable typed sections; see the README for the
// schema. The KERNELSCORE_SEED environment variable, when set, overrides the
// configured seed.
RunConfig parse_config(const std::string& text, const std::string& name = "<config>");
RunConfig load_config(const std::string& path);

}  // namespace kernelscore
