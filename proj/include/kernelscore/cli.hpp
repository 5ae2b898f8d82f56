#pragma once

#include <string>

#include "kernelscore/config.hpp"
#include "kernelscore/dataset.hpp"

namespace kernelscore {

// Command implementations shared by the binary and the tests. Each writes
// its outputs under the given paths and throws ConfigError / DataError on
// bad inputs.

// Per-case scores (score,mode,case_id,value) and aggregates
// (score,mode,mean,stderr,n_undefined).
void cmd_score(const RunConfig& cfg, const EnsembleDataset& dataset,
               const std::string& per_case_path, const std::string& aggregate_path);

// Paired Diebold-Mariano comparison of two datasets over the configured
// score requests (score,mode,statistic,p_value,direction,n).
void cmd_compare(const RunConfig& cfg, const EnsembleDataset& forecast_a,
                 const EnsembleDataset& forecast_b, const std::string& out_path);

// Rank histogram as CSV (rank,count) and JSON.
void cmd_rankhist(const EnsembleDataset& dataset, bool multivariate, std::uint64_t seed,
                  const std::string& csv_path, const std::string& json_path);

// Rejection-rate table (threshold,score,mode,rate_F1,rate_F2).
void cmd_simulate(const RunConfig& cfg, const std::string& out_path);

// Censored shifted Gamma fit from a training CSV (case_id,xbar,s,y); writes
// the fitted coefficients as JSON.
void cmd_fit_csgd(const std::string& train_path, std::uint64_t seed,
                  const std::string& out_path);

// Couples marginal samples into an ensemble CSV according to the configured
// copula plan.
void cmd_reorder(const RunConfig& cfg, const std::string& margins_path, std::uint64_t seed,
                 const std::string& out_path);

}  // namespace kernelscore
