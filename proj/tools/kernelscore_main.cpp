#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "kernelscore/cli.hpp"
#include "kernelscore/config.hpp"
#include "kernelscore/dataset.hpp"

namespace {

using kernelscore::EnsembleDataset;
using kernelscore::RunConfig;

EnsembleDataset load_dataset(const std::string& format, const std::string& input,
                             const std::string& forecasts, const std::string& observations) {
  if (format == "jsonl") {
    if (input.empty()) throw kernelscore::ConfigError("jsonl format requires --input");
    return kernelscore::ingest_jsonl(input);
  }
  if (format == "csv") {
    if (forecasts.empty() || observations.empty())
      throw kernelscore::ConfigError("csv format requires --forecasts and --observations");
    return kernelscore::ingest_csv(forecasts, observations);
  }
  throw kernelscore::ConfigError("unknown format: " + format);
}

std::uint64_t effective_seed(const RunConfig& cfg, std::int64_t flag_seed) {
  return flag_seed >= 0 ? static_cast<std::uint64_t>(flag_seed) : cfg.seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted kernel scores for ensemble forecast verification"};
  app.require_subcommand(1);

  std::string config_path, format = "csv", out_dir = ".";
  std::int64_t seed_flag = -1;
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--format", format, "dataset format: csv or jsonl");
  app.add_option("--seed", seed_flag, "seed override");
  app.add_option("--out", out_dir, "output directory");

  std::string forecasts, observations, input;
  std::string forecasts_b, observations_b, input_b;
  bool multivariate = false;
  std::string train_path, margins_path;

  CLI::App* score = app.add_subcommand("score", "score a dataset per configured request");
  score->add_option("--forecasts", forecasts, "forecast CSV (long format)");
  score->add_option("--observations", observations, "observation CSV");
  score->add_option("--input", input, "JSONL dataset");

  CLI::App* compare = app.add_subcommand("compare", "Diebold-Mariano comparison of two datasets");
  compare->add_option("--forecasts", forecasts, "forecast CSV of model A");
  compare->add_option("--observations", observations, "observation CSV");
  compare->add_option("--input", input, "JSONL dataset of model A");
  compare->add_option("--forecasts-b", forecasts_b, "forecast CSV of model B");
  compare->add_option("--observations-b", observations_b, "observation CSV of model B");
  compare->add_option("--input-b", input_b, "JSONL dataset of model B");

  CLI::App* rankhist = app.add_subcommand("rankhist", "rank histogram of a dataset");
  rankhist->add_option("--forecasts", forecasts, "forecast CSV");
  rankhist->add_option("--observations", observations, "observation CSV");
  rankhist->add_option("--input", input, "JSONL dataset");
  rankhist->add_flag("--multivariate", multivariate, "multivariate ranking");

  app.add_subcommand("simulate", "run the configured rejection-rate experiment");

  CLI::App* fit = app.add_subcommand("fit-csgd", "fit a censored shifted Gamma model");
  fit->add_option("--train", train_path, "training CSV (case_id,xbar,s,y)")->required();

  CLI::App* reorder = app.add_subcommand("reorder", "couple margins with the configured copula");
  reorder->add_option("--margins", margins_path, "margins CSV (dim_1..dim_d)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = kernelscore::load_config(config_path);
    std::uint64_t seed = effective_seed(cfg, seed_flag);

    if (score->parsed()) {
      EnsembleDataset dataset = load_dataset(format, input, forecasts, observations);
      kernelscore::cmd_score(cfg, dataset, out_dir + "/per_case.csv", out_dir + "/aggregate.csv");
    } else if (compare->parsed()) {
      EnsembleDataset a = load_dataset(format, input, forecasts, observations);
      EnsembleDataset b = load_dataset(format, input_b, forecasts_b, observations_b);
      kernelscore::cmd_compare(cfg, a, b, out_dir + "/compare.csv");
    } else if (rankhist->parsed()) {
      EnsembleDataset dataset = load_dataset(format, input, forecasts, observations);
      kernelscore::cmd_rankhist(dataset, multivariate, seed, out_dir + "/rankhist.csv",
                                out_dir + "/rankhist.json");
    } else if (app.get_subcommand("simulate")->parsed()) {
      if (seed_flag >= 0) cfg.experiment.seed = seed;
      kernelscore::cmd_simulate(cfg, out_dir + "/rejection_rates.csv");
    } else if (fit->parsed()) {
      kernelscore::cmd_fit_csgd(train_path, seed, out_dir + "/csgd_params.json");
    } else if (reorder->parsed()) {
      kernelscore::cmd_reorder(cfg, margins_path, seed, out_dir + "/reordered.csv");
    }
  } catch (const kernelscore::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
