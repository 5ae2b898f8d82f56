#include "kernelscore/cli.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "kernelscore/names.hpp"
#include "kernelscore/verification.hpp"

namespace kernelscore {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  return out;
}

std::string request_name(const ScoreRequest& req) {
  return req.label.empty() ? to_string(req.family) : req.label;
}

void check_requests(const RunConfig& cfg) {
  if (cfg.requests.empty()) throw ConfigError("config defines no [score] sections");
}

}  // namespace

void cmd_score(const RunConfig& cfg, const EnsembleDataset& dataset,
               const std::string& per_case_path, const std::string& aggregate_path) {
  check_requests(cfg);
  std::ofstream per_case = open_output(per_case_path);
  std::ofstream aggregate = open_output(aggregate_path);
  per_case << "score,mode,case_id,value\n";
  aggregate << "score,mode,mean,stderr,n_undefined\n";

  for (const ScoreRequest& req : cfg.requests) {
    req.validate(dataset.dimension);
    ScoreResult result = score_dataset(req, dataset.cases);
    for (std::size_t i = 0; i < dataset.cases.size(); ++i) {
      per_case << request_name(req) << "," << to_string(req.mode) << ","
               << dataset.cases[i].id << ",";
      if (result.per_case[i])
        per_case << format_double(*result.per_case[i]);
      else
        per_case << "undefined";
      per_case << "\n";
    }
    aggregate << request_name(req) << "," << to_string(req.mode) << ","
              << format_double(result.mean) << "," << format_double(result.stderr_) << ","
              << result.undefined_count << "\n";
  }
}

void cmd_compare(const RunConfig& cfg, const EnsembleDataset& forecast_a,
                 const EnsembleDataset& forecast_b, const std::string& out_path) {
  check_requests(cfg);
  if (forecast_a.dimension != forecast_b.dimension)
    throw DataError("compare: datasets have different dimensions");

  // Pair cases by id; order follows dataset A.
  std::vector<std::pair<const ForecastCase*, const ForecastCase*>> pairs;
  std::vector<std::string> unmatched;
  for (const ForecastCase& ca : forecast_a.cases) {
    const ForecastCase* match = nullptr;
    for (const ForecastCase& cb : forecast_b.cases) {
      if (cb.id == ca.id) {
        match = &cb;
        break;
      }
    }
    if (match == nullptr)
      unmatched.push_back(ca.id);
    else
      pairs.emplace_back(&ca, match);
  }
  for (const ForecastCase& cb : forecast_b.cases) {
    bool found = false;
    for (const ForecastCase& ca : forecast_a.cases)
      if (ca.id == cb.id) {
        found = true;
        break;
      }
    if (!found) unmatched.push_back(cb.id);
  }
  if (!unmatched.empty()) {
    std::string msg = "compare: unmatched case ids:";
    for (const std::string& id : unmatched) msg += " " + id;
    throw DataError(msg);
  }

  std::ofstream out = open_output(out_path);
  out << "score,mode,statistic,p_value,direction,n\n";
  for (const ScoreRequest& req : cfg.requests) {
    req.validate(forecast_a.dimension);
    std::vector<std::optional<double>> sa, sb;
    sa.reserve(pairs.size());
    sb.reserve(pairs.size());
    for (const auto& [ca, cb] : pairs) {
      sa.push_back(score_case(req, ca->ensemble, ca->observation));
      sb.push_back(score_case(req, cb->ensemble, cb->observation));
    }
    DmTestResult dm = dm_test(sa, sb, cfg.level, cfg.hac_lag);
    out << request_name(req) << "," << to_string(req.mode) << ","
        << format_double(dm.statistic) << "," << format_double(dm.p_value) << ","
        << to_string(dm.direction) << "," << dm.n << "\n";
  }
}

void cmd_rankhist(const EnsembleDataset& dataset, bool multivariate, std::uint64_t seed,
                  const std::string& csv_path, const std::string& json_path) {
  if (!multivariate && dataset.dimension != 1)
    throw DataError("rankhist: univariate histogram needs a one-dimensional dataset");
  RankHistogram hist = multivariate
                           ? multivariate_rank_histogram(dataset.cases, seed)
                           : rank_histogram(dataset.cases, seed);
  std::ofstream csv = open_output(csv_path);
  csv << "rank,count\n";
  for (std::size_t r = 0; r < hist.counts.size(); ++r)
    csv << (r + 1) << "," << hist.counts[r] << "\n";

  nlohmann::json j;
  j["n"] = hist.n;
  j["counts"] = hist.counts;
  std::ofstream json = open_output(json_path);
  json << j.dump(2) << "\n";
}

void cmd_simulate(const RunConfig& cfg, const std::string& out_path) {
  if (!cfg.has_experiment) throw ConfigError("config defines no [simulate] section");
  std::vector<ExperimentEntry> entries = run_experiment(cfg.experiment);
  std::ofstream out = open_output(out_path);
  out << "threshold,score,mode,rate_F1,rate_F2\n";
  for (const ExperimentEntry& e : entries) {
    for (std::size_t t = 0; t < e.curve.thresholds.size(); ++t) {
      out << format_double(e.curve.thresholds[t]) << "," << to_string(e.family) << ","
          << to_string(e.variant) << "," << format_double(e.curve.rate_f1[t]) << ","
          << format_double(e.curve.rate_f2[t]) << "\n";
    }
  }
}

void cmd_fit_csgd(const std::string& train_path, std::uint64_t seed,
                  const std::string& out_path) {
  std::ifstream in(train_path);
  if (!in) throw DataError("cannot open file: " + train_path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(train_path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "case_id,xbar,s,y")
    throw DataError(train_path + ": expected header case_id,xbar,s,y");

  std::vector<CsgdTrainingCase> train;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::string where = train_path + ":" + std::to_string(line_no);
    std::stringstream ss(line);
    std::string id, xbar, s, y;
    if (!std::getline(ss, id, ',') || !std::getline(ss, xbar, ',') ||
        !std::getline(ss, s, ',') || !std::getline(ss, y))
      throw DataError(where + ": expected four columns");
    try {
      train.push_back({std::stod(xbar), std::stod(s), std::stod(y)});
    } catch (const std::exception&) {
      throw DataError(where + ": cannot parse numbers");
    }
  }
  CsgdParams params = fit_csgd(train, seed);

  nlohmann::json j;
  j["alpha"] = params.alpha;
  j["beta"] = params.beta;
  j["gamma"] = params.gamma;
  j["delta"] = params.delta;
  j["shift"] = params.shift;
  j["log_likelihood"] = params.log_likelihood;
  j["n_train"] = train.size();
  std::ofstream out = open_output(out_path);
  out << j.dump(2) << "\n";
}

void cmd_reorder(const RunConfig& cfg, const std::string& margins_path, std::uint64_t seed,
                 const std::string& out_path) {
  if (!cfg.has_reorder) throw ConfigError("config defines no [reorder] section");
  std::vector<std::vector<double>> rows = read_matrix_csv(margins_path);
  const std::size_t d = rows.front().size();
  std::vector<std::vector<double>> margins(d, std::vector<double>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) margins[j][i] = rows[i][j];
  for (auto& margin : margins) std::sort(margin.begin(), margin.end());

  CopulaPlan plan = cfg.reorder.plan;
  if (plan.kind == CopulaKind::Ecc) {
    std::vector<std::vector<double>> tpl = read_matrix_csv(cfg.reorder.template_from);
    plan.template_ensemble = EnsembleForecast::from_rows(tpl);
  }
  if (plan.kind == CopulaKind::GaussianGrid && plan.correlation.empty())
    plan.correlation = estimate_correlation(read_matrix_csv(cfg.reorder.correlation_from));

  ReorderedEnsemble result = reorder(plan, margins, seed);

  std::ofstream out = open_output(out_path);
  out << "case_id,member";
  for (std::size_t k = 1; k <= d; ++k) out << ",dim_" << k;
  if (!result.weights.empty()) out << ",weight";
  out << "\n";
  for (std::size_t m = 0; m < result.members.size(); ++m) {
    out << "reordered," << (m + 1);
    for (std::size_t k = 0; k < d; ++k) out << "," << format_double(result.members.at(m, k));
    if (!result.weights.empty()) out << "," << format_double(result.weights[m]);
    out << "\n";
  }
}

}  // namespace kernelscore
