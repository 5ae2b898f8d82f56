#include "kernelscore/config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "kernelscore/names.hpp"

namespace kernelscore {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

struct Section {
  std::string name;
  std::size_t line = 0;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> consumed;

  bool has(const std::string& key) const { return values.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback = "") {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    consumed[key] = true;
    return it->second;
  }

  std::string require(const std::string& key, const std::string& where) {
    auto it = values.find(key);
    if (it == values.end())
      throw ConfigError(where + ": [" + name + "] requires key '" + key + "'");
    consumed[key] = true;
    return it->second;
  }
};

double to_number(const std::string& v, const std::string& where) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(where + ": cannot parse number '" + v + "'");
  }
}

std::vector<double> to_list(const std::string& v, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_number(trim(item), where));
  if (out.empty()) throw ConfigError(where + ": empty list");
  return out;
}

std::vector<std::string> to_names(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

WeightSpec weight_from_section(Section& s, const std::string& where) {
  std::string kind = s.get("weight", "constant");
  if (kind == "constant") return WeightSpec::constant();
  if (kind == "above_threshold") return WeightSpec::above(to_list(s.require("t", where), where));
  if (kind == "below_threshold") return WeightSpec::below(to_list(s.require("t", where), where));
  if (kind == "interval")
    return WeightSpec::interval(to_number(s.require("lower", where), where),
                                to_number(s.require("upper", where), where));
  if (kind == "half_space")
    return WeightSpec::half_space(to_list(s.require("coefficients", where), where),
                                  to_number(s.require("t", where), where));
  if (kind == "gaussian_cdf")
    return WeightSpec::gaussian_cdf(to_list(s.require("mu", where), where),
                                    to_list(s.require("sigma", where), where));
  throw ConfigError(where + ": unknown weight kind '" + kind + "'");
}

ChainingSpec chaining_from_section(Section& s, const std::string& where) {
  std::string kind = s.get("chaining", "identity");
  if (kind == "identity") return ChainingSpec::identity();
  if (kind == "from_weight") return ChainingSpec::from_weight(weight_from_section(s, where));
  if (kind == "collapse")
    return ChainingSpec::collapse_outside(weight_from_section(s, where),
                                          to_list(s.require("x0", where), where));
  if (kind == "componentwise_max")
    return ChainingSpec::componentwise_max(to_number(s.require("t", where), where));
  if (kind == "plane_projection")
    return ChainingSpec::plane_projection(to_number(s.require("t", where), where));
  if (kind == "gaussian_integrated")
    return ChainingSpec::gaussian_integrated(to_list(s.require("mu", where), where),
                                             to_list(s.require("sigma", where), where));
  throw ConfigError(where + ": unknown chaining kind '" + kind + "'");
}

ScoreRequest score_from_section(Section& s, const std::string& where) {
  ScoreRequest req;
  req.family = parse_score_family(s.require("family", where));
  req.label = s.get("label");
  if (s.has("beta")) req.beta = to_number(s.get("beta"), where);
  if (s.has("p")) req.p = to_number(s.get("p"), where);
  if (s.has("h")) req.h = to_list(s.get("h"), where);
  req.mode = parse_weighting_mode(s.get("weighting", "none"));
  switch (req.mode) {
    case WeightingMode::Unweighted:
      break;
    case WeightingMode::ThresholdWeighted:
      req.chaining = chaining_from_section(s, where);
      break;
    case WeightingMode::OutcomeWeighted:
    case WeightingMode::OutcomeWeightedComplemented:
      req.weight = weight_from_section(s, where);
      break;
    case WeightingMode::VerticallyRescaled:
      req.weight = weight_from_section(s, where);
      if (s.has("x0")) req.center = to_list(s.get("x0"), where);
      break;
  }
  return req;
}

ExperimentConfig experiment_from_section(Section& s, const std::string& where,
                                         std::uint64_t default_seed, double default_level) {
  ExperimentConfig cfg;
  cfg.seed = default_seed;
  cfg.level = default_level;
  if (s.has("dimension")) cfg.dimension = static_cast<std::size_t>(to_number(s.get("dimension"), where));
  if (s.has("n_obs")) cfg.n_observations = static_cast<std::size_t>(to_number(s.get("n_obs"), where));
  if (s.has("members")) cfg.ensemble_size = static_cast<std::size_t>(to_number(s.get("members"), where));
  if (s.has("repetitions"))
    cfg.repetitions = static_cast<std::size_t>(to_number(s.get("repetitions"), where));
  if (s.has("thresholds")) cfg.thresholds = to_list(s.get("thresholds"), where);
  if (s.has("weight_kind")) cfg.weight_kind = parse_sim_weight_kind(s.get("weight_kind"));
  if (s.has("families"))
    for (const std::string& n : to_names(s.get("families")))
      cfg.families.push_back(parse_score_family(n));
  if (s.has("variants"))
    for (const std::string& n : to_names(s.get("variants")))
      cfg.variants.push_back(parse_sim_variant(n));
  if (s.has("level")) cfg.level = to_number(s.get("level"), where);
  if (s.has("seed")) cfg.seed = static_cast<std::uint64_t>(to_number(s.get("seed"), where));
  if (s.has("threads")) cfg.threads = static_cast<unsigned>(to_number(s.get("threads"), where));
  return cfg;
}

ReorderConfig reorder_from_section(Section& s, const std::string& where) {
  ReorderConfig cfg;
  std::string kind = s.require("copula", where);
  if (kind == "independence")
    cfg.plan.kind = CopulaKind::Independence;
  else if (kind == "comonotonic")
    cfg.plan.kind = CopulaKind::Comonotonic;
  else if (kind == "ecc")
    cfg.plan.kind = CopulaKind::Ecc;
  else if (kind == "gaussian_grid")
    cfg.plan.kind = CopulaKind::GaussianGrid;
  else
    throw ConfigError(where + ": unknown copula '" + kind + "'");

  if (cfg.plan.kind == CopulaKind::GaussianGrid) {
    std::string mode = s.get("mode", "simulate");
    if (mode == "simulate")
      cfg.plan.mode = GridMode::Simulate;
    else if (mode == "weight")
      cfg.plan.mode = GridMode::Weight;
    else
      throw ConfigError(where + ": unknown grid mode '" + mode + "'");
    if (s.has("correlation"))
      cfg.plan.correlation = to_list(s.get("correlation"), where);
    else
      cfg.correlation_from = s.require("correlation_from", where);
    if (s.has("grid_cap"))
      cfg.plan.grid_cap = static_cast<std::size_t>(to_number(s.get("grid_cap"), where));
  }
  if (cfg.plan.kind == CopulaKind::Ecc) cfg.template_from = s.require("template", where);
  return cfg;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& name) {
  std::vector<Section> sections;
  sections.push_back({"", 0, {}, {}});

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(name + ":" + std::to_string(line_no) + ": bad section header");
      sections.push_back({trim(t.substr(1, t.size() - 2)), line_no, {}, {}});
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(name + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError(name + ":" + std::to_string(line_no) + ": empty key");
    Section& s = sections.back();
    if (!s.values.emplace(key, value).second)
      throw ConfigError(name + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
  }

  RunConfig cfg;
  Section& top = sections.front();
  std::string where = name;
  if (top.has("seed")) cfg.seed = static_cast<std::uint64_t>(to_number(top.get("seed"), where));
  if (top.has("level")) cfg.level = to_number(top.get("level"), where);
  if (top.has("hac_lag")) cfg.hac_lag = static_cast<int>(to_number(top.get("hac_lag"), where));
  for (const auto& [key, value] : top.values)
    if (!top.consumed[key]) throw ConfigError(where + ": unknown top-level key '" + key + "'");

  for (std::size_t i = 1; i < sections.size(); ++i) {
    Section& s = sections[i];
    std::string sw = name + ":" + std::to_string(s.line);
    if (s.name == "score") {
      cfg.requests.push_back(score_from_section(s, sw));
    } else if (s.name == "simulate") {
      if (cfg.has_experiment) throw ConfigError(sw + ": duplicate [simulate] section");
      cfg.experiment = experiment_from_section(s, sw, cfg.seed, cfg.level);
      cfg.has_experiment = true;
    } else if (s.name == "reorder") {
      if (cfg.has_reorder) throw ConfigError(sw + ": duplicate [reorder] section");
      cfg.reorder = reorder_from_section(s, sw);
      cfg.has_reorder = true;
    } else {
      throw ConfigError(sw + ": unknown section [" + s.name + "]");
    }
    for (const auto& [key, value] : s.values)
      if (!s.consumed[key]) throw ConfigError(sw + ": unknown key '" + key + "' in [" + s.name + "]");
  }

  if (const char* env = std::getenv("KERNELSCORE_SEED")) {
    cfg.seed = static_cast<std::uint64_t>(to_number(env, "KERNELSCORE_SEED"));
    if (cfg.has_experiment) cfg.experiment.seed = cfg.seed;
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace kernelscore
