#include "kernelscore/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace kernelscore {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw DataError(where + ": cannot parse number '" + s + "'");
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  return in;
}

// Validates a dim_1..dim_d header tail starting at `first` and returns d.
std::size_t dim_columns(const std::vector<std::string>& header, std::size_t first,
                        const std::string& path) {
  if (header.size() <= first)
    throw DataError(path + ": header has no dim_* columns");
  for (std::size_t i = first; i < header.size(); ++i) {
    std::string expected = "dim_" + std::to_string(i - first + 1);
    if (header[i] != expected)
      throw DataError(path + ": expected column '" + expected + "', found '" + header[i] + "'");
  }
  return header.size() - first;
}

}  // namespace

EnsembleDataset ingest_csv(const std::string& forecasts_path,
                           const std::string& observations_path) {
  std::ifstream fin = open_input(forecasts_path);
  std::string line;
  if (!std::getline(fin, line)) throw DataError(forecasts_path + ": empty file");
  std::vector<std::string> header = split_csv(line);
  if (header.size() < 3 || header[0] != "case_id" || header[1] != "member")
    throw DataError(forecasts_path + ": header must start with case_id,member,dim_1,...");
  const std::size_t d = dim_columns(header, 2, forecasts_path);

  EnsembleDataset dataset;
  dataset.dimension = d;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::vector<double>>> rows_by_case;

  std::size_t line_no = 1;
  while (std::getline(fin, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv(line);
    std::string where = forecasts_path + ":" + std::to_string(line_no);
    if (fields.size() != 2 + d)
      throw DataError(where + ": expected " + std::to_string(2 + d) + " columns, found " +
                      std::to_string(fields.size()));
    const std::string& id = fields[0];
    std::vector<double> point(d);
    for (std::size_t k = 0; k < d; ++k) point[k] = parse_number(fields[2 + k], where);
    auto [it, fresh] = index.try_emplace(id, rows_by_case.size());
    if (fresh) {
      rows_by_case.emplace_back();
      dataset.cases.push_back({id, {}, {}});
    }
    rows_by_case[it->second].push_back(std::move(point));
  }
  if (dataset.cases.empty()) throw DataError(forecasts_path + ": no forecast rows");

  std::ifstream oin = open_input(observations_path);
  if (!std::getline(oin, line)) throw DataError(observations_path + ": empty file");
  header = split_csv(line);
  if (header.empty() || header[0] != "case_id")
    throw DataError(observations_path + ": header must start with case_id,dim_1,...");
  if (dim_columns(header, 1, observations_path) != d)
    throw DataError(observations_path + ": observation dimension differs from forecasts");

  line_no = 1;
  std::size_t matched = 0;
  while (std::getline(oin, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv(line);
    std::string where = observations_path + ":" + std::to_string(line_no);
    if (fields.size() != 1 + d)
      throw DataError(where + ": expected " + std::to_string(1 + d) + " columns");
    auto it = index.find(fields[0]);
    if (it == index.end())
      throw DataError(where + ": observation for unknown case_id '" + fields[0] + "'");
    ForecastCase& c = dataset.cases[it->second];
    if (!c.observation.empty())
      throw DataError(where + ": duplicate observation for case_id '" + fields[0] + "'");
    c.observation.resize(d);
    for (std::size_t k = 0; k < d; ++k) c.observation[k] = parse_number(fields[1 + k], where);
    ++matched;
  }
  if (matched != dataset.cases.size()) {
    for (const ForecastCase& c : dataset.cases)
      if (c.observation.empty())
        throw DataError(observations_path + ": no observation for case_id '" + c.id + "'");
  }

  for (std::size_t i = 0; i < dataset.cases.size(); ++i)
    dataset.cases[i].ensemble = EnsembleForecast::from_rows(rows_by_case[i]);
  return dataset;
}

EnsembleDataset ingest_jsonl(const std::string& path) {
  std::ifstream in = open_input(path);
  EnsembleDataset dataset;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::string where = path + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    if (!j.contains("id") || !j.contains("ensemble") || !j.contains("obs"))
      throw DataError(where + ": expected keys id, ensemble, obs");
    ForecastCase c;
    c.id = j["id"].get<std::string>();
    std::vector<std::vector<double>> rows;
    for (const auto& row : j["ensemble"]) rows.push_back(row.get<std::vector<double>>());
    if (rows.empty()) throw DataError(where + ": empty ensemble");
    c.ensemble = EnsembleForecast::from_rows(rows);
    c.observation = j["obs"].get<std::vector<double>>();
    if (c.observation.size() != c.ensemble.dimension())
      throw DataError(where + ": observation dimension differs from ensemble");
    if (dataset.dimension == 0)
      dataset.dimension = c.ensemble.dimension();
    else if (dataset.dimension != c.ensemble.dimension())
      throw DataError(where + ": inconsistent dimension across cases");
    dataset.cases.push_back(std::move(c));
  }
  if (dataset.cases.empty()) throw DataError(path + ": no cases");
  return dataset;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const EnsembleDataset& dataset, const std::string& forecasts_path,
               const std::string& observations_path) {
  std::ofstream fout(forecasts_path);
  if (!fout) throw DataError("cannot write file: " + forecasts_path);
  fout << "case_id,member";
  for (std::size_t k = 1; k <= dataset.dimension; ++k) fout << ",dim_" << k;
  fout << "\n";
  for (const ForecastCase& c : dataset.cases) {
    for (std::size_t m = 0; m < c.ensemble.size(); ++m) {
      fout << c.id << "," << (m + 1);
      for (std::size_t k = 0; k < dataset.dimension; ++k)
        fout << "," << format_double(c.ensemble.at(m, k));
      fout << "\n";
    }
  }

  std::ofstream oout(observations_path);
  if (!oout) throw DataError("cannot write file: " + observations_path);
  oout << "case_id";
  for (std::size_t k = 1; k <= dataset.dimension; ++k) oout << ",dim_" << k;
  oout << "\n";
  for (const ForecastCase& c : dataset.cases) {
    oout << c.id;
    for (double v : c.observation) oout << "," << format_double(v);
    oout << "\n";
  }
}

void write_jsonl(const EnsembleDataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (const ForecastCase& c : dataset.cases) {
    nlohmann::json j;
    j["id"] = c.id;
    nlohmann::json ens = nlohmann::json::array();
    for (std::size_t m = 0; m < c.ensemble.size(); ++m) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t k = 0; k < c.ensemble.dimension(); ++k) row.push_back(c.ensemble.at(m, k));
      ens.push_back(std::move(row));
    }
    j["ensemble"] = std::move(ens);
    j["obs"] = c.observation;
    out << j.dump() << "\n";
  }
}

std::vector<std::vector<double>> read_matrix_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  std::vector<std::string> header = split_csv(line);
  const std::size_t d = dim_columns(header, 0, path);
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv(line);
    std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() != d) throw DataError(where + ": expected " + std::to_string(d) + " columns");
    std::vector<double> row(d);
    for (std::size_t k = 0; k < d; ++k) row[k] = parse_number(fields[k], where);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no rows");
  return rows;
}

void write_matrix_csv(const std::vector<std::vector<double>>& rows, const std::string& path) {
  if (rows.empty()) throw DataError("write_matrix_csv: no rows");
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (std::size_t k = 1; k <= rows.front().size(); ++k) out << (k == 1 ? "" : ",") << "dim_" << k;
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k == 0 ? "" : ",") << format_double(row[k]);
    out << "\n";
  }
}

}  // namespace kernelscore
