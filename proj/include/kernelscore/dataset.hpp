#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "kernelscore/ensemble.hpp"

namespace kernelscore {

// Error raised by file/content problems; maps to the data-error exit code.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnsembleDataset {
  std::vector<ForecastCase> cases;
  std::size_t dimension = 0;
};

// Long-format forecast CSV (case_id,member,dim_1..dim_d) joined with an
// observation CSV (case_id,dim_1..dim_d). Member counts may vary per case;
// the dimension must not.
EnsembleDataset ingest_csv(const std::string& forecasts_path,
                           const std::string& observations_path);

// One case per line: {"id": ..., "ensemble": [[...], ...], "obs": [...]}.
EnsembleDataset ingest_jsonl(const std::string& path);

void write_csv(const EnsembleDataset& dataset, const std::string& forecasts_path,
               const std::string& observations_path);
void write_jsonl(const EnsembleDataset& dataset, const std::string& path);

// Plain numeric matrix CSV with a dim_1..dim_d header; used for margins,
// reorder templates, and correlation inputs.
std::vector<std::vector<double>> read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::vector<std::vector<double>>& rows, const std::string& path);

// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_double(double v);

}  // namespace kernelscore
