#include "kernelscore/ensemble.hpp"

#include <cmath>
#include <stdexcept>

namespace kernelscore {

EnsembleForecast EnsembleForecast::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  EnsembleForecast ens(rows.size(), rows.front().size());
  for (std::size_t m = 0; m < rows.size(); ++m) {
    if (rows[m].size() != ens.dimension_)
      throw std::invalid_argument("ensemble rows have inconsistent dimension");
    for (std::size_t j = 0; j < ens.dimension_; ++j) ens.at(m, j) = rows[m][j];
  }
  return ens;
}

EnsembleForecast EnsembleForecast::from_values(const std::vector<double>& values) {
  EnsembleForecast ens(values.size(), 1);
  for (std::size_t m = 0; m < values.size(); ++m) ens.at(m, 0) = values[m];
  return ens;
}

void require_finite(std::span<const double> x, const char* what) {
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite value");
}

void require_dimension(std::span<const double> x, std::size_t d, const char* what) {
  if (x.size() != d)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (got " +
                                std::to_string(x.size()) + ", expected " + std::to_string(d) +
                                ")");
}

}  // namespace kernelscore
