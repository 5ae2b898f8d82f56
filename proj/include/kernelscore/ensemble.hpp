#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace kernelscore {

// An ensemble forecast: M members, each a point in R^d. Row-major storage,
// one row per member.
class EnsembleForecast {
 public:
  EnsembleForecast() = default;
  EnsembleForecast(std::size_t members, std::size_t dimension)
      : members_(members), dimension_(dimension), data_(members * dimension, 0.0) {}

  static EnsembleForecast from_rows(const std::vector<std::vector<double>>& rows);

  // Univariate convenience: one member per value.
  static EnsembleForecast from_values(const std::vector<double>& values);

  std::size_t size() const { return members_; }
  std::size_t dimension() const { return dimension_; }
  bool empty() const { return members_ == 0; }

  std::span<const double> member(std::size_t m) const {
    return {data_.data() + m * dimension_, dimension_};
  }
  std::span<double> member(std::size_t m) {
    return {data_.data() + m * dimension_, dimension_};
  }

  double& at(std::size_t m, std::size_t j) { return data_[m * dimension_ + j]; }
  double at(std::size_t m, std::size_t j) const { return data_[m * dimension_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t members_ = 0;
  std::size_t dimension_ = 0;
  std::vector<double> data_;
};

// A forecast case: an ensemble plus the verifying observation.
struct ForecastCase {
  std::string id;
  EnsembleForecast ensemble;
  std::vector<double> observation;
};

void require_finite(std::span<const double> x, const char* what);
void require_dimension(std::span<const double> x, std::size_t d, const char* what);

}  // namespace kernelscore
