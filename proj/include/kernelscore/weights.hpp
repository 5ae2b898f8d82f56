#pragma once

#include <span>
#include <vector>

namespace kernelscore {

// Weight functions w: R^d -> [0, 1] used to emphasise outcome regions.
// Indicator kinds return exactly 0 or 1.
enum class WeightKind {
  Constant,               // w(z) = 1
  AboveThreshold,         // w(z) = 1{z_i >= t_i for all i}; scalar t broadcasts
  BelowThreshold,         // w(z) = 1{z_i <= t_i for all i}
  Interval,               // d = 1; w(z) = 1{a <= z <= b}
  LinearHalfSpace,        // w(z) = 1{sum_i b_i z_i >= t}
  GaussianCdf1D,          // d = 1; w(z) = Phi((z - mu) / sigma)
  GaussianCdfMultivariate // diagonal covariance; w(z) = prod_i Phi((z_i - mu_i) / sigma_i)
};

struct WeightSpec {
  WeightKind kind = WeightKind::Constant;
  std::vector<double> thresholds;  // AboveThreshold / BelowThreshold
  double lower = 0.0, upper = 0.0; // Interval bounds
  std::vector<double> coefficients; // LinearHalfSpace b
  double offset = 0.0;              // LinearHalfSpace t
  std::vector<double> mu, sigma;    // Gaussian kinds (sigma holds std devs)

  static WeightSpec constant();
  static WeightSpec above(double t);
  static WeightSpec above(std::vector<double> t);
  static WeightSpec below(double t);
  static WeightSpec below(std::vector<double> t);
  static WeightSpec interval(double a, double b);
  static WeightSpec half_space(std::vector<double> b, double t);
  static WeightSpec gaussian_cdf(double mu, double sigma);
  static WeightSpec gaussian_cdf(std::vector<double> mu, std::vector<double> sigma);

  // True for kinds whose values are exactly 0 or 1.
  bool binary() const;
  void validate() const;
};

double eval_weight(const WeightSpec& w, std::span<const double> z);

// Chaining functions v: R^d -> R^d; deformations applied to kernel inputs.
enum class ChainingKind {
  Identity,
  UnivariateFromWeight, // d = 1; v with v(x) - v(x') = integral of w over [x', x)
  CollapseOutside,      // v(z) = z on {w > 0}, v(z) = x0 on {w = 0}; w binary
  ComponentwiseMax,     // v(z)_i = max(z_i, t)
  PlaneProjection,      // shift z by max(0, (t - sum z_i) / d) in every coordinate
  GaussianIntegrated    // v(z)_i = (z_i - mu_i) Phi(u_i) + sigma_i phi(u_i), u_i = (z_i - mu_i)/sigma_i
};

struct ChainingSpec {
  ChainingKind kind = ChainingKind::Identity;
  WeightSpec weight;            // UnivariateFromWeight / CollapseOutside
  std::vector<double> center;   // CollapseOutside x0
  double threshold = 0.0;       // ComponentwiseMax / PlaneProjection
  std::vector<double> mu, sigma; // GaussianIntegrated

  static ChainingSpec identity();
  static ChainingSpec from_weight(WeightSpec w);
  static ChainingSpec collapse_outside(WeightSpec w, std::vector<double> x0);
  static ChainingSpec componentwise_max(double t);
  static ChainingSpec plane_projection(double t);
  static ChainingSpec gaussian_integrated(std::vector<double> mu, std::vector<double> sigma);

  void validate() const;
};

void eval_chaining(const ChainingSpec& v, std::span<const double> z, std::span<double> out);
std::vector<double> eval_chaining(const ChainingSpec& v, std::span<const double> z);

}  // namespace kernelscore
