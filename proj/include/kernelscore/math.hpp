#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kernelscore {

double normal_pdf(double x);
double normal_cdf(double x);
double normal_quantile(double p);

// Student-t distribution function with nu degrees of freedom.
double student_t_cdf(double x, double nu);
double student_t_pdf(double x, double nu);

// Regularized lower incomplete gamma and friends, parameterised by
// shape/scale as used throughout the post-processing model.
double gamma_cdf(double x, double shape, double scale);
double gamma_quantile(double p, double shape, double scale);
double gamma_log_pdf(double x, double shape, double scale);

double chi_squared_cdf(double x, double dof);

// Adaptive quadrature of f over [a, b] to the given absolute tolerance.
double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol);

// Compensated (Neumaier) summation; keeps dataset aggregation independent
// of evaluation order.
class CompensatedSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

// Mean and standard error (sample std / sqrt(n)) of a sequence.
MeanStderr mean_stderr(std::span<const double> values);

}  // namespace kernelscore
