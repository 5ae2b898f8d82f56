#include "kernelscore/math.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <stdexcept>

namespace kernelscore {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kInvSqrt2 = 0.7071067811865475244;
}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_quantile(double p) {
  static const boost::math::normal_distribution<double> dist;
  return boost::math::quantile(dist, p);
}

double student_t_cdf(double x, double nu) {
  if (nu == 4.0) {
    // Closed form for four degrees of freedom: with w = x / sqrt(4 + x^2),
    // F(x) = 1/2 + (3/4) w (1 - w^2 / 3).
    double w = x / std::sqrt(4.0 + x * x);
    return 0.5 + 0.75 * w * (1.0 - w * w / 3.0);
  }
  boost::math::students_t_distribution<double> dist(nu);
  return boost::math::cdf(dist, x);
}

double student_t_pdf(double x, double nu) {
  boost::math::students_t_distribution<double> dist(nu);
  return boost::math::pdf(dist, x);
}

double gamma_cdf(double x, double shape, double scale) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(shape, x / scale);
}

double gamma_quantile(double p, double shape, double scale) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) throw std::invalid_argument("gamma_quantile: p must lie in [0, 1)");
  return scale * boost::math::gamma_p_inv(shape, p);
}

double gamma_log_pdf(double x, double shape, double scale) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return (shape - 1.0) * std::log(x) - x / scale - shape * std::log(scale) -
         std::lgamma(shape);
}

double chi_squared_cdf(double x, double dof) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

namespace {

// Adaptive Simpson with Richardson extrapolation. Splits only the cells
// whose local error estimate exceeds their share of the budget, so jump
// discontinuities cost a bisection chain rather than a blow-up.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double refined = left + right;
  if (depth <= 0 || std::abs(refined - whole) <= 15.0 * tol)
    return refined + (refined - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, abs_tol, 55);
}

MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr out;
  out.n = values.size();
  if (out.n == 0) return out;
  CompensatedSum sum;
  for (double v : values) sum.add(v);
  out.mean = sum.value() / static_cast<double>(out.n);
  if (out.n < 2) return out;
  CompensatedSum sq;
  for (double v : values) {
    double d = v - out.mean;
    sq.add(d * d);
  }
  double var = sq.value() / static_cast<double>(out.n - 1);
  out.stderr_ = std::sqrt(var / static_cast<double>(out.n));
  return out;
}

}  // namespace kernelscore
