#include "kernelscore/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kernelscore/ensemble.hpp"
#include "kernelscore/math.hpp"

namespace kernelscore {

WeightSpec WeightSpec::constant() { return {}; }

WeightSpec WeightSpec::above(double t) { return above(std::vector<double>{t}); }

WeightSpec WeightSpec::above(std::vector<double> t) {
  WeightSpec w;
  w.kind = WeightKind::AboveThreshold;
  w.thresholds = std::move(t);
  return w;
}

WeightSpec WeightSpec::below(double t) { return below(std::vector<double>{t}); }

WeightSpec WeightSpec::below(std::vector<double> t) {
  WeightSpec w;
  w.kind = WeightKind::BelowThreshold;
  w.thresholds = std::move(t);
  return w;
}

WeightSpec WeightSpec::interval(double a, double b) {
  WeightSpec w;
  w.kind = WeightKind::Interval;
  w.lower = a;
  w.upper = b;
  return w;
}

WeightSpec WeightSpec::half_space(std::vector<double> b, double t) {
  WeightSpec w;
  w.kind = WeightKind::LinearHalfSpace;
  w.coefficients = std::move(b);
  w.offset = t;
  return w;
}

WeightSpec WeightSpec::gaussian_cdf(double mu, double sigma) {
  return gaussian_cdf(std::vector<double>{mu}, std::vector<double>{sigma});
}

WeightSpec WeightSpec::gaussian_cdf(std::vector<double> mu, std::vector<double> sigma) {
  WeightSpec w;
  w.kind = mu.size() == 1 ? WeightKind::GaussianCdf1D : WeightKind::GaussianCdfMultivariate;
  w.mu = std::move(mu);
  w.sigma = std::move(sigma);
  return w;
}

bool WeightSpec::binary() const {
  switch (kind) {
    case WeightKind::Constant:
    case WeightKind::AboveThreshold:
    case WeightKind::BelowThreshold:
    case WeightKind::Interval:
    case WeightKind::LinearHalfSpace:
      return true;
    case WeightKind::GaussianCdf1D:
    case WeightKind::GaussianCdfMultivariate:
      return false;
  }
  return false;
}

void WeightSpec::validate() const {
  switch (kind) {
    case WeightKind::Constant:
      break;
    case WeightKind::AboveThreshold:
    case WeightKind::BelowThreshold:
      if (thresholds.empty()) throw std::invalid_argument("threshold weight: no thresholds");
      break;
    case WeightKind::Interval:
      if (!(lower <= upper)) throw std::invalid_argument("interval weight: a > b");
      break;
    case WeightKind::LinearHalfSpace:
      if (coefficients.empty()) throw std::invalid_argument("half-space weight: no coefficients");
      break;
    case WeightKind::GaussianCdf1D:
    case WeightKind::GaussianCdfMultivariate:
      if (mu.size() != sigma.size() || mu.empty())
        throw std::invalid_argument("gaussian weight: mu/sigma size mismatch");
      for (double s : sigma)
        if (!(s > 0.0)) throw std::invalid_argument("gaussian weight: sigma must be positive");
      break;
  }
}

namespace {

// Broadcast a scalar threshold across dimensions.
double threshold_at(const std::vector<double>& t, std::size_t i) {
  return t.size() == 1 ? t[0] : t[i];
}

void check_threshold_dims(const std::vector<double>& t, std::size_t d, const char* what) {
  if (t.size() != 1 && t.size() != d)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

double eval_weight(const WeightSpec& w, std::span<const double> z) {
  require_finite(z, "eval_weight");
  if (z.empty()) throw std::invalid_argument("eval_weight: empty input");
  switch (w.kind) {
    case WeightKind::Constant:
      return 1.0;
    case WeightKind::AboveThreshold: {
      check_threshold_dims(w.thresholds, z.size(), "above-threshold weight");
      for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i] < threshold_at(w.thresholds, i)) return 0.0;
      return 1.0;
    }
    case WeightKind::BelowThreshold: {
      check_threshold_dims(w.thresholds, z.size(), "below-threshold weight");
      for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i] > threshold_at(w.thresholds, i)) return 0.0;
      return 1.0;
    }
    case WeightKind::Interval: {
      require_dimension(z, 1, "interval weight");
      return (w.lower <= z[0] && z[0] <= w.upper) ? 1.0 : 0.0;
    }
    case WeightKind::LinearHalfSpace: {
      require_dimension(z, w.coefficients.size(), "half-space weight");
      double s = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) s += w.coefficients[i] * z[i];
      return s >= w.offset ? 1.0 : 0.0;
    }
    case WeightKind::GaussianCdf1D: {
      require_dimension(z, 1, "gaussian weight");
      return normal_cdf((z[0] - w.mu[0]) / w.sigma[0]);
    }
    case WeightKind::GaussianCdfMultivariate: {
      require_dimension(z, w.mu.size(), "gaussian weight");
      double p = 1.0;
      for (std::size_t i = 0; i < z.size(); ++i)
        p *= normal_cdf((z[i] - w.mu[i]) / w.sigma[i]);
      return p;
    }
  }
  throw std::logic_error("eval_weight: unknown kind");
}

ChainingSpec ChainingSpec::identity() { return {}; }

ChainingSpec ChainingSpec::from_weight(WeightSpec w) {
  ChainingSpec v;
  v.kind = ChainingKind::UnivariateFromWeight;
  v.weight = std::move(w);
  return v;
}

ChainingSpec ChainingSpec::collapse_outside(WeightSpec w, std::vector<double> x0) {
  ChainingSpec v;
  v.kind = ChainingKind::CollapseOutside;
  v.weight = std::move(w);
  v.center = std::move(x0);
  return v;
}

ChainingSpec ChainingSpec::componentwise_max(double t) {
  ChainingSpec v;
  v.kind = ChainingKind::ComponentwiseMax;
  v.threshold = t;
  return v;
}

ChainingSpec ChainingSpec::plane_projection(double t) {
  ChainingSpec v;
  v.kind = ChainingKind::PlaneProjection;
  v.threshold = t;
  return v;
}

ChainingSpec ChainingSpec::gaussian_integrated(std::vector<double> mu, std::vector<double> sigma) {
  ChainingSpec v;
  v.kind = ChainingKind::GaussianIntegrated;
  v.mu = std::move(mu);
  v.sigma = std::move(sigma);
  return v;
}

void ChainingSpec::validate() const {
  switch (kind) {
    case ChainingKind::Identity:
    case ChainingKind::ComponentwiseMax:
    case ChainingKind::PlaneProjection:
      break;
    case ChainingKind::UnivariateFromWeight:
      weight.validate();
      break;
    case ChainingKind::CollapseOutside:
      weight.validate();
      if (!weight.binary())
        throw std::invalid_argument("collapse chaining requires a binary weight");
      if (center.empty()) throw std::invalid_argument("collapse chaining: no center");
      break;
    case ChainingKind::GaussianIntegrated:
      if (mu.size() != sigma.size() || mu.empty())
        throw std::invalid_argument("gaussian chaining: mu/sigma size mismatch");
      for (double s : sigma)
        if (!(s > 0.0)) throw std::invalid_argument("gaussian chaining: sigma must be positive");
      break;
  }
}

namespace {

double gaussian_antiderivative(double z, double mu, double sigma) {
  double u = (z - mu) / sigma;
  return (z - mu) * normal_cdf(u) + sigma * normal_pdf(u);
}

// v(x) with v anchored so closed-form and quadrature paths agree on
// differences; the additive constant cancels inside every kernel score.
double univariate_chaining(const WeightSpec& w, double x) {
  switch (w.kind) {
    case WeightKind::AboveThreshold:
      return std::max(x, w.thresholds[0]);
    case WeightKind::BelowThreshold:
      return std::min(x, w.thresholds[0]);
    case WeightKind::Interval:
      return std::min(std::max(x, w.lower), w.upper);
    case WeightKind::GaussianCdf1D:
      return gaussian_antiderivative(x, w.mu[0], w.sigma[0]);
    default:
      break;
  }
  // Numeric fallback: v(x) = integral of w over [0, x), signed.
  double anchor = 0.0;
  double lo = std::min(anchor, x), hi = std::max(anchor, x);
  if (lo == hi) return 0.0;
  double value = integrate(
      [&](double u) {
        double wu = eval_weight(w, std::span<const double>(&u, 1));
        if (wu < 0.0)
          throw std::domain_error("chaining fallback: negative weight makes v non-monotone");
        return wu;
      },
      lo, hi, 1e-10);
  return x >= anchor ? value : -value;
}

}  // namespace

void eval_chaining(const ChainingSpec& v, std::span<const double> z, std::span<double> out) {
  require_finite(z, "eval_chaining");
  if (out.size() != z.size()) throw std::invalid_argument("eval_chaining: output size mismatch");
  switch (v.kind) {
    case ChainingKind::Identity:
      std::copy(z.begin(), z.end(), out.begin());
      return;
    case ChainingKind::UnivariateFromWeight: {
      require_dimension(z, 1, "univariate chaining");
      out[0] = univariate_chaining(v.weight, z[0]);
      return;
    }
    case ChainingKind::CollapseOutside: {
      require_dimension(z, v.center.size(), "collapse chaining");
      if (eval_weight(v.weight, z) > 0.0)
        std::copy(z.begin(), z.end(), out.begin());
      else
        std::copy(v.center.begin(), v.center.end(), out.begin());
      return;
    }
    case ChainingKind::ComponentwiseMax: {
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::max(z[i], v.threshold);
      return;
    }
    case ChainingKind::PlaneProjection: {
      double sum = 0.0;
      for (double zi : z) sum += zi;
      double shift = std::max(0.0, (v.threshold - sum) / static_cast<double>(z.size()));
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] + shift;
      return;
    }
    case ChainingKind::GaussianIntegrated: {
      require_dimension(z, v.mu.size(), "gaussian chaining");
      for (std::size_t i = 0; i < z.size(); ++i)
        out[i] = gaussian_antiderivative(z[i], v.mu[i], v.sigma[i]);
      return;
    }
  }
  throw std::logic_error("eval_chaining: unknown kind");
}

std::vector<double> eval_chaining(const ChainingSpec& v, std::span<const double> z) {
  std::vector<double> out(z.size());
  eval_chaining(v, z, out);
  return out;
}

}  // namespace kernelscore
