#include "kernelscore/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace kernelscore {

KernelSpec KernelSpec::absolute_difference() {
  KernelSpec k;
  k.kind = KernelKind::AbsoluteDifference;
  k.dimension = 1;
  return k;
}

KernelSpec KernelSpec::euclidean_power(std::size_t d, double beta) {
  KernelSpec k;
  k.kind = KernelKind::EuclideanPower;
  k.dimension = d;
  k.beta = beta;
  return k;
}

KernelSpec KernelSpec::variogram(std::size_t d, double p, std::vector<double> h) {
  KernelSpec k;
  k.kind = KernelKind::Variogram;
  k.dimension = d;
  k.p = p;
  k.h = std::move(h);
  return k;
}

KernelSpec KernelSpec::inverse_multiquadric(std::size_t d) {
  KernelSpec k;
  k.kind = KernelKind::InverseMultiquadric;
  k.dimension = d;
  return k;
}

void KernelSpec::validate() const {
  if (dimension == 0) throw std::invalid_argument("kernel: dimension must be positive");
  switch (kind) {
    case KernelKind::AbsoluteDifference:
      if (dimension != 1)
        throw std::invalid_argument("absolute-difference kernel is univariate");
      break;
    case KernelKind::EuclideanPower:
      if (!(beta > 0.0 && beta < 2.0))
        throw std::invalid_argument("euclidean-power kernel: beta must lie in (0, 2)");
      break;
    case KernelKind::Variogram:
      if (!(p > 0.0)) throw std::invalid_argument("variogram kernel: p must be positive");
      if (!h.empty()) {
        if (h.size() != dimension * dimension)
          throw std::invalid_argument("variogram kernel: h must be d x d");
        for (double v : h)
          if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("variogram kernel: h entries must lie in [0, 1]");
      }
      break;
    case KernelKind::InverseMultiquadric:
      break;
  }
}

namespace {

double squared_distance(std::span<const double> x, std::span<const double> xp) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - xp[i];
    s += d * d;
  }
  return s;
}

double variogram_kernel(const KernelSpec& k, std::span<const double> x,
                        std::span<const double> xp) {
  const std::size_t d = x.size();
  const bool unit_h = k.h.empty();
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      double diff = std::pow(std::abs(x[i] - x[j]), k.p) -
                    std::pow(std::abs(xp[i] - xp[j]), k.p);
      double hij = unit_h ? 2.0 : k.h[i * d + j] + k.h[j * d + i];
      s += hij * diff * diff;
    }
  }
  return s;
}

}  // namespace

double evaluate_base_kernel(const KernelSpec& k, std::span<const double> x,
                            std::span<const double> xp) {
  switch (k.kind) {
    case KernelKind::AbsoluteDifference:
      return std::abs(x[0] - xp[0]);
    case KernelKind::EuclideanPower: {
      double sq = squared_distance(x, xp);
      if (k.beta == 1.0) return std::sqrt(sq);
      return std::pow(sq, 0.5 * k.beta);
    }
    case KernelKind::Variogram:
      return variogram_kernel(k, x, xp);
    case KernelKind::InverseMultiquadric:
      return -1.0 / std::sqrt(1.0 + squared_distance(x, xp));
  }
  throw std::logic_error("evaluate_base_kernel: unknown kind");
}

TransformedKernel TransformedKernel::plain(KernelSpec base) {
  TransformedKernel k;
  k.base = std::move(base);
  return k;
}

TransformedKernel TransformedKernel::chained(KernelSpec base, ChainingSpec v) {
  TransformedKernel k;
  k.base = std::move(base);
  k.transform = KernelTransform::Chained;
  k.chaining = std::move(v);
  return k;
}

TransformedKernel TransformedKernel::vertically_rescaled(KernelSpec base, WeightSpec w,
                                                         std::vector<double> x0) {
  TransformedKernel k;
  k.base = std::move(base);
  k.transform = KernelTransform::VerticallyRescaled;
  k.weight = std::move(w);
  k.center = std::move(x0);
  return k;
}

TransformedKernel TransformedKernel::centered(KernelSpec base, std::vector<double> x0) {
  TransformedKernel k;
  k.base = std::move(base);
  k.transform = KernelTransform::Centered;
  k.center = std::move(x0);
  return k;
}

void TransformedKernel::validate() const {
  base.validate();
  switch (transform) {
    case KernelTransform::None:
      break;
    case KernelTransform::Chained:
      chaining.validate();
      break;
    case KernelTransform::VerticallyRescaled:
      weight.validate();
      if (base.zero_diagonal() && center.size() != base.dimension)
        throw std::invalid_argument("vertically re-scaled kernel: center must have dimension d");
      break;
    case KernelTransform::Centered:
      if (!base.zero_diagonal())
        throw std::invalid_argument("centering requires a kernel that vanishes on the diagonal");
      if (center.size() != base.dimension)
        throw std::invalid_argument("centered kernel: center must have dimension d");
      break;
  }
}

namespace {

double centered_kernel(const KernelSpec& base, std::span<const double> x,
                       std::span<const double> xp, std::span<const double> x0) {
  // Grouped so the expression is bitwise symmetric in (x, x').
  return evaluate_base_kernel(base, x, xp) -
         (evaluate_base_kernel(base, x, x0) + evaluate_base_kernel(base, xp, x0));
}

}  // namespace

double evaluate_kernel(const TransformedKernel& k, std::span<const double> x,
                       std::span<const double> xp) {
  require_finite(x, "evaluate_kernel");
  require_finite(xp, "evaluate_kernel");
  require_dimension(x, k.base.dimension, "evaluate_kernel");
  require_dimension(xp, k.base.dimension, "evaluate_kernel");
  switch (k.transform) {
    case KernelTransform::None:
      return evaluate_base_kernel(k.base, x, xp);
    case KernelTransform::Chained: {
      std::vector<double> vx = eval_chaining(k.chaining, x);
      std::vector<double> vxp = eval_chaining(k.chaining, xp);
      return evaluate_base_kernel(k.base, vx, vxp);
    }
    case KernelTransform::VerticallyRescaled: {
      double ww = eval_weight(k.weight, x) * eval_weight(k.weight, xp);
      if (k.base.zero_diagonal()) return centered_kernel(k.base, x, xp, k.center) * ww;
      return evaluate_base_kernel(k.base, x, xp) * ww;
    }
    case KernelTransform::Centered:
      return centered_kernel(k.base, x, xp, k.center);
  }
  throw std::logic_error("evaluate_kernel: unknown transform");
}

double empirical_kernel_score(const TransformedKernel& k, const EnsembleForecast& ensemble,
                              std::span<const double> y) {
  if (ensemble.empty()) throw std::invalid_argument("empirical_kernel_score: empty ensemble");
  if (ensemble.dimension() != k.base.dimension || y.size() != k.base.dimension)
    throw std::invalid_argument("empirical_kernel_score: dimension mismatch");
  const std::size_t m = ensemble.size();

  double cross = 0.0;
  for (std::size_t i = 0; i < m; ++i) cross += evaluate_kernel(k, ensemble.member(i), y);

  double self = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    self += evaluate_kernel(k, ensemble.member(i), ensemble.member(i));
    for (std::size_t j = i + 1; j < m; ++j)
      self += 2.0 * evaluate_kernel(k, ensemble.member(i), ensemble.member(j));
  }

  double diag = evaluate_kernel(k, y, y);
  double mm = static_cast<double>(m);
  return cross / mm - self / (2.0 * mm * mm) - 0.5 * diag;
}

double empirical_energy_distance(const TransformedKernel& k, const EnsembleForecast& a,
                                 const EnsembleForecast& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("energy distance: empty ensemble");
  if (a.dimension() != b.dimension() || a.dimension() != k.base.dimension)
    throw std::invalid_argument("energy distance: dimension mismatch");
  const std::size_t ma = a.size(), mb = b.size();

  double cross = 0.0;
  for (std::size_t i = 0; i < ma; ++i)
    for (std::size_t j = 0; j < mb; ++j) cross += evaluate_kernel(k, a.member(i), b.member(j));

  auto self_mean = [&](const EnsembleForecast& e) {
    double s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      s += evaluate_kernel(k, e.member(i), e.member(i));
      for (std::size_t j = i + 1; j < e.size(); ++j)
        s += 2.0 * evaluate_kernel(k, e.member(i), e.member(j));
    }
    double n = static_cast<double>(e.size());
    return s / (n * n);
  };

  return cross / (static_cast<double>(ma) * static_cast<double>(mb)) - 0.5 * self_mean(a) -
         0.5 * self_mean(b);
}

}  // namespace kernelscore
