#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "kernelscore/ensemble.hpp"
#include "kernelscore/kernels.hpp"
#include "kernelscore/math.hpp"
#include "kernelscore/postproc.hpp"
#include "kernelscore/weights.hpp"

namespace kstest {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline std::vector<double> random_vector(std::mt19937_64& gen, std::size_t d,
                                         double spread = 1.0) {
  std::normal_distribution<double> dist(0.0, spread);
  std::vector<double> v(d);
  for (double& x : v) x = dist(gen);
  return v;
}

inline kernelscore::EnsembleForecast random_ensemble(std::mt19937_64& gen, std::size_t m,
                                                     std::size_t d, double spread = 1.0) {
  kernelscore::EnsembleForecast ens(m, d);
  std::normal_distribution<double> dist(0.0, spread);
  for (auto& x : ens.data()) x = dist(gen);
  return ens;
}

// Chi-square goodness-of-fit p-value against the uniform distribution over
// the bins.
inline double chi_square_uniform_pvalue(const std::vector<std::uint64_t>& counts) {
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  double expected = n / static_cast<double>(counts.size());
  double stat = 0.0;
  for (auto c : counts) {
    double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return 1.0 - kernelscore::chi_squared_cdf(stat, static_cast<double>(counts.size() - 1));
}

// Composite Simpson integration; test-side oracle kept independent of the
// adaptive quadrature used in the library.
template <typename F>
double simpson(const F& f, double a, double b, std::size_t intervals = 20000) {
  if (intervals % 2 == 1) ++intervals;
  double h = (b - a) / static_cast<double>(intervals);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < intervals; ++i)
    s += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Composite 5-point Gauss-Legendre; nodes are strictly interior, so pieces
// bounded by the discontinuities of an indicator integrand are handled
// exactly.
template <typename F>
double gauss5(const F& f, double a, double b, std::size_t intervals = 200) {
  static const double nodes[5] = {0.0, -0.5384693101056831, 0.5384693101056831,
                                  -0.9061798459386640, 0.9061798459386640};
  static const double weights[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                    0.2369268850561891, 0.2369268850561891};
  double h = (b - a) / static_cast<double>(intervals);
  double total = 0.0;
  for (std::size_t i = 0; i < intervals; ++i) {
    double lo = a + h * static_cast<double>(i);
    double mid = lo + 0.5 * h;
    double sum = 0.0;
    for (int k = 0; k < 5; ++k) sum += weights[k] * f(mid + 0.5 * h * nodes[k]);
    total += 0.5 * h * sum;
  }
  return total;
}

// Direct numerical evaluation of the weighted Brier-integral form of the
// threshold-weighted CRPS for an ensemble: integral of
// (F(z) - 1{y <= z})^2 w(z) dz. The integrand is piecewise constant times w
// between pooled breakpoints, so each cell is integrated with Simpson and
// indicator-weight breakpoints are added to the pool.
inline double twcrps_integral_oracle(const std::vector<double>& members,
                                     const kernelscore::WeightSpec& weight, double y) {
  std::vector<double> breaks(members);
  breaks.push_back(y);
  switch (weight.kind) {
    case kernelscore::WeightKind::AboveThreshold:
    case kernelscore::WeightKind::BelowThreshold:
      breaks.push_back(weight.thresholds[0]);
      break;
    case kernelscore::WeightKind::Interval:
      breaks.push_back(weight.lower);
      breaks.push_back(weight.upper);
      break;
    default:
      break;
  }
  std::sort(breaks.begin(), breaks.end());

  auto cdf = [&](double z) {
    double c = 0.0;
    for (double x : members)
      if (x <= z) c += 1.0;
    return c / static_cast<double>(members.size());
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double a = breaks[i], b = breaks[i + 1];
    if (!(b > a)) continue;
    double mid = 0.5 * (a + b);
    double c = cdf(mid) - (y <= mid ? 1.0 : 0.0);
    if (c == 0.0) continue;
    double wint = gauss5(
        [&](double z) {
          return kernelscore::eval_weight(weight, std::span<const double>(&z, 1));
        },
        a, b, 32);
    total += c * c * wint;
  }
  return total;
}

// Uniform discrete distribution on a handful of atoms, used by the
// Monte-Carlo propriety checks.
struct AtomDistribution {
  kernelscore::EnsembleForecast atoms;
};

struct ProprietyOutcome {
  double mean_diff = 0.0;  // E[S(truth, Y) - S(other, Y)], Y from truth
  double stderr_ = 0.0;
};

// Draws from `truth` and averages the score difference between issuing the
// truth and issuing `other`; propriety demands the mean be non-positive up
// to sampling noise.
template <typename ScoreFn>
ProprietyOutcome propriety_mc(const AtomDistribution& truth, const AtomDistribution& other,
                              const ScoreFn& score, std::size_t draws, std::mt19937_64& gen) {
  const std::size_t k = truth.atoms.size();
  std::vector<double> diff_at_atom(k);
  for (std::size_t a = 0; a < k; ++a)
    diff_at_atom[a] = score(truth, truth.atoms.member(a)) - score(other, truth.atoms.member(a));

  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    double d = diff_at_atom[pick(gen)];
    sum += d;
    sumsq += d * d;
  }
  double n = static_cast<double>(draws);
  ProprietyOutcome out;
  out.mean_diff = sum / n;
  double var = (sumsq - sum * sum / n) / (n - 1.0);
  out.stderr_ = std::sqrt(std::max(var, 0.0) / n);
  return out;
}

// Synthetic training data drawn from a known censored-shifted-Gamma model.
inline std::vector<kernelscore::CsgdTrainingCase> synthetic_csgd(
    const kernelscore::CsgdParams& truth, std::size_t n, std::uint64_t seed,
    double xbar_shape = 2.0, double xbar_scale = 1.0) {
  auto gen = rng(seed);
  std::gamma_distribution<double> xbar_dist(xbar_shape, xbar_scale);
  std::gamma_distribution<double> s_dist(2.0, 0.5);
  std::vector<kernelscore::CsgdTrainingCase> train(n);
  for (auto& c : train) {
    c.xbar = xbar_dist(gen);
    c.s = s_dist(gen);
    double mu = truth.alpha + truth.beta * c.xbar;
    double sd = truth.gamma + truth.delta * c.s;
    double shape = (mu / sd) * (mu / sd);
    double scale = sd * sd / mu;
    std::gamma_distribution<double> y_dist(shape, scale);
    c.y = std::max(y_dist(gen) - truth.shift, 0.0);
  }
  return train;
}

}  // namespace kstest
