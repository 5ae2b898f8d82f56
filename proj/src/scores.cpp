#include "kernelscore/scores.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "kernelscore/math.hpp"

namespace kernelscore {

KernelSpec ScoreRequest::kernel_for(std::size_t d) const {
  switch (family) {
    case ScoreFamily::Crps:
      return KernelSpec::absolute_difference();
    case ScoreFamily::Energy:
      return KernelSpec::euclidean_power(d, beta);
    case ScoreFamily::Variogram:
      return KernelSpec::variogram(d, p, h);
    case ScoreFamily::InverseMultiquadric:
      return KernelSpec::inverse_multiquadric(d);
  }
  throw std::logic_error("kernel_for: unknown family");
}

TransformedKernel ScoreRequest::transformed_kernel(std::size_t d) const {
  KernelSpec base = kernel_for(d);
  switch (mode) {
    case WeightingMode::Unweighted:
      return TransformedKernel::plain(std::move(base));
    case WeightingMode::ThresholdWeighted:
      return TransformedKernel::chained(std::move(base), chaining);
    case WeightingMode::VerticallyRescaled: {
      std::vector<double> x0 = center;
      if (!base.zero_diagonal()) x0.assign(d, 0.0);  // unused by the bounded kernel
      return TransformedKernel::vertically_rescaled(std::move(base), weight, std::move(x0));
    }
    case WeightingMode::OutcomeWeighted:
    case WeightingMode::OutcomeWeightedComplemented:
      throw std::logic_error("outcome-weighted scores are not kernel scores");
  }
  throw std::logic_error("transformed_kernel: unknown mode");
}

void ScoreRequest::validate(std::size_t d) const {
  if (d == 0) throw std::invalid_argument("score request: dimension must be positive");
  if (family == ScoreFamily::Crps && d != 1)
    throw std::invalid_argument("CRPS is univariate; use the energy score for d > 1");
  kernel_for(d).validate();
  switch (mode) {
    case WeightingMode::Unweighted:
      break;
    case WeightingMode::ThresholdWeighted:
      chaining.validate();
      break;
    case WeightingMode::OutcomeWeighted:
    case WeightingMode::OutcomeWeightedComplemented:
      weight.validate();
      break;
    case WeightingMode::VerticallyRescaled:
      weight.validate();
      if (family != ScoreFamily::InverseMultiquadric && center.size() != d)
        throw std::invalid_argument("vertically re-scaled score: center must have dimension d");
      break;
  }
}

namespace {

bool outcome_mode(WeightingMode m) {
  return m == WeightingMode::OutcomeWeighted || m == WeightingMode::OutcomeWeightedComplemented;
}

bool weighted_mode(WeightingMode m) {
  return outcome_mode(m) || m == WeightingMode::VerticallyRescaled;
}

double brier(double prob, double outcome) {
  double d = prob - outcome;
  return d * d;
}

}  // namespace

void PreparedScorer::point_features(std::span<const double> x, std::span<double> out) const {
  const std::size_t d = dimension_;
  const bool unit_h = kernel_.h.empty();
  std::size_t f = 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      double hij = unit_h ? 2.0 : kernel_.h[i * d + j] + kernel_.h[j * d + i];
      out[f++] = std::sqrt(hij) * std::pow(std::abs(x[i] - x[j]), kernel_.p);
    }
  }
}

PreparedScorer::PreparedScorer(const ScoreRequest& req, const EnsembleForecast& ensemble)
    : req_(req), dimension_(ensemble.dimension()) {
  if (ensemble.empty()) throw std::invalid_argument("score: empty ensemble");
  req_.validate(dimension_);
  kernel_ = req_.kernel_for(dimension_);
  const std::size_t m = ensemble.size();
  const double mm = static_cast<double>(m);

  if (req_.mode == WeightingMode::ThresholdWeighted) {
    members_ = EnsembleForecast(m, dimension_);
    for (std::size_t i = 0; i < m; ++i)
      eval_chaining(req_.chaining, ensemble.member(i), members_.member(i));
  } else {
    members_ = ensemble;
  }

  const bool weighted = weighted_mode(req_.mode);
  if (weighted) {
    member_weight_.resize(m);
    for (std::size_t i = 0; i < m; ++i)
      member_weight_[i] = eval_weight(req_.weight, members_.member(i));
  }
  auto weight_of = [&](std::size_t i) { return weighted ? member_weight_[i] : 1.0; };
  weight_sum_ = 0.0;
  for (std::size_t i = 0; i < m; ++i) weight_sum_ += weight_of(i);
  if (outcome_mode(req_.mode)) wbar_ = weight_sum_ / mm;

  const bool vr_centered =
      req_.mode == WeightingMode::VerticallyRescaled && kernel_.zero_diagonal();

  // Pairwise sum sum_{i<j} rho(x_i, x_j) w_i w_j for the base kernel, by the
  // cheapest route available, plus the weighted diagonal for the bounded
  // kernel.
  double pair_ww = 0.0;
  double diag_w2 = 0.0;
  switch (kernel_.kind) {
    case KernelKind::AbsoluteDifference: {
      std::vector<std::size_t> order(m);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return members_.at(a, 0) < members_.at(b, 0);
      });
      sorted_x_.resize(m);
      prefix_w_.resize(m);
      prefix_wx_.resize(m);
      double w_acc = 0.0, wx_acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        double x = members_.at(order[k], 0);
        double w = weight_of(order[k]);
        pair_ww += w * (x * w_acc - wx_acc);
        w_acc += w;
        wx_acc += w * x;
        sorted_x_[k] = x;
        prefix_w_[k] = w_acc;
        prefix_wx_[k] = wx_acc;
      }
      break;
    }
    case KernelKind::Variogram: {
      n_features_ = dimension_ * (dimension_ - 1) / 2;
      features_.resize(m * n_features_);
      feature_wsum_.assign(n_features_, 0.0);
      feature_wsq_ = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        std::span<double> row(features_.data() + i * n_features_, n_features_);
        point_features(members_.member(i), row);
        double w = weight_of(i);
        double sq = 0.0;
        for (std::size_t f = 0; f < n_features_; ++f) {
          feature_wsum_[f] += w * row[f];
          sq += row[f] * row[f];
        }
        feature_wsq_ += w * sq;
      }
      // sum_{i<j} w_i w_j |psi_i - psi_j|^2 reduces to weighted moments.
      double norm_sq = 0.0;
      for (double v : feature_wsum_) norm_sq += v * v;
      pair_ww = weight_sum_ * feature_wsq_ - norm_sq;
      break;
    }
    case KernelKind::EuclideanPower:
    case KernelKind::InverseMultiquadric: {
      for (std::size_t i = 0; i < m; ++i) {
        double wi = weight_of(i);
        for (std::size_t j = i + 1; j < m; ++j)
          pair_ww +=
              wi * weight_of(j) * evaluate_base_kernel(kernel_, members_.member(i), members_.member(j));
      }
      if (!kernel_.zero_diagonal())
        for (std::size_t i = 0; i < m; ++i) diag_w2 -= weight_of(i) * weight_of(i);
      break;
    }
  }

  if (vr_centered) {
    member_center_.resize(m);
    if (kernel_.kind == KernelKind::Variogram) {
      center_features_.resize(n_features_);
      point_features(req_.center, center_features_);
    }
    center_w_sum_ = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double c;
      if (kernel_.kind == KernelKind::Variogram) {
        c = 0.0;
        for (std::size_t f = 0; f < n_features_; ++f) {
          double dlt = features_[i * n_features_ + f] - center_features_[f];
          c += dlt * dlt;
        }
      } else {
        c = evaluate_base_kernel(kernel_, members_.member(i), req_.center);
      }
      member_center_[i] = c;
      center_w_sum_ += c * member_weight_[i];
    }
    // Diagonal of the centred kernel is -2 rho(x, x0) w^2; combined with the
    // pairwise centring terms the double sum collapses to this form.
    self_term_ = (pair_ww - center_w_sum_ * weight_sum_) / (mm * mm);
    return;
  }

  self_term_ = (2.0 * pair_ww + diag_w2) / (2.0 * mm * mm);
}

double PreparedScorer::cross_weighted_sum(std::span<const double> y,
                                          std::span<const double> y_features) const {
  const std::size_t m = members_.size();
  const bool weighted = !member_weight_.empty();
  switch (kernel_.kind) {
    case KernelKind::AbsoluteDifference: {
      double value = y[0];
      auto it = std::upper_bound(sorted_x_.begin(), sorted_x_.end(), value);
      std::size_t k = static_cast<std::size_t>(it - sorted_x_.begin());
      double w_below = k > 0 ? prefix_w_[k - 1] : 0.0;
      double wx_below = k > 0 ? prefix_wx_[k - 1] : 0.0;
      double w_total = prefix_w_[m - 1];
      double wx_total = prefix_wx_[m - 1];
      return (value * w_below - wx_below) + (wx_total - wx_below) - value * (w_total - w_below);
    }
    case KernelKind::Variogram: {
      double dot = 0.0, sq = 0.0;
      for (std::size_t f = 0; f < n_features_; ++f) {
        dot += y_features[f] * feature_wsum_[f];
        sq += y_features[f] * y_features[f];
      }
      return feature_wsq_ - 2.0 * dot + sq * weight_sum_;
    }
    case KernelKind::EuclideanPower:
    case KernelKind::InverseMultiquadric: {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        double k = evaluate_base_kernel(kernel_, members_.member(i), y);
        s += weighted ? k * member_weight_[i] : k;
      }
      return s;
    }
  }
  throw std::logic_error("cross_weighted_sum: unknown kernel");
}

std::optional<double> PreparedScorer::score(std::span<const double> y) const {
  require_finite(y, "score");
  require_dimension(y, dimension_, "score");
  const double mm = static_cast<double>(members_.size());
  const double base_diag = kernel_.zero_diagonal() ? 0.0 : -1.0;

  // Deform the observation up front under threshold weighting.
  std::vector<double> vy_storage;
  std::span<const double> vy = y;
  if (req_.mode == WeightingMode::ThresholdWeighted) {
    vy_storage = eval_chaining(req_.chaining, y);
    vy = vy_storage;
  }
  std::vector<double> y_features;
  if (kernel_.kind == KernelKind::Variogram) {
    y_features.resize(n_features_);
    point_features(vy, y_features);
  }

  switch (req_.mode) {
    case WeightingMode::Unweighted:
    case WeightingMode::ThresholdWeighted:
      return cross_weighted_sum(vy, y_features) / mm - self_term_ - 0.5 * base_diag;

    case WeightingMode::OutcomeWeighted:
    case WeightingMode::OutcomeWeightedComplemented: {
      double wy = eval_weight(req_.weight, y);
      std::optional<double> ow;
      if (wbar_ > 0.0) {
        double cross = cross_weighted_sum(vy, y_features);
        ow = cross * wy / (mm * wbar_) - self_term_ * wy / (wbar_ * wbar_) -
             0.5 * base_diag * wy;
      } else if (req_.mode == WeightingMode::OutcomeWeightedComplemented && wy == 0.0) {
        ow = 0.0;  // no conditional part contributes when the event did not occur
      }
      if (req_.mode == WeightingMode::OutcomeWeighted) return ow;
      if (!ow) return std::nullopt;
      return *ow + wy * brier(wbar_, 1.0) + (1.0 - wy) * brier(wbar_, 0.0);
    }

    case WeightingMode::VerticallyRescaled: {
      double wy = eval_weight(req_.weight, y);
      if (kernel_.zero_diagonal()) {
        double ycenter;
        if (kernel_.kind == KernelKind::Variogram) {
          ycenter = 0.0;
          for (std::size_t f = 0; f < n_features_; ++f) {
            double dlt = y_features[f] - center_features_[f];
            ycenter += dlt * dlt;
          }
        } else {
          ycenter = evaluate_base_kernel(kernel_, y, req_.center);
        }
        double cross = cross_weighted_sum(vy, y_features) - center_w_sum_ - ycenter * weight_sum_;
        return wy * cross / mm - self_term_ + ycenter * wy * wy;
      }
      double cross = cross_weighted_sum(vy, y_features);
      return cross * wy / mm - self_term_ + 0.5 * wy * wy;
    }
  }
  throw std::logic_error("score: unknown mode");
}

std::optional<double> score_case(const ScoreRequest& req, const EnsembleForecast& ensemble,
                                 std::span<const double> y) {
  return PreparedScorer(req, ensemble).score(y);
}

ScoreResult score_dataset(const ScoreRequest& req, std::span<const ForecastCase> cases) {
  if (cases.empty()) throw std::invalid_argument("score_dataset: no cases");
  ScoreResult result;
  result.per_case.reserve(cases.size());
  for (const ForecastCase& c : cases)
    result.per_case.push_back(score_case(req, c.ensemble, c.observation));

  std::vector<double> defined;
  defined.reserve(cases.size());
  for (const auto& s : result.per_case)
    if (s) defined.push_back(*s);
  result.defined_count = defined.size();
  result.undefined_count = result.per_case.size() - defined.size();
  MeanStderr ms = mean_stderr(defined);
  result.mean = ms.mean;
  result.stderr_ = ms.stderr_;
  return result;
}

double quantile_twcrps(const std::vector<std::pair<double, double>>& quantiles,
                       const ChainingSpec& v, double y, std::size_t nodes) {
  if (quantiles.empty()) throw std::invalid_argument("quantile_twcrps: no quantiles");
  if (nodes == 0) throw std::invalid_argument("quantile_twcrps: no integration nodes");
  for (std::size_t i = 0; i < quantiles.size(); ++i) {
    if (!(quantiles[i].first > 0.0 && quantiles[i].first < 1.0))
      throw std::invalid_argument("quantile_twcrps: levels must lie in (0, 1)");
    if (i > 0 && !(quantiles[i].first > quantiles[i - 1].first))
      throw std::invalid_argument("quantile_twcrps: levels must be strictly increasing");
    if (i > 0 && quantiles[i].second < quantiles[i - 1].second)
      throw std::invalid_argument("quantile_twcrps: values must be non-decreasing");
  }
  const std::size_t m = quantiles.size();
  std::vector<double> vq(m);
  for (std::size_t i = 0; i < m; ++i)
    vq[i] = eval_chaining(v, std::span<const double>(&quantiles[i].second, 1))[0];
  double vy = eval_chaining(v, std::span<const double>(&y, 1))[0];

  // Midpoint rule over alpha in (0, 1); the step quantile function takes the
  // i-th value on ((i-1)/M, i/M].
  CompensatedSum sum;
  const double step = 1.0 / static_cast<double>(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    double alpha = (static_cast<double>(k) + 0.5) * step;
    auto idx = static_cast<std::size_t>(alpha * static_cast<double>(m));
    idx = std::min(idx, m - 1);
    double indicator = quantiles[idx].second >= y ? 1.0 : 0.0;
    sum.add((indicator - alpha) * (vq[idx] - vy));
  }
  return 2.0 * sum.value() * step;
}

}  // namespace kernelscore
