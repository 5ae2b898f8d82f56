#include "kernelscore/simstudy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "kernelscore/math.hpp"
#include "kernelscore/rng.hpp"
#include "kernelscore/verification.hpp"

namespace kernelscore {

double MixtureSpec::mixing(std::span<const double> z) const {
  if (fixed_mix) return *fixed_mix;
  double s = 0.0;
  for (double v : z) s += v;
  return normal_cdf((s - mix_mean) / mix_sd);
}

void MixtureSpec::validate() const {
  if (dimension == 0) throw std::invalid_argument("mixture: dimension must be positive");
  if (!(mix_sd > 0.0)) throw std::invalid_argument("mixture: mixing sd must be positive");
  if (!(student_dof > 2.0))
    throw std::invalid_argument("mixture: Student-t needs more than two degrees of freedom");
  if (fixed_mix && !(*fixed_mix >= 0.0 && *fixed_mix <= 1.0))
    throw std::invalid_argument("mixture: fixed mix must lie in [0, 1]");
}

namespace {

double log_normal_density(double sq_norm, std::size_t d) {
  constexpr double kLog2Pi = 1.8378770664093454836;
  return -0.5 * (static_cast<double>(d) * kLog2Pi + sq_norm);
}

double log_student_density(double sq_norm, std::size_t d, double nu) {
  double dd = static_cast<double>(d);
  double c = std::lgamma(0.5 * (nu + dd)) - std::lgamma(0.5 * nu) -
             0.5 * dd * std::log(nu * M_PI);
  return c - 0.5 * (nu + dd) * std::log1p(sq_norm / nu);
}

// Mixture distribution function in one dimension.
double mixture_cdf(const MixtureSpec& spec, MixtureSide side, double z) {
  double a = spec.mixing(std::span<const double>(&z, 1));
  if (side == MixtureSide::F2) a = 1.0 - a;
  return a * normal_cdf(z) + (1.0 - a) * student_t_cdf(z, spec.student_dof);
}

double invert_mixture_cdf(const MixtureSpec& spec, MixtureSide side, double u) {
  double lo = -1.0, hi = 1.0;
  while (mixture_cdf(spec, side, lo) > u && lo > -1e9) lo *= 2.0;
  while (mixture_cdf(spec, side, hi) < u && hi < 1e9) hi *= 2.0;
  while (hi - lo > 1e-10) {
    double mid = 0.5 * (lo + hi);
    if (mixture_cdf(spec, side, mid) < u)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

EnsembleForecast sample_mixture(const MixtureSpec& spec, MixtureSide side, std::size_t n,
                                std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw std::invalid_argument("sample_mixture: n must be positive");
  const std::size_t d = spec.dimension;
  EnsembleForecast draws(n, d);
  auto rng = make_engine(seed);

  if (d == 1) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) draws.at(i, 0) = invert_mixture_cdf(spec, side, unif(rng));
    return draws;
  }

  // Rejection sampler: target density a(z) g(z) + (1 - a(z)) h(z), proposal
  // (g + h) / 2, acceptance ratio target / (g + h) <= 1.
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::gamma_distribution<double> chi2(0.5 * spec.student_dof, 2.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> z(d);
  for (std::size_t i = 0; i < n;) {
    double scale = 1.0;
    if (unif(rng) < 0.5) scale = std::sqrt(spec.student_dof / chi2(rng));
    double sq = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      z[k] = gauss(rng) * scale;
      sq += z[k] * z[k];
    }
    double g = std::exp(log_normal_density(sq, d));
    double h = std::exp(log_student_density(sq, d, spec.student_dof));
    double a = spec.mixing(z);
    if (side == MixtureSide::F2) a = 1.0 - a;
    double accept = (a * g + (1.0 - a) * h) / (g + h);
    if (unif(rng) < accept) {
      for (std::size_t k = 0; k < d; ++k) draws.at(i, k) = z[k];
      ++i;
    }
  }
  return draws;
}

void ExperimentConfig::apply_defaults() {
  if (thresholds.empty()) {
    double lo = -1.0, hi = 2.5, step = 0.25;
    if (weight_kind == SimWeightKind::Orthant) {
      lo = -1.0;
      hi = 1.5;
    } else if (weight_kind == SimWeightKind::HalfSpaceSum) {
      lo = -2.0;
      hi = 3.0;
      step = 0.5;
    }
    for (double t = lo; t <= hi + 1e-9; t += step) thresholds.push_back(t);
  }
  if (families.empty()) {
    if (dimension == 1)
      families = {ScoreFamily::Crps, ScoreFamily::InverseMultiquadric};
    else
      families = {ScoreFamily::Energy, ScoreFamily::Variogram,
                  ScoreFamily::InverseMultiquadric};
  }
  if (variants.empty()) {
    variants = {SimVariant::Unweighted, SimVariant::ThresholdLocalising,
                SimVariant::OutcomeWeighted, SimVariant::OutcomeWeightedBrier,
                SimVariant::VerticallyRescaled};
    if (dimension > 1) variants.insert(variants.begin() + 2, SimVariant::ThresholdNonLocalising);
  }
}

void ExperimentConfig::validate() const {
  if (dimension == 0) throw std::invalid_argument("experiment: dimension must be positive");
  if (weight_kind == SimWeightKind::Univariate && dimension != 1)
    throw std::invalid_argument("experiment: univariate weight requires dimension 1");
  if (n_observations < 2) throw std::invalid_argument("experiment: need at least two observations");
  if (ensemble_size == 0) throw std::invalid_argument("experiment: empty ensembles");
  if (repetitions == 0) throw std::invalid_argument("experiment: repetitions must be positive");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("experiment: invalid level");
  for (double t : thresholds)
    if (!std::isfinite(t)) throw std::invalid_argument("experiment: non-finite threshold");
  for (SimVariant v : variants)
    if (v == SimVariant::ThresholdNonLocalising && dimension == 1)
      throw std::invalid_argument(
          "experiment: non-localising chaining is defined for d >= 2 weights only");
}

ScoreRequest make_sim_request(ScoreFamily family, SimVariant variant, SimWeightKind kind,
                              double threshold, std::size_t dimension) {
  ScoreRequest req;
  req.family = family;

  WeightSpec w;
  std::vector<double> center(dimension, threshold);
  switch (kind) {
    case SimWeightKind::Univariate:
      w = WeightSpec::above(threshold);
      break;
    case SimWeightKind::Orthant:
      w = WeightSpec::above(std::vector<double>(dimension, threshold));
      break;
    case SimWeightKind::HalfSpaceSum:
      w = WeightSpec::half_space(std::vector<double>(dimension, 1.0), threshold);
      center.assign(dimension, threshold / static_cast<double>(dimension));
      break;
  }

  switch (variant) {
    case SimVariant::Unweighted:
      req.mode = WeightingMode::Unweighted;
      break;
    case SimVariant::ThresholdLocalising:
      req.mode = WeightingMode::ThresholdWeighted;
      req.chaining = ChainingSpec::collapse_outside(w, center);
      break;
    case SimVariant::ThresholdNonLocalising:
      req.mode = WeightingMode::ThresholdWeighted;
      req.chaining = kind == SimWeightKind::HalfSpaceSum
                         ? ChainingSpec::plane_projection(threshold)
                         : ChainingSpec::componentwise_max(threshold);
      break;
    case SimVariant::OutcomeWeighted:
      req.mode = WeightingMode::OutcomeWeighted;
      req.weight = w;
      break;
    case SimVariant::OutcomeWeightedBrier:
      req.mode = WeightingMode::OutcomeWeightedComplemented;
      req.weight = w;
      break;
    case SimVariant::VerticallyRescaled:
      req.mode = WeightingMode::VerticallyRescaled;
      req.weight = w;
      req.center.assign(dimension, 0.0);
      break;
  }
  return req;
}

namespace {

enum class RepOutcome : std::uint8_t { NoDecision = 0, RejectF1 = 1, RejectF2 = 2, Dropped = 3 };

struct Slot {
  ScoreFamily family;
  SimVariant variant;
  std::size_t threshold_index;  // 0 for Unweighted (threshold-free)
};

RepOutcome evaluate_slot(const std::vector<std::optional<double>>& a,
                         const std::vector<std::optional<double>>& b, double level,
                         double undefined_limit) {
  const std::size_t n = a.size();
  std::size_t undef_a = 0, undef_b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!a[i]) ++undef_a;
    if (!b[i]) ++undef_b;
  }
  double limit = undefined_limit * static_cast<double>(n);
  if (static_cast<double>(undef_a) > limit || static_cast<double>(undef_b) > limit)
    return RepOutcome::Dropped;

  std::vector<double> da, db;
  da.reserve(n);
  db.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] && b[i]) {
      da.push_back(*a[i]);
      db.push_back(*b[i]);
    }
  }
  if (da.size() < 2) return RepOutcome::Dropped;
  DmTestResult dm = dm_test(std::span<const double>(da), std::span<const double>(db), level);
  switch (dm.direction) {
    case Direction::FavorsA:
      return RepOutcome::RejectF1;
    case Direction::FavorsB:
      return RepOutcome::RejectF2;
    case Direction::NoDecision:
      return RepOutcome::NoDecision;
  }
  return RepOutcome::NoDecision;
}

}  // namespace

std::vector<ExperimentEntry> run_experiment(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.apply_defaults();
  cfg.validate();

  MixtureSpec spec;
  spec.dimension = cfg.dimension;

  // Flatten the (family, variant, threshold) grid into slots; unweighted
  // variants occupy a single threshold-free slot.
  std::vector<Slot> slots;
  for (ScoreFamily family : cfg.families) {
    for (SimVariant variant : cfg.variants) {
      if (variant == SimVariant::Unweighted) {
        slots.push_back({family, variant, 0});
      } else {
        for (std::size_t t = 0; t < cfg.thresholds.size(); ++t)
          slots.push_back({family, variant, t});
      }
    }
  }

  std::vector<RepOutcome> outcomes(cfg.repetitions * slots.size(), RepOutcome::NoDecision);

  // Every forecast case draws its own ensemble pair, so the per-case score
  // differentials are independent with mean zero under equal performance and
  // the test keeps its nominal size. Substream indices are tied to the
  // distribution (not the slot the ensemble lands in), which makes swapping
  // the forecasts an exact mirror.
  auto run_rep = [&](std::size_t rep) {
    const std::size_t n = cfg.n_observations;
    std::uint64_t base = rep * (2 * n + 1);
    auto obs_rng = make_engine(derive_seed(cfg.seed, base));
    EnsembleForecast observations(n, cfg.dimension);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < cfg.dimension; ++k) observations.at(i, k) = gauss(obs_rng);

    std::vector<EnsembleForecast> ens1(n), ens2(n);
    for (std::size_t i = 0; i < n; ++i) {
      EnsembleForecast from_f1 =
          sample_mixture(spec, MixtureSide::F1, cfg.ensemble_size, derive_seed(cfg.seed, base + 1 + 2 * i));
      EnsembleForecast from_f2 =
          sample_mixture(spec, MixtureSide::F2, cfg.ensemble_size, derive_seed(cfg.seed, base + 2 + 2 * i));
      ens1[i] = cfg.swap_forecasts ? std::move(from_f2) : std::move(from_f1);
      ens2[i] = cfg.swap_forecasts ? std::move(from_f1) : std::move(from_f2);
    }

    std::vector<std::optional<double>> a(n), b(n);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const Slot& slot = slots[s];
      double threshold =
          slot.variant == SimVariant::Unweighted ? 0.0 : cfg.thresholds[slot.threshold_index];
      ScoreRequest req =
          make_sim_request(slot.family, slot.variant, cfg.weight_kind, threshold, cfg.dimension);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = score_case(req, ens1[i], observations.member(i));
        b[i] = score_case(req, ens2[i], observations.member(i));
      }
      outcomes[rep * slots.size() + s] =
          evaluate_slot(a, b, cfg.level, cfg.undefined_fraction_limit);
    }
  };

  unsigned n_threads = cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads;
  n_threads = std::max(1u, std::min<unsigned>(n_threads, cfg.repetitions));
  if (n_threads == 1) {
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) run_rep(rep);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t rep = t; rep < cfg.repetitions; rep += n_threads) run_rep(rep);
      });
    }
    for (auto& th : pool) th.join();
  }

  // Sequential aggregation; outcome storage is indexed by repetition, so the
  // result is independent of the thread schedule.
  std::vector<ExperimentEntry> entries;
  for (ScoreFamily family : cfg.families) {
    for (SimVariant variant : cfg.variants) {
      ExperimentEntry entry{family, variant, {}};
      entry.curve.thresholds = cfg.thresholds;
      std::size_t n_thr = cfg.thresholds.size();
      entry.curve.rate_f1.assign(n_thr, 0.0);
      entry.curve.rate_f2.assign(n_thr, 0.0);
      entry.curve.reps_used.assign(n_thr, 0);

      for (std::size_t t = 0; t < n_thr; ++t) {
        std::size_t slot_index = 0;
        bool found = false;
        for (std::size_t s = 0; s < slots.size(); ++s) {
          if (slots[s].family == family && slots[s].variant == variant &&
              (variant == SimVariant::Unweighted || slots[s].threshold_index == t)) {
            slot_index = s;
            found = true;
            break;
          }
        }
        if (!found) continue;
        std::uint64_t used = 0, f1 = 0, f2 = 0;
        for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
          RepOutcome o = outcomes[rep * slots.size() + slot_index];
          if (o == RepOutcome::Dropped) continue;
          ++used;
          if (o == RepOutcome::RejectF1) ++f1;
          if (o == RepOutcome::RejectF2) ++f2;
        }
        entry.curve.reps_used[t] = used;
        if (used > 0) {
          entry.curve.rate_f1[t] = static_cast<double>(f1) / static_cast<double>(used);
          entry.curve.rate_f2[t] = static_cast<double>(f2) / static_cast<double>(used);
        }
      }
      entries.push_back(std::move(entry));
    }
  }
  return entries;
}

}  // namespace kernelscore
