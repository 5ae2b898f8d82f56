#include "kernelscore/postproc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "kernelscore/math.hpp"
#include "kernelscore/rng.hpp"

namespace kernelscore {

double CsgdDistribution::cdf(double y) const {
  if (y < 0.0) return 0.0;
  return gamma_cdf(y + shift, shape, scale);
}

double CsgdDistribution::quantile(double tau) const {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("csgd quantile: tau must lie in (0, 1)");
  return std::max(gamma_quantile(tau, shape, scale) - shift, 0.0);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nelder-Mead simplex minimization.
struct SimplexResult {
  std::vector<double> x;
  double value = kInf;
};

template <typename F>
SimplexResult nelder_mead(const F& f, std::vector<double> start, double step, double tol,
                          std::size_t max_iter) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> pts(n + 1, start);
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  auto order = [&] {
    std::vector<std::size_t> idx(n + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<std::vector<double>> p2(n + 1);
    std::vector<double> v2(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      p2[i] = pts[idx[i]];
      v2[i] = vals[idx[i]];
    }
    pts.swap(p2);
    vals.swap(v2);
  };

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    order();
    if (std::isfinite(vals[0]) && std::isfinite(vals[n]) && vals[n] - vals[0] < tol) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> p(n);
      for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + coef * (pts[n][k] - centroid[k]);
      return p;
    };

    std::vector<double> refl = blend(-1.0);
    double frefl = f(refl);
    if (frefl < vals[0]) {
      std::vector<double> exp_ = blend(-2.0);
      double fexp = f(exp_);
      if (fexp < frefl) {
        pts[n] = std::move(exp_);
        vals[n] = fexp;
      } else {
        pts[n] = std::move(refl);
        vals[n] = frefl;
      }
      continue;
    }
    if (frefl < vals[n - 1]) {
      pts[n] = std::move(refl);
      vals[n] = frefl;
      continue;
    }
    std::vector<double> contr = blend(frefl < vals[n] ? -0.5 : 0.5);
    double fcontr = f(contr);
    if (fcontr < std::min(frefl, vals[n])) {
      pts[n] = std::move(contr);
      vals[n] = fcontr;
      continue;
    }
    // Shrink toward the best point.
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
      vals[i] = f(pts[i]);
    }
  }
  order();
  return {pts[0], vals[0]};
}

// Negative log-likelihood on the square-root coefficient scale; q holds the
// square roots of (alpha, beta, gamma, delta, xi), with delta dropped when
// the spread covariate is degenerate.
struct CsgdObjective {
  std::span<const CsgdTrainingCase> train;
  bool fit_delta = true;

  CsgdParams unpack(const std::vector<double>& q) const {
    CsgdParams p;
    p.alpha = q[0] * q[0];
    p.beta = q[1] * q[1];
    p.gamma = q[2] * q[2];
    p.delta = fit_delta ? q[3] * q[3] : 0.0;
    p.shift = fit_delta ? q[4] * q[4] : q[3] * q[3];
    return p;
  }

  double operator()(const std::vector<double>& q) const {
    CsgdParams p = unpack(q);
    double nll = 0.0;
    for (const CsgdTrainingCase& c : train) {
      double mu = p.alpha + p.beta * c.xbar;
      double sd = p.gamma + p.delta * c.s;
      if (!(mu > 0.0) || !(sd > 0.0)) return kInf;
      double shape = (mu / sd) * (mu / sd);
      double scale = sd * sd / mu;
      double ll;
      if (c.y == 0.0) {
        double mass = gamma_cdf(p.shift, shape, scale);
        if (!(mass > 0.0)) return kInf;
        ll = std::log(mass);
      } else {
        ll = gamma_log_pdf(c.y + p.shift, shape, scale);
      }
      if (!std::isfinite(ll)) return kInf;
      nll -= ll;
    }
    return nll;
  }
};

}  // namespace

CsgdParams fit_csgd(std::span<const CsgdTrainingCase> train, std::uint64_t seed) {
  if (train.size() < 20)
    throw std::invalid_argument("fit_csgd: need at least 20 training cases");
  double mean_x = 0.0, mean_y = 0.0, max_s = 0.0;
  for (const CsgdTrainingCase& c : train) {
    if (c.y < 0.0) throw std::invalid_argument("fit_csgd: negative observation");
    if (c.s < 0.0) throw std::invalid_argument("fit_csgd: negative ensemble spread");
    mean_x += c.xbar;
    mean_y += c.y;
    max_s = std::max(max_s, c.s);
  }
  mean_x /= static_cast<double>(train.size());
  mean_y /= static_cast<double>(train.size());

  CsgdObjective objective{train, max_s > 0.0};

  auto rng = make_engine(derive_seed(seed, 0x05e0));
  std::uniform_real_distribution<double> unif(0.3, 1.7);

  SimplexResult best;
  for (int restart = 0; restart < 5; ++restart) {
    double a0 = std::max(0.1, 0.3 * mean_y) * unif(rng);
    double b0 = std::max(0.1, mean_y / std::max(mean_x, 0.1)) * unif(rng);
    double g0 = std::max(0.1, 0.3 * mean_y) * unif(rng);
    double d0 = 0.5 * unif(rng);
    double x0 = 0.2 * unif(rng);
    std::vector<double> start = {std::sqrt(a0), std::sqrt(b0), std::sqrt(g0)};
    if (objective.fit_delta) start.push_back(std::sqrt(d0));
    start.push_back(std::sqrt(x0));

    SimplexResult r = nelder_mead(objective, start, 0.25, 1e-8, 4000);
    // Polish with a smaller initial step.
    r = nelder_mead(objective, r.x, 0.02, 1e-10, 4000);
    if (r.value < best.value) best = r;
  }
  if (!std::isfinite(best.value))
    throw std::runtime_error("fit_csgd: likelihood non-finite at every start");

  CsgdParams params = objective.unpack(best.x);
  params.log_likelihood = -best.value;
  return params;
}

CsgdDistribution csgd_predict(const CsgdParams& params, double xbar, double s) {
  double mu = params.alpha + params.beta * xbar;
  double sd = params.gamma + params.delta * s;
  if (!(mu > 0.0) || !(sd > 0.0))
    throw std::domain_error("csgd_predict: non-positive predicted mean or spread");
  CsgdDistribution dist;
  dist.shape = (mu / sd) * (mu / sd);
  dist.scale = sd * sd / mu;
  dist.shift = params.shift;
  return dist;
}

std::vector<double> csgd_quantiles(const CsgdDistribution& dist, std::size_t members) {
  if (members == 0) throw std::invalid_argument("csgd_quantiles: members must be positive");
  std::vector<double> q(members);
  for (std::size_t i = 0; i < members; ++i)
    q[i] = dist.quantile(static_cast<double>(i + 1) / static_cast<double>(members + 1));
  return q;
}

namespace {

// Dense Cholesky factor (lower), throws if the matrix is not positive
// definite.
std::vector<double> cholesky(const std::vector<double>& a, std::size_t d) {
  std::vector<double> l(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * d + k] * l[j * d + k];
      if (i == j) {
        if (!(s > 0.0)) throw std::invalid_argument("correlation matrix is not positive definite");
        l[i * d + i] = std::sqrt(s);
      } else {
        l[i * d + j] = s / l[j * d + j];
      }
    }
  }
  return l;
}

// Solves R x = b given the Cholesky factor of R.
std::vector<double> chol_solve(const std::vector<double>& l, std::size_t d,
                               std::span<const double> b) {
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < i; ++k) x[i] -= l[i * d + k] * x[k];
    x[i] /= l[i * d + i];
  }
  for (std::size_t i = d; i-- > 0;) {
    for (std::size_t k = i + 1; k < d; ++k) x[i] -= l[k * d + i] * x[k];
    x[i] /= l[i * d + i];
  }
  return x;
}

void validate_margins(const std::vector<std::vector<double>>& margins) {
  if (margins.empty()) throw std::invalid_argument("reorder: no margins");
  const std::size_t m = margins.front().size();
  if (m == 0) throw std::invalid_argument("reorder: empty margins");
  for (const auto& margin : margins) {
    if (margin.size() != m) throw std::invalid_argument("reorder: margins differ in length");
    if (!std::is_sorted(margin.begin(), margin.end()))
      throw std::invalid_argument("reorder: margins must be sorted ascending");
  }
}

// Ranks with ties resolved at random: sort indices by (value, random key).
std::vector<std::size_t> random_tie_ranks(std::span<const double> values, std::mt19937_64& rng) {
  const std::size_t n = values.size();
  std::vector<double> key(n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) key[i] = unif(rng);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return key[a] < key[b];
  });
  std::vector<std::size_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[idx[r]] = r;
  return rank;
}

ReorderedEnsemble gaussian_grid_reorder(const CopulaPlan& plan,
                                        const std::vector<std::vector<double>>& margins,
                                        std::mt19937_64& rng) {
  const std::size_t d = margins.size();
  const std::size_t m = margins.front().size();
  if (plan.correlation.size() != d * d)
    throw std::invalid_argument("reorder: correlation matrix must be d x d");
  for (std::size_t i = 0; i < d; ++i) {
    if (std::abs(plan.correlation[i * d + i] - 1.0) > 1e-12)
      throw std::invalid_argument("reorder: correlation matrix must have unit diagonal");
    for (std::size_t j = 0; j < d; ++j)
      if (std::abs(plan.correlation[i * d + j] - plan.correlation[j * d + i]) > 1e-12)
        throw std::invalid_argument("reorder: correlation matrix must be symmetric");
  }
  std::vector<double> chol = cholesky(plan.correlation, d);

  double combos_d = std::pow(static_cast<double>(m), static_cast<double>(d));
  if (combos_d > static_cast<double>(plan.grid_cap))
    throw std::invalid_argument(
        "reorder: quantile grid of size M^d exceeds the cap; reduce the ensemble size for "
        "Simulate mode or avoid Weight mode at this dimension");
  const std::size_t combos = static_cast<std::size_t>(combos_d);

  // Normal scores of the equidistant quantile levels.
  std::vector<double> z(m);
  for (std::size_t i = 0; i < m; ++i)
    z[i] = normal_quantile(static_cast<double>(i + 1) / static_cast<double>(m + 1));

  // Copula density at each grid combination, up to a constant factor:
  // exp(-0.5 z' (R^{-1} - I) z). Constants cancel in both modes.
  std::vector<double> density(combos);
  std::vector<std::size_t> levels(d);
  std::vector<double> zv(d);
  for (std::size_t c = 0; c < combos; ++c) {
    std::size_t rem = c;
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      levels[j] = rem % m;
      rem /= m;
      zv[j] = z[levels[j]];
      sq += zv[j] * zv[j];
    }
    std::vector<double> solved = chol_solve(chol, d, zv);
    double quad = 0.0;
    for (std::size_t j = 0; j < d; ++j) quad += zv[j] * solved[j];
    density[c] = std::exp(-0.5 * (quad - sq));
  }

  auto combo_levels = [&](std::size_t c, std::vector<std::size_t>& out) {
    std::size_t rem = c;
    for (std::size_t j = 0; j < d; ++j) {
      out[j] = rem % m;
      rem /= m;
    }
  };

  ReorderedEnsemble result;
  if (plan.mode == GridMode::Weight) {
    result.members = EnsembleForecast(combos, d);
    result.weights.resize(combos);
    double total = 0.0;
    for (double w : density) total += w;
    for (std::size_t c = 0; c < combos; ++c) {
      combo_levels(c, levels);
      for (std::size_t j = 0; j < d; ++j) result.members.at(c, j) = margins[j][levels[j]];
      result.weights[c] = density[c] / total;
    }
    return result;
  }

  // Sequential simulation: draw a combination with probability proportional
  // to the remaining densities, then retire every combination sharing a
  // level with it in any dimension.
  result.members = EnsembleForecast(m, d);
  std::vector<bool> active(combos, true);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::size_t> other(d);
  for (std::size_t draw = 0; draw < m; ++draw) {
    double total = 0.0;
    for (std::size_t c = 0; c < combos; ++c)
      if (active[c]) total += density[c];
    if (!(total > 0.0)) throw std::runtime_error("reorder: copula density vanished on the grid");
    double u = unif(rng) * total;
    std::size_t chosen = combos;
    double acc = 0.0;
    for (std::size_t c = 0; c < combos; ++c) {
      if (!active[c]) continue;
      acc += density[c];
      if (u <= acc) {
        chosen = c;
        break;
      }
    }
    if (chosen == combos) {
      for (std::size_t c = combos; c-- > 0;) {
        if (active[c]) {
          chosen = c;
          break;
        }
      }
    }
    combo_levels(chosen, levels);
    for (std::size_t j = 0; j < d; ++j) result.members.at(draw, j) = margins[j][levels[j]];
    for (std::size_t c = 0; c < combos; ++c) {
      if (!active[c]) continue;
      combo_levels(c, other);
      for (std::size_t j = 0; j < d; ++j) {
        if (other[j] == levels[j]) {
          active[c] = false;
          break;
        }
      }
    }
  }
  return result;
}

}  // namespace

ReorderedEnsemble reorder(const CopulaPlan& plan,
                          const std::vector<std::vector<double>>& margins, std::uint64_t seed) {
  validate_margins(margins);
  const std::size_t d = margins.size();
  const std::size_t m = margins.front().size();
  auto rng = make_engine(derive_seed(seed, 0xc0b));

  ReorderedEnsemble result;
  switch (plan.kind) {
    case CopulaKind::Independence: {
      result.members = EnsembleForecast(m, d);
      std::vector<std::size_t> perm(m);
      for (std::size_t j = 0; j < d; ++j) {
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t i = 0; i < m; ++i) result.members.at(i, j) = margins[j][perm[i]];
      }
      return result;
    }
    case CopulaKind::Comonotonic: {
      result.members = EnsembleForecast(m, d);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < d; ++j) result.members.at(i, j) = margins[j][i];
      return result;
    }
    case CopulaKind::Ecc: {
      const EnsembleForecast& tpl = plan.template_ensemble;
      if (tpl.size() != m || tpl.dimension() != d)
        throw std::invalid_argument("reorder: ECC template must be M x d");
      result.members = EnsembleForecast(m, d);
      std::vector<double> column(m);
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t i = 0; i < m; ++i) column[i] = tpl.at(i, j);
        std::vector<std::size_t> rank = random_tie_ranks(column, rng);
        for (std::size_t i = 0; i < m; ++i) result.members.at(i, j) = margins[j][rank[i]];
      }
      return result;
    }
    case CopulaKind::GaussianGrid:
      return gaussian_grid_reorder(plan, margins, rng);
  }
  throw std::logic_error("reorder: unknown copula kind");
}

std::vector<double> estimate_correlation(const std::vector<std::vector<double>>& observations) {
  if (observations.size() < 3)
    throw std::invalid_argument("estimate_correlation: need at least three observations");
  const std::size_t n = observations.size();
  const std::size_t d = observations.front().size();
  for (const auto& row : observations)
    if (row.size() != d)
      throw std::invalid_argument("estimate_correlation: inconsistent dimensions");

  // Average ranks per dimension (midranks for ties).
  std::vector<std::vector<double>> ranks(d, std::vector<double>(n));
  std::vector<std::size_t> idx(n);
  for (std::size_t j = 0; j < d; ++j) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return observations[a][j] < observations[b][j];
    });
    std::size_t i = 0;
    while (i < n) {
      std::size_t k = i;
      while (k + 1 < n && observations[idx[k + 1]][j] == observations[idx[i]][j]) ++k;
      double mid = 0.5 * static_cast<double>(i + k) + 1.0;
      for (std::size_t r = i; r <= k; ++r) ranks[j][idx[r]] = mid;
      i = k + 1;
    }
  }

  auto spearman = [&](std::size_t a, std::size_t b) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      ma += ranks[a][i];
      mb += ranks[b][i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double da = ranks[a][i] - ma, db = ranks[b][i] - mb;
      sab += da * db;
      saa += da * da;
      sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;
    return sab / std::sqrt(saa * sbb);
  };

  std::vector<double> corr(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    corr[i * d + i] = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) {
      double rs = spearman(i, j);
      double rho = 2.0 * std::sin(M_PI * rs / 6.0);
      corr[i * d + j] = corr[j * d + i] = rho;
    }
  }

  // Shrink toward the identity until positive definite.
  for (double lambda = 0.0; lambda <= 1.0; lambda += 1e-3) {
    std::vector<double> shrunk(corr);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        if (i != j) shrunk[i * d + j] *= (1.0 - lambda);
    try {
      cholesky(shrunk, d);
      return shrunk;
    } catch (const std::invalid_argument&) {
      continue;
    }
  }
  throw std::runtime_error("estimate_correlation: could not reach a positive definite matrix");
}

}  // namespace kernelscore
