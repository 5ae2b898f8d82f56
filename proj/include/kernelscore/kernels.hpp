#pragma once

#include <span>
#include <vector>

#include "kernelscore/ensemble.hpp"
#include "kernelscore/weights.hpp"

namespace kernelscore {

// Conditionally negative definite kernels rho: R^d x R^d -> R. All kinds are
// symmetric; every kind except InverseMultiquadric vanishes on the diagonal.
enum class KernelKind {
  AbsoluteDifference,  // d = 1; rho(x, x') = |x - x'|
  EuclideanPower,      // rho(x, x') = ||x - x'||^beta, beta in (0, 2)
  Variogram,           // rho(x, x') = sum_ij h_ij (|x_i - x_j|^p - |x'_i - x'_j|^p)^2
  InverseMultiquadric  // rho(x, x') = -(1 + ||x - x'||^2)^(-1/2); negative definite
};

struct KernelSpec {
  KernelKind kind = KernelKind::AbsoluteDifference;
  std::size_t dimension = 1;
  double beta = 1.0;       // EuclideanPower exponent
  double p = 0.5;          // Variogram order
  std::vector<double> h;   // Variogram scaling, row-major d x d; empty = all ones

  static KernelSpec absolute_difference();
  static KernelSpec euclidean_power(std::size_t d, double beta = 1.0);
  static KernelSpec variogram(std::size_t d, double p = 0.5, std::vector<double> h = {});
  static KernelSpec inverse_multiquadric(std::size_t d);

  // Whether rho(x, x) = 0 holds for all x.
  bool zero_diagonal() const { return kind != KernelKind::InverseMultiquadric; }
  void validate() const;
};

double evaluate_base_kernel(const KernelSpec& k, std::span<const double> x,
                            std::span<const double> xp);

// A base kernel composed with one of the weighting transforms. Chaining
// deforms the inputs; centering subtracts the kernel evaluated against a
// reference point; vertical re-scaling multiplies the (centered, when the
// base vanishes on the diagonal) kernel by w(x) w(x').
enum class KernelTransform { None, Chained, VerticallyRescaled, Centered };

struct TransformedKernel {
  KernelSpec base;
  KernelTransform transform = KernelTransform::None;
  ChainingSpec chaining;        // Chained
  WeightSpec weight;            // VerticallyRescaled
  std::vector<double> center;   // VerticallyRescaled / Centered x0

  static TransformedKernel plain(KernelSpec base);
  static TransformedKernel chained(KernelSpec base, ChainingSpec v);
  static TransformedKernel vertically_rescaled(KernelSpec base, WeightSpec w,
                                               std::vector<double> x0);
  static TransformedKernel centered(KernelSpec base, std::vector<double> x0);

  void validate() const;
};

double evaluate_kernel(const TransformedKernel& k, std::span<const double> x,
                       std::span<const double> xp);

// Empirical kernel score of an ensemble against observation y:
//   (1/M) sum_m rho(x_m, y) - (1/(2 M^2)) sum_m sum_j rho(x_m, x_j) - rho(y, y) / 2.
// The final term keeps scores of bounded kernels anchored at zero for a
// perfect point forecast.
double empirical_kernel_score(const TransformedKernel& k, const EnsembleForecast& ensemble,
                              std::span<const double> y);

// Empirical energy distance between two ensembles (cross mean minus half of
// each self mean); the score divergence associated with the kernel score.
double empirical_energy_distance(const TransformedKernel& k, const EnsembleForecast& a,
                                 const EnsembleForecast& b);

}  // namespace kernelscore
