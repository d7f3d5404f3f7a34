#pragma once

#include "singdet/common.hpp"

#include <string>

namespace singdet {

enum class KernelKind { Geometric, ExpDot };

/// Dot-product kernel k(x, y) = sum_k a_k <x, y>^k with nonnegative coefficients.
///
/// Geometric: a_k = alpha^k, closed form 1 / (1 - alpha t), alpha in [0, 1).
/// ExpDot:    a_k = gamma^k / k!, closed form exp(gamma t), gamma > 0.
///
/// The truncation order bounds the uniform-disk series in the closed-form MMD;
/// kernel evaluation itself always uses the exact closed form.
class PowerSeriesKernel {
 public:
  static constexpr int kDefaultOrder = 32;

  static PowerSeriesKernel geometric(double alpha, int order = kDefaultOrder);
  static PowerSeriesKernel exp_dot(double gamma, int order = kDefaultOrder);

  KernelKind kind() const { return kind_; }
  double parameter() const { return param_; }
  int truncation_order() const { return order_; }

  /// a_k
  double coefficient(int k) const;

  /// Closed form at an inner product already known to lie in [-1, 1].
  double closed_form(double inner) const;

  /// Short stable name, e.g. "geom0.500000".
  std::string fingerprint() const;

  PowerSeriesKernel with_order(int order) const;

  bool operator==(const PowerSeriesKernel&) const = default;

 private:
  PowerSeriesKernel(KernelKind kind, double param, int order);

  KernelKind kind_;
  double param_;
  int order_;
};

/// Gamma-ratio coefficient (1/sqrt(pi)) G(d/2+1) G(k+1/2) / G(k+d/2+1), via lgamma.
double beta_coeff(int d, int k);

/// Kernel value at an inner product; inputs within 1e-9 of [-1, 1] are clamped.
double kernel_eval(double inner_product, const PowerSeriesKernel& kernel);

/// sum_{k=0}^{K} a_{2k} beta_{d,k} (d/(d+2k) - (2/n) sum_i |x_i|^{2k}), the
/// uniform-disk part of the closed form. `sq_norms` are |x_i|^2.
double disk_series_term(const Eigen::Ref<const Eigen::VectorXd>& sq_norms, int d,
                        const PowerSeriesKernel& kernel);

/// Squared MMD between the empirical measure of `points` (rows, norms <= 1)
/// and the uniform distribution on the unit disk of dimension points.cols().
double mmd_sq_vs_uniform_disk(const Eigen::Ref<const Points>& points,
                              const PowerSeriesKernel& kernel);

/// E k(X, Y) for X, Y independent uniform on the unit d-disk.
double uniform_pair_mean(const PowerSeriesKernel& kernel, int d);

/// E k(X, X) for X uniform on the unit d-disk.
double uniform_diagonal_mean(const PowerSeriesKernel& kernel, int d);

/// Expected squared MMD of an i.i.d. size-n sample from the unit d-disk.
double expected_mmd_sq(const PowerSeriesKernel& kernel, int d, int n);

}  // namespace singdet
