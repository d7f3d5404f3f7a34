#include "singdet/kernel_mmd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace singdet {

namespace {

constexpr double kNormTolerance = 1e-6;
constexpr double kInnerTolerance = 1e-9;
constexpr double kNegativeClamp = -1e-12;

// Series sums for E k(X,X) and E k(X,Y) run until terms stop mattering.
constexpr int kMaxSeriesTerms = 100000;
constexpr double kSeriesRelTol = 1e-17;

}  // namespace

PowerSeriesKernel::PowerSeriesKernel(KernelKind kind, double param, int order)
    : kind_(kind), param_(param), order_(order) {
  if (order < 0) throw InputError("kernel truncation order must be nonnegative");
  if (!std::isfinite(param)) throw InputError("kernel parameter must be finite");
  if (kind == KernelKind::Geometric && !(param >= 0.0 && param < 1.0))
    throw InputError("geometric kernel requires alpha in [0, 1)");
  if (kind == KernelKind::ExpDot && !(param > 0.0))
    throw InputError("exp-dot kernel requires gamma > 0");
}

PowerSeriesKernel PowerSeriesKernel::geometric(double alpha, int order) {
  return PowerSeriesKernel(KernelKind::Geometric, alpha, order);
}

PowerSeriesKernel PowerSeriesKernel::exp_dot(double gamma, int order) {
  return PowerSeriesKernel(KernelKind::ExpDot, gamma, order);
}

PowerSeriesKernel PowerSeriesKernel::with_order(int order) const {
  return PowerSeriesKernel(kind_, param_, order);
}

double PowerSeriesKernel::coefficient(int k) const {
  if (k == 0) return 1.0;
  if (param_ == 0.0) return 0.0;
  switch (kind_) {
    case KernelKind::Geometric:
      return std::pow(param_, k);
    case KernelKind::ExpDot:
      return std::exp(k * std::log(param_) - std::lgamma(k + 1.0));
  }
  return 0.0;
}

double PowerSeriesKernel::closed_form(double t) const {
  switch (kind_) {
    case KernelKind::Geometric:
      return 1.0 / (1.0 - param_ * t);
    case KernelKind::ExpDot:
      return std::exp(param_ * t);
  }
  return 0.0;
}

std::string PowerSeriesKernel::fingerprint() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%.6f", kind_ == KernelKind::Geometric ? "geom" : "exp",
                param_);
  return buf;
}

double beta_coeff(int d, int k) {
  const double half_d = 0.5 * d;
  return std::exp(std::lgamma(half_d + 1.0) + std::lgamma(k + 0.5) -
                  std::lgamma(k + half_d + 1.0) - 0.5 * std::log(M_PI));
}

double kernel_eval(double t, const PowerSeriesKernel& kernel) {
  if (!std::isfinite(t)) throw InputError("kernel_eval: non-finite inner product");
  if (std::abs(t) > 1.0 + kInnerTolerance)
    throw InputError("kernel_eval: inner product outside [-1, 1]");
  return kernel.closed_form(std::clamp(t, -1.0, 1.0));
}

double disk_series_term(const Eigen::Ref<const Eigen::VectorXd>& sq_norms, int d,
                        const PowerSeriesKernel& kernel) {
  const Index n = sq_norms.size();
  Eigen::VectorXd powers = Eigen::VectorXd::Ones(n);
  double total = 0.0;
  for (int k = 0; k <= kernel.truncation_order(); ++k) {
    const double a = kernel.coefficient(2 * k);
    if (k > 0) powers = powers.cwiseProduct(sq_norms);
    if (a == 0.0) continue;
    const double mean_pow = powers.sum() / static_cast<double>(n);
    total += a * beta_coeff(d, k) * (static_cast<double>(d) / (d + 2.0 * k) - 2.0 * mean_pow);
  }
  return total;
}

double mmd_sq_vs_uniform_disk(const Eigen::Ref<const Points>& points,
                              const PowerSeriesKernel& kernel) {
  const Index n = points.rows();
  const Index d = points.cols();
  if (n == 0) throw InputError("empty sample");
  if (d == 0) throw InputError("mmd: zero-dimensional points");

  const Eigen::VectorXd sq_norms = points.rowwise().squaredNorm();
  const double limit = (1.0 + kNormTolerance) * (1.0 + kNormTolerance);
  for (Index i = 0; i < n; ++i) {
    if (!std::isfinite(sq_norms[i])) throw InputError("mmd: non-finite point");
    if (sq_norms[i] > limit) throw InputError("points not rescaled");
  }

  // Column blocks of the Gram matrix keep memory at O(n * block).
  constexpr Index kBlock = 256;
  double off_diag = 0.0;
  double diag = 0.0;
  Eigen::MatrixXd gram;
  for (Index j0 = 0; j0 < n; j0 += kBlock) {
    const Index w = std::min(kBlock, n - j0);
    gram.noalias() = points.middleRows(j0, n - j0) * points.middleRows(j0, w).transpose();
    for (Index jj = 0; jj < w; ++jj) {
      diag += kernel.closed_form(std::clamp(gram(jj, jj), -1.0, 1.0));
      for (Index ii = jj + 1; ii < gram.rows(); ++ii)
        off_diag += kernel.closed_form(std::clamp(gram(ii, jj), -1.0, 1.0));
    }
  }
  const double nn = static_cast<double>(n) * static_cast<double>(n);
  const double value = (diag + 2.0 * off_diag) / nn +
                       disk_series_term(sq_norms, static_cast<int>(d), kernel);
  if (value >= 0.0) return value;
  if (value > kNegativeClamp) return 0.0;
  throw ConsistencyError("mmd: closed form returned " + std::to_string(value));
}

double uniform_pair_mean(const PowerSeriesKernel& kernel, int d) {
  double total = 0.0;
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    const double a = kernel.coefficient(2 * k);
    const double term = a * beta_coeff(d, k) * d / (d + 2.0 * k);
    total += term;
    if (k > 0 && term <= kSeriesRelTol * total) break;
  }
  return total;
}

double uniform_diagonal_mean(const PowerSeriesKernel& kernel, int d) {
  // E|X|^{2k} = d / (d + 2k) for X uniform on the unit d-disk.
  double total = 0.0;
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    const double term = kernel.coefficient(k) * d / (d + 2.0 * k);
    total += term;
    if (k > 0 && term <= kSeriesRelTol * total) break;
  }
  return total;
}

double expected_mmd_sq(const PowerSeriesKernel& kernel, int d, int n) {
  if (d < 1 || n < 1) throw InputError("expected_mmd_sq: d and n must be positive");
  const double gap = uniform_diagonal_mean(kernel, d) - uniform_pair_mean(kernel, d);
  return std::max(gap, 0.0) / n;
}

}  // namespace singdet
