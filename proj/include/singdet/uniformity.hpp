#pragma once

#include "singdet/kernel_mmd.hpp"
#include "singdet/local_geometry.hpp"
#include "singdet/null_dist.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace singdet {

struct RadiusNeighborhood {
  double r = 0.0;
};
struct KnnNeighborhood {
  Index k = 0;
};
using NeighborhoodRule = std::variant<RadiusNeighborhood, KnnNeighborhood>;

struct Hyperparams {
  NeighborhoodRule neighborhood = RadiusNeighborhood{0.1};
  double eta = 0.8;
  PowerSeriesKernel kernel = PowerSeriesKernel::geometric(0.5);

  void validate() const;
};

/// Per-point outcome. The optional fields are all empty exactly when the
/// neighborhood held fewer than kMinNeighborhoodSize points.
struct UniformityResult {
  Index index = 0;
  Index k_obs = 0;
  std::optional<int> d_hat;
  std::optional<double> mmd;
  std::optional<double> p_value;

  bool scored() const { return p_value.has_value(); }
};

Neighborhood isolate(const PointCloud& cloud, Index i, const NeighborhoodRule& rule);

/// Isolate, rescale, estimate dimension, project, score against the unit
/// d_hat-disk and convert to a p-value with the matching null table.
UniformityResult uniformity_test(const PointCloud& cloud, Index i, const Hyperparams& params,
                                 NullCache& nulls);

/// Scores a seeded subsample of the points (all of them when fraction == 1);
/// every unscored point takes the result of its nearest scored point.
std::vector<UniformityResult> singularity_scores(const PointCloud& cloud, const Hyperparams& params,
                                                 NullCache& nulls, double subsample_fraction = 1.0,
                                                 std::uint64_t seed = 0);

/// p-value column of a result list.
std::vector<std::optional<double>> p_values_of(const std::vector<UniformityResult>& results);

}  // namespace singdet
