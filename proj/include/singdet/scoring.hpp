#pragma once

#include "singdet/common.hpp"
#include "singdet/local_geometry.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace singdet {

using Labels = std::vector<std::uint8_t>;
using NeighborSets = std::vector<std::vector<Index>>;

/// log(1/p) elementwise; missing stays missing.
std::vector<std::optional<double>> log_inv_p(std::span<const std::optional<double>> p_values);

struct KdeCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

/// Gaussian KDE with Silverman's bandwidth 1.06 sigma n^(-1/5), evaluated on
/// grid_size equispaced points over [min - h, max + h].
KdeCurve kde_density(std::span<const double> values, int grid_size = 512);

enum class KneeShape { ConcaveInc, ConcaveDec, ConvexInc, ConvexDec };

/// Kneedle: normalize both axes to [0, 1], take the difference curve against
/// the chord for the given shape, and accept a local maximum as a knee when the
/// curve later falls below max - sensitivity * mean(dx). Returns the x of the
/// accepted knee with the largest difference.
std::optional<double> knee_detect(std::span<const double> xs, std::span<const double> ys,
                                  double sensitivity, KneeShape shape);

struct FilterOptions {
  int grid_size = 512;
  double sensitivity = 1.0;
};

/// Labels 1 the points whose log(1/p) lies beyond the knee of the decreasing
/// flank of its density. Missing p-values get label 0.
Labels filter_labels(std::span<const std::optional<double>> p_values, const FilterOptions& options = {});

/// Mann-Whitney AUC: P(score_1 > score_0) + P(tie) / 2.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Each point's k nearest points, itself included (ties to the lower index).
NeighborSets knn_sets(const PointCloud& cloud, Index k);

std::vector<double> purity(const Labels& labels, const NeighborSets& sets);

/// Separation score for every i with label 1; empty for label 0.
std::vector<std::optional<double>> separation(const PointCloud& cloud, const Labels& labels,
                                              const NeighborSets& sets);

/// (max(0, (t - a) / (1 - a)))^b
struct DampingFunction {
  double a = 0.0;
  double b = 1.0;

  DampingFunction() = default;
  DampingFunction(double a, double b);
  double operator()(double t) const;
};

struct DispersionReport {
  Labels labels;
  double global_purity = 0.0;
  std::vector<double> purity;
  std::vector<std::optional<double>> separation;
  std::vector<std::optional<double>> q;
  double dispersion = 0.0;
};

DispersionReport dispersion(const PointCloud& cloud, const Labels& labels, const NeighborSets& sets,
                            double alpha_reg, DampingFunction d1 = {0.0, 2.0},
                            DampingFunction d2 = {0.5, 5.0});

}  // namespace singdet
