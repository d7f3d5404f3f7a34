#pragma once

#include "singdet/scoring.hpp"
#include "singdet/uniformity.hpp"

#include <string>
#include <vector>

namespace singdet {

/// Levina-Bickel MLE of intrinsic dimension from the k nearest neighbour
/// distances of x_i: [ (1/(k-2)) sum_{j<k} log(T_k / T_j) ]^-1.
double levina_bickel_dim(const PointCloud& cloud, Index i, Index k);

/// Same estimator over a precomputed ascending list of neighbour distances.
double levina_bickel_from_distances(std::span<const double> sorted_dists, Index k);

struct LocalScale {
  double r_tilde = 0.0;
  double r_min = 0.0;  ///< 1.5 r_tilde
  double r_max = 0.0;  ///< 5 r_tilde
  Index k_star = 0;
  double dimension = 0.0;           ///< averaged estimate at k_star
  std::vector<Index> ladder;        ///< neighbourhood sizes probed
  std::vector<double> mean_curve;   ///< averaged estimate per ladder rung
};

/// Grows neighbourhoods over a doubling ladder of k at random probe points,
/// averages the dimension curves and takes the knee found walking back from
/// the largest neighbourhood. r_tilde is the mean distance to the k*-th
/// neighbour over the probes.
LocalScale local_scale(const PointCloud& cloud, int n_probes, std::uint64_t seed);

struct SearchGrid {
  std::vector<double> radii;
  std::vector<double> etas{0.7, 0.8, 0.9};
  std::vector<double> alphas{0.3, 0.5, 0.7};
  double r_lower = 0.0;  ///< hard limits for radius expansion
  double r_upper = 0.0;
  int volume_dim = 1;    ///< d in the volume coordinate r^d
};

/// Four radii equally spaced in r^d across [1.5 r_tilde, 5 r_tilde], the
/// default eta / alpha axes and expansion bounds [r_tilde, 10 r_tilde].
SearchGrid default_grid(const LocalScale& scale);

/// n radii equally spaced in r^d over [lo, hi].
std::vector<double> volume_spaced_radii(double lo, double hi, int d, int n);

struct ConfigRow {
  double r = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  double dispersion = 0.0;
  Index n_singular = 0;
  bool warn_degenerate = false;  ///< labelling with no singular points
  bool failed = false;
  std::string error;
};

struct GridSearchOptions {
  Index k_disp = 20;
  double alpha_reg = -1.0;  ///< negative: n / 4
  double subsample_fraction = 1.0;
  std::uint64_t seed = 0;
  int max_expansions = 8;
};

struct GridSearchResult {
  Hyperparams best;
  ConfigRow best_row;
  std::vector<UniformityResult> best_results;
  Labels best_labels;
  std::vector<ConfigRow> report;  ///< one row per evaluated configuration
  int expansions = 0;
};

/// Scores, filters and evaluates the dispersion of every configuration and
/// returns the minimizer (ties: smaller r, then eta, then alpha). A winner on
/// the radius boundary extends the radius axis in equal steps of r^d and the
/// search repeats until the winner is interior or the bounds are reached.
GridSearchResult grid_search(const PointCloud& cloud, const SearchGrid& grid, NullCache& nulls,
                             const GridSearchOptions& options = {});

/// CSV with header r,eta,alpha,dispersion,n_singular,warn_degenerate.
std::string report_csv(const std::vector<ConfigRow>& rows);

}  // namespace singdet
