#pragma once

#include "singdet/common.hpp"

#include <vector>

namespace singdet {

/// n x D cloud of finite coordinates, n >= 1, D >= 1.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(Points coords);

  Index size() const { return coords_.rows(); }
  Index dim() const { return coords_.cols(); }
  const Points& coords() const { return coords_; }
  auto row(Index i) const { return coords_.row(i); }

 private:
  Points coords_;
};

/// Points around a query, translated to the query and divided by `scale`.
struct Neighborhood {
  Index center_index = 0;
  std::vector<Index> members;  ///< center excluded
  Points rescaled;             ///< members.size() x D, row norms <= 1
  double scale = 0.0;

  Index size() const { return static_cast<Index>(members.size()); }
};

/// Smallest neighborhood the uniformity test will score.
inline constexpr Index kMinNeighborhoodSize = 10;

/// All j != i with |x_j - x_i| < r, in index order.
Neighborhood neighbors_radius(const PointCloud& cloud, Index i, double r);

/// The k nearest points to x_i (ties go to the lower index); scale is the
/// distance to the k-th one.
Neighborhood neighbors_knn(const PointCloud& cloud, Index i, Index k);

/// Uncentered second moment (1/k) sum_j x_j x_j^T.
Eigen::MatrixXd second_moment(const Eigen::Ref<const Points>& points);

/// Smallest m with (l_1 + ... + l_m) >= eta * (l_1 + ... + l_D), for
/// descending eigenvalues. Throws InputError("degenerate neighborhood") when
/// all eigenvalues vanish.
int estimate_dim(const Eigen::Ref<const Eigen::VectorXd>& eigenvalues, double eta);

struct PcaResult {
  Eigen::VectorXd eigenvalues;  ///< descending, length min(k, D)
  Eigen::MatrixXd basis;        ///< D x d_hat, orthonormal columns
  int d_hat = 0;
};

/// Principal directions of the uncentered second moment. Uses the k x k Gram
/// matrix when there are fewer points than ambient dimensions, so the cost is
/// linear in D for fixed k.
PcaResult local_pca(const Eigen::Ref<const Points>& points, double eta);

/// Coordinates of the rescaled neighborhood in the top-d_hat principal basis.
Points project(const Neighborhood& neighborhood, const PcaResult& pca);

/// Sorted distances from x_i to every other point, paired with indices.
std::vector<std::pair<double, Index>> sorted_distances(const PointCloud& cloud, Index i);

}  // namespace singdet
