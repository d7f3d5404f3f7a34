#include "singdet/local_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace singdet {

PointCloud::PointCloud(Points coords) : coords_(std::move(coords)) {
  if (coords_.rows() < 1 || coords_.cols() < 1)
    throw InputError("point cloud needs at least one point and one coordinate");
  if (!coords_.allFinite()) throw InputError("point cloud has non-finite coordinates");
}

namespace {

Neighborhood make_neighborhood(const PointCloud& cloud, Index i, std::vector<Index> members,
                               double scale) {
  Neighborhood nb;
  nb.center_index = i;
  nb.scale = scale;
  nb.rescaled.resize(static_cast<Index>(members.size()), cloud.dim());
  const double inv = scale > 0.0 ? 1.0 / scale : 0.0;
  for (Index m = 0; m < static_cast<Index>(members.size()); ++m)
    nb.rescaled.row(m) = (cloud.row(members[m]) - cloud.row(i)) * inv;
  nb.members = std::move(members);
  return nb;
}

void check_index(const PointCloud& cloud, Index i) {
  if (i < 0 || i >= cloud.size()) throw InputError("point index out of range");
}

}  // namespace

Neighborhood neighbors_radius(const PointCloud& cloud, Index i, double r) {
  check_index(cloud, i);
  if (!(r > 0.0)) throw InputError("neighborhood radius must be positive");
  const auto& x = cloud.coords();
  const double r2 = r * r;
  std::vector<Index> members;
  for (Index j = 0; j < cloud.size(); ++j) {
    if (j == i) continue;
    if ((x.row(j) - x.row(i)).squaredNorm() < r2) members.push_back(j);
  }
  return make_neighborhood(cloud, i, std::move(members), r);
}

std::vector<std::pair<double, Index>> sorted_distances(const PointCloud& cloud, Index i) {
  check_index(cloud, i);
  const auto& x = cloud.coords();
  std::vector<std::pair<double, Index>> d;
  d.reserve(static_cast<std::size_t>(cloud.size() - 1));
  for (Index j = 0; j < cloud.size(); ++j)
    if (j != i) d.emplace_back((x.row(j) - x.row(i)).norm(), j);
  std::sort(d.begin(), d.end());
  return d;
}

Neighborhood neighbors_knn(const PointCloud& cloud, Index i, Index k) {
  check_index(cloud, i);
  if (k < 1) throw InputError("knn: k must be positive");
  if (k >= cloud.size()) throw InputError("knn: k must be smaller than the number of points");
  const auto& x = cloud.coords();
  std::vector<std::pair<double, Index>> d;
  d.reserve(static_cast<std::size_t>(cloud.size() - 1));
  for (Index j = 0; j < cloud.size(); ++j)
    if (j != i) d.emplace_back((x.row(j) - x.row(i)).squaredNorm(), j);
  std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
  std::sort(d.begin(), d.begin() + k);
  std::vector<Index> members;
  members.reserve(static_cast<std::size_t>(k));
  for (Index m = 0; m < k; ++m) members.push_back(d[m].second);
  const double scale = std::sqrt(d[k - 1].first);
  Neighborhood nb = make_neighborhood(cloud, i, std::move(members), scale);
  // The farthest member sits exactly on the unit sphere.
  if (scale > 0.0) nb.rescaled.row(k - 1).normalize();
  return nb;
}

Eigen::MatrixXd second_moment(const Eigen::Ref<const Points>& points) {
  if (points.rows() < 1) throw InputError("second_moment: no points");
  Eigen::MatrixXd m = points.transpose() * points;
  return m / static_cast<double>(points.rows());
}

int estimate_dim(const Eigen::Ref<const Eigen::VectorXd>& eigenvalues, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw InputError("eta must lie in (0, 1)");
  const double total = eigenvalues.cwiseMax(0.0).sum();
  if (!(total > 0.0)) throw InputError("degenerate neighborhood");
  const double target = eta * total * (1.0 - 1e-12);
  double acc = 0.0;
  for (Index m = 0; m < eigenvalues.size(); ++m) {
    acc += std::max(eigenvalues[m], 0.0);
    if (acc >= target) return static_cast<int>(m + 1);
  }
  return static_cast<int>(eigenvalues.size());
}

PcaResult local_pca(const Eigen::Ref<const Points>& points, double eta) {
  const Index k = points.rows();
  const Index dim = points.cols();
  if (k < 1) throw InputError("local_pca: no points");
  PcaResult out;

  if (k < dim) {
    // Nonzero spectrum of X^T X / k equals that of X X^T / k.
    const Eigen::MatrixXd gram = points * points.transpose() / static_cast<double>(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    out.eigenvalues = es.eigenvalues().reverse().cwiseMax(0.0);
    out.d_hat = estimate_dim(out.eigenvalues, eta);
    out.basis.resize(dim, out.d_hat);
    for (int c = 0; c < out.d_hat; ++c) {
      const Eigen::VectorXd v = es.eigenvectors().col(k - 1 - c);
      Eigen::VectorXd u = points.transpose() * v;
      out.basis.col(c) = u / u.norm();
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(second_moment(points));
    out.eigenvalues = es.eigenvalues().reverse().cwiseMax(0.0);
    out.d_hat = estimate_dim(out.eigenvalues, eta);
    out.basis = es.eigenvectors().rowwise().reverse().leftCols(out.d_hat);
  }
  return out;
}

Points project(const Neighborhood& neighborhood, const PcaResult& pca) {
  if (pca.basis.rows() != neighborhood.rescaled.cols())
    throw InputError("project: basis does not match neighborhood dimension");
  return neighborhood.rescaled * pca.basis;
}

}  // namespace singdet
