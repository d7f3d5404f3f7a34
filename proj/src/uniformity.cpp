#include "singdet/uniformity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace singdet {

void Hyperparams::validate() const {
  if (!(eta > 0.0 && eta < 1.0)) throw InputError("eta must lie in (0, 1)");
  if (const auto* rad = std::get_if<RadiusNeighborhood>(&neighborhood)) {
    if (!(rad->r > 0.0) || !std::isfinite(rad->r)) throw InputError("radius must be positive");
  } else if (std::get<KnnNeighborhood>(neighborhood).k < 1) {
    throw InputError("knn: k must be positive");
  }
}

Neighborhood isolate(const PointCloud& cloud, Index i, const NeighborhoodRule& rule) {
  if (const auto* rad = std::get_if<RadiusNeighborhood>(&rule)) return neighbors_radius(cloud, i, rad->r);
  return neighbors_knn(cloud, i, std::get<KnnNeighborhood>(rule).k);
}

UniformityResult uniformity_test(const PointCloud& cloud, Index i, const Hyperparams& params,
                                 NullCache& nulls) {
  UniformityResult result;
  result.index = i;
  const Neighborhood nb = isolate(cloud, i, params.neighborhood);
  result.k_obs = nb.size();
  if (nb.size() < kMinNeighborhoodSize) return result;

  Points projected;
  int d_hat = 1;
  if (nb.rescaled.isZero(0.0)) {
    // Every member coincides with the query: a point mass at the disk centre.
    projected = Points::Zero(nb.size(), 1);
  } else {
    const PcaResult pca = local_pca(nb.rescaled, params.eta);
    d_hat = pca.d_hat;
    projected = project(nb, pca);
  }
  const double mmd = mmd_sq_vs_uniform_disk(projected, params.kernel);
  const auto table = nulls.get(d_hat, params.kernel);
  result.d_hat = d_hat;
  result.mmd = mmd;
  result.p_value = table->p_value(static_cast<int>(nb.size()), mmd);
  return result;
}

std::vector<UniformityResult> singularity_scores(const PointCloud& cloud, const Hyperparams& params,
                                                 NullCache& nulls, double subsample_fraction,
                                                 std::uint64_t seed) {
  params.validate();
  if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0))
    throw InputError("subsample fraction must lie in (0, 1]");
  const Index n = cloud.size();

  std::vector<Index> queries(static_cast<std::size_t>(n));
  std::iota(queries.begin(), queries.end(), Index{0});
  if (subsample_fraction < 1.0) {
    Rng rng(derive_seed(seed, 0x5ab5a3e1ULL));
    std::shuffle(queries.begin(), queries.end(), rng);
    const auto m = std::max<Index>(1, static_cast<Index>(std::ceil(subsample_fraction * n)));
    queries.resize(static_cast<std::size_t>(m));
    std::sort(queries.begin(), queries.end());
  }

  std::vector<UniformityResult> results(static_cast<std::size_t>(n));
  std::vector<char> scored(static_cast<std::size_t>(n), 0);
  const auto m = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t q = 0; q < m; ++q) {
    const Index i = queries[static_cast<std::size_t>(q)];
    results[static_cast<std::size_t>(i)] = uniformity_test(cloud, i, params, nulls);
    scored[static_cast<std::size_t>(i)] = 1;
  }

  if (static_cast<Index>(queries.size()) < n) {
    const auto& x = cloud.coords();
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
      if (scored[static_cast<std::size_t>(i)]) continue;
      double best = std::numeric_limits<double>::infinity();
      Index nearest = queries.front();
      for (Index j : queries) {
        const double d2 = (x.row(j) - x.row(i)).squaredNorm();
        if (d2 < best) {
          best = d2;
          nearest = j;
        }
      }
      UniformityResult r = results[static_cast<std::size_t>(nearest)];
      r.index = i;
      results[static_cast<std::size_t>(i)] = r;
    }
  }
  return results;
}

std::vector<std::optional<double>> p_values_of(const std::vector<UniformityResult>& results) {
  std::vector<std::optional<double>> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(r.p_value);
  return out;
}

}  // namespace singdet
