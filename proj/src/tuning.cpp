#include "singdet/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

namespace singdet {

double levina_bickel_from_distances(std::span<const double> t, Index k) {
  if (k < 3) throw InputError("levina-bickel: k must be at least 3");
  if (static_cast<Index>(t.size()) < k) throw InputError("levina-bickel: not enough neighbours");
  const double tk = t[static_cast<std::size_t>(k - 1)];
  if (!(tk > 0.0)) throw InputError("levina-bickel: all neighbour distances are zero");
  double sum = 0.0;
  Index used = 0;
  for (Index j = 0; j + 1 < k; ++j) {
    const double tj = t[static_cast<std::size_t>(j)];
    if (!(tj > 0.0)) continue;
    sum += std::log(tk / tj);
    ++used;
  }
  if (used < 2 || !(sum > 0.0)) throw InputError("levina-bickel: neighbour distances carry no scale information");
  return static_cast<double>(used - 1) / sum;
}

double levina_bickel_dim(const PointCloud& cloud, Index i, Index k) {
  if (k > cloud.size() - 1) throw InputError("levina-bickel: k exceeds n - 1");
  const auto nd = sorted_distances(cloud, i);
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) t.push_back(nd[static_cast<std::size_t>(j)].first);
  return levina_bickel_from_distances(t, k);
}

LocalScale local_scale(const PointCloud& cloud, int n_probes, std::uint64_t seed) {
  const Index n = cloud.size();
  if (n < 50) throw InputError("local_scale: need at least 50 points");
  if (n_probes < 1) throw InputError("local_scale: need at least one probe");

  LocalScale out;
  const Index top = std::min<Index>(n - 1, 1000);
  for (Index k = 10; k <= top; k *= 2) out.ladder.push_back(k);
  const std::size_t rungs = out.ladder.size();

  std::vector<Index> probes(static_cast<std::size_t>(n));
  std::iota(probes.begin(), probes.end(), Index{0});
  Rng rng(derive_seed(seed, 0x10ca15ca1eULL));
  std::shuffle(probes.begin(), probes.end(), rng);
  probes.resize(std::min<std::size_t>(probes.size(), static_cast<std::size_t>(n_probes)));

  // dists[p][r]: distance to the ladder[r]-th neighbour; dims[p][r]: estimate or NaN.
  std::vector<std::vector<double>> dists(probes.size(), std::vector<double>(rungs));
  std::vector<std::vector<double>> dims(probes.size(), std::vector<double>(rungs));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t p = 0; p < static_cast<std::int64_t>(probes.size()); ++p) {
    const auto nd = sorted_distances(cloud, probes[static_cast<std::size_t>(p)]);
    std::vector<double> t(nd.size());
    for (std::size_t j = 0; j < nd.size(); ++j) t[j] = nd[j].first;
    for (std::size_t r = 0; r < rungs; ++r) {
      const Index k = out.ladder[r];
      dists[static_cast<std::size_t>(p)][r] = t[static_cast<std::size_t>(k - 1)];
      try {
        dims[static_cast<std::size_t>(p)][r] = levina_bickel_from_distances(t, k);
      } catch (const InputError&) {
        dims[static_cast<std::size_t>(p)][r] = std::nan("");
      }
    }
  }

  out.mean_curve.assign(rungs, 0.0);
  for (std::size_t r = 0; r < rungs; ++r) {
    double acc = 0.0;
    int count = 0;
    for (const auto& row : dims)
      if (std::isfinite(row[r])) {
        acc += row[r];
        ++count;
      }
    out.mean_curve[r] = count > 0 ? acc / count : std::nan("");
  }

  std::size_t star = rungs / 2;
  const bool curve_ok = std::all_of(out.mean_curve.begin(), out.mean_curve.end(),
                                    [](double v) { return std::isfinite(v); });
  if (rungs >= 5 && curve_ok) {
    std::vector<double> xs(rungs), ys(rungs);
    for (std::size_t r = 0; r < rungs; ++r) {
      xs[r] = static_cast<double>(r);
      ys[r] = out.mean_curve[rungs - 1 - r];
    }
    const KneeShape shape = ys.back() > ys.front() ? KneeShape::ConvexInc : KneeShape::ConvexDec;
    if (const auto knee = knee_detect(xs, ys, 1.0, shape))
      star = rungs - 1 - static_cast<std::size_t>(std::lround(*knee));
  }
  out.k_star = out.ladder[star];
  double rsum = 0.0;
  for (const auto& row : dists) rsum += row[star];
  out.r_tilde = rsum / static_cast<double>(dists.size());
  if (!(out.r_tilde > 0.0)) throw InputError("local_scale: zero neighbourhood radius (duplicate points?)");
  out.dimension = std::isfinite(out.mean_curve[star]) ? out.mean_curve[star] : 1.0;
  out.r_min = 1.5 * out.r_tilde;
  out.r_max = 5.0 * out.r_tilde;
  return out;
}

std::vector<double> volume_spaced_radii(double lo, double hi, int d, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || d < 1 || n < 1) throw InputError("invalid radius range");
  if (n == 1) return {lo};
  const double vlo = std::pow(lo, d);
  const double vhi = std::pow(hi, d);
  std::vector<double> out;
  for (int j = 0; j < n; ++j) out.push_back(std::pow(vlo + (vhi - vlo) * j / (n - 1), 1.0 / d));
  out.front() = lo;
  out.back() = hi;
  return out;
}

SearchGrid default_grid(const LocalScale& scale) {
  SearchGrid grid;
  grid.volume_dim = std::max(1, static_cast<int>(std::lround(scale.dimension)));
  grid.radii = volume_spaced_radii(scale.r_min, scale.r_max, grid.volume_dim, 4);
  grid.r_lower = scale.r_tilde;
  grid.r_upper = 10.0 * scale.r_tilde;
  return grid;
}

namespace {

ConfigRow evaluate(const PointCloud& cloud, double r, double eta, double alpha, NullCache& nulls,
                   const NeighborSets& sets, double alpha_reg, const GridSearchOptions& options,
                   std::vector<UniformityResult>* results_out, Labels* labels_out) {
  ConfigRow row;
  row.r = r;
  row.eta = eta;
  row.alpha = alpha;
  try {
    Hyperparams params;
    params.neighborhood = RadiusNeighborhood{r};
    params.eta = eta;
    params.kernel = PowerSeriesKernel::geometric(alpha);
    auto results = singularity_scores(cloud, params, nulls, options.subsample_fraction, options.seed);
    Labels labels = filter_labels(p_values_of(results));
    const DispersionReport rep = dispersion(cloud, labels, sets, alpha_reg);
    row.dispersion = rep.dispersion;
    row.n_singular = std::count(labels.begin(), labels.end(), std::uint8_t{1});
    row.warn_degenerate = row.n_singular == 0;
    if (results_out) *results_out = std::move(results);
    if (labels_out) *labels_out = std::move(labels);
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
  }
  return row;
}

// Strict-weak "better than" for the selection rule.
bool better(const ConfigRow& a, const ConfigRow& b) {
  if (a.failed != b.failed) return !a.failed;
  if (a.warn_degenerate != b.warn_degenerate) return !a.warn_degenerate;
  return std::tie(a.dispersion, a.r, a.eta, a.alpha) < std::tie(b.dispersion, b.r, b.eta, b.alpha);
}

}  // namespace

GridSearchResult grid_search(const PointCloud& cloud, const SearchGrid& grid, NullCache& nulls,
                             const GridSearchOptions& options) {
  if (grid.radii.empty() || grid.etas.empty() || grid.alphas.empty())
    throw InputError("grid_search: empty grid axis");
  const double alpha_reg = options.alpha_reg >= 0.0 ? options.alpha_reg : cloud.size() / 4.0;
  const NeighborSets sets = knn_sets(cloud, std::min<Index>(options.k_disp, cloud.size()));
  const int d = std::max(1, grid.volume_dim);

  GridSearchResult out;
  std::vector<double> axis = grid.radii;
  std::sort(axis.begin(), axis.end());
  std::vector<double> pending = axis;

  for (;;) {
    for (double r : pending)
      for (double eta : grid.etas)
        for (double alpha : grid.alphas)
          out.report.push_back(evaluate(cloud, r, eta, alpha, nulls, sets, alpha_reg, options, nullptr, nullptr));

    const auto best = std::min_element(out.report.begin(), out.report.end(), better);
    if (best->failed) {
      std::ostringstream msg;
      msg << "grid_search: every configuration failed:";
      for (const auto& row : out.report)
        msg << "\n  r=" << row.r << " eta=" << row.eta << " alpha=" << row.alpha << ": " << row.error;
      throw InputError(msg.str());
    }
    out.best_row = *best;

    pending.clear();
    if (axis.size() < 2 || out.expansions >= options.max_expansions || !(grid.r_upper > 0.0)) break;
    const double vstep = std::pow(axis[axis.size() - 1], d) - std::pow(axis[axis.size() - 2], d);
    const double vstep_low = std::pow(axis[1], d) - std::pow(axis[0], d);
    if (best->r == axis.back() && axis.back() < grid.r_upper) {
      const double vcap = std::pow(grid.r_upper, d);
      for (int j = 1; j <= static_cast<int>(grid.radii.size()); ++j) {
        const double v = std::pow(axis.back(), d) + j * vstep;
        if (v > vcap) break;
        pending.push_back(std::pow(v, 1.0 / d));
      }
      if (pending.empty()) pending.push_back(grid.r_upper);
    } else if (best->r == axis.front() && axis.front() > grid.r_lower) {
      const double vfloor = std::pow(grid.r_lower, d);
      for (int j = 1; j <= static_cast<int>(grid.radii.size()); ++j) {
        const double v = std::pow(axis.front(), d) - j * vstep_low;
        if (v < vfloor || v <= 0.0) break;
        pending.push_back(std::pow(v, 1.0 / d));
      }
      if (pending.empty() && grid.r_lower > 0.0) pending.push_back(grid.r_lower);
    }
    if (pending.empty()) break;
    axis.insert(axis.end(), pending.begin(), pending.end());
    std::sort(axis.begin(), axis.end());
    ++out.expansions;
  }

  if (out.best_row.warn_degenerate) warn("grid_search: best configuration labels no point singular");
  out.best.neighborhood = RadiusNeighborhood{out.best_row.r};
  out.best.eta = out.best_row.eta;
  out.best.kernel = PowerSeriesKernel::geometric(out.best_row.alpha);
  evaluate(cloud, out.best_row.r, out.best_row.eta, out.best_row.alpha, nulls, sets, alpha_reg, options,
           &out.best_results, &out.best_labels);
  return out;
}

std::string report_csv(const std::vector<ConfigRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "r,eta,alpha,dispersion,n_singular,warn_degenerate\n";
  for (const auto& row : rows) {
    out << row.r << ',' << row.eta << ',' << row.alpha << ',';
    if (row.failed)
      out << "nan";
    else
      out << row.dispersion;
    out << ',' << row.n_singular << ',' << (row.warn_degenerate ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace singdet
