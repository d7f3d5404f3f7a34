#include "singdet/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace singdet {

std::vector<std::optional<double>> log_inv_p(std::span<const std::optional<double>> p_values) {
  std::vector<std::optional<double>> out;
  out.reserve(p_values.size());
  for (const auto& p : p_values) {
    if (!p) {
      out.emplace_back();
      continue;
    }
    if (!(*p > 0.0 && *p <= 1.0)) throw InputError("p-value outside (0, 1]");
    out.emplace_back(-std::log(*p));
  }
  return out;
}

KdeCurve kde_density(std::span<const double> values, int grid_size) {
  const auto n = values.size();
  if (n < 2) throw InputError("kde: need at least two values");
  if (grid_size < 2) throw InputError("kde: grid needs at least two points");
  for (double v : values)
    if (!std::isfinite(v)) throw InputError("kde: non-finite value");

  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / (n - 1));
  if (!(sigma > 0.0)) throw InputError("degenerate values");

  KdeCurve out;
  out.bandwidth = 1.06 * sigma * std::pow(static_cast<double>(n), -0.2);
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it - out.bandwidth;
  const double hi = *hi_it + out.bandwidth;
  const double step = (hi - lo) / (grid_size - 1);
  const double norm = 1.0 / (n * out.bandwidth * std::sqrt(2.0 * M_PI));

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double cutoff = 9.0 * out.bandwidth;  // exp(-40.5) contributes nothing
  out.grid.resize(grid_size);
  out.density.resize(grid_size);
  for (int g = 0; g < grid_size; ++g) {
    const double x = lo + g * step;
    auto it = std::lower_bound(sorted.begin(), sorted.end(), x - cutoff);
    double acc = 0.0;
    for (; it != sorted.end() && *it <= x + cutoff; ++it) {
      const double z = (x - *it) / out.bandwidth;
      acc += std::exp(-0.5 * z * z);
    }
    out.grid[g] = x;
    out.density[g] = acc * norm;
  }
  return out;
}

std::optional<double> knee_detect(std::span<const double> xs, std::span<const double> ys,
                                  double sensitivity, KneeShape shape) {
  const auto n = xs.size();
  if (n != ys.size()) throw InputError("knee_detect: xs and ys differ in length");
  if (n < 3) return std::nullopt;
  const auto [xlo, xhi] = std::minmax_element(xs.begin(), xs.end());
  const auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
  const double xr = *xhi - *xlo;
  const double yr = *yhi - *ylo;
  if (!(xr > 0.0) || !(yr > 0.0)) return std::nullopt;

  std::vector<double> xn(n), diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    xn[i] = (xs[i] - *xlo) / xr;
    const double yn = (ys[i] - *ylo) / yr;
    switch (shape) {
      case KneeShape::ConcaveInc: diff[i] = yn - xn[i]; break;
      case KneeShape::ConvexDec: diff[i] = 1.0 - xn[i] - yn; break;
      case KneeShape::ConcaveDec: diff[i] = xn[i] + yn - 1.0; break;
      case KneeShape::ConvexInc: diff[i] = xn[i] - yn; break;
    }
  }
  const double mean_dx = 1.0 / static_cast<double>(n - 1);

  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (diff[i] >= diff[i - 1] && diff[i] >= diff[i + 1]) maxima.push_back(i);

  std::optional<std::size_t> best;
  for (std::size_t m = 0; m < maxima.size(); ++m) {
    const std::size_t lmx = maxima[m];
    const std::size_t stop = m + 1 < maxima.size() ? maxima[m + 1] : n;
    const double threshold = diff[lmx] - sensitivity * mean_dx;
    bool fell = false;
    for (std::size_t j = lmx + 1; j < stop && !fell; ++j) fell = diff[j] < threshold;
    if (fell && (!best || diff[lmx] > diff[*best])) best = lmx;
  }
  if (!best) return std::nullopt;
  return xs[*best];
}

Labels filter_labels(std::span<const std::optional<double>> p_values, const FilterOptions& options) {
  const auto scores = log_inv_p(p_values);
  std::vector<double> present;
  for (const auto& s : scores)
    if (s) present.push_back(*s);
  if (present.size() < 10) throw InputError("filter_labels: need at least ten scored points");

  Labels labels(scores.size(), 0);
  const auto [lo, hi] = std::minmax_element(present.begin(), present.end());
  if (*lo == *hi) return labels;

  const KdeCurve kde = kde_density(present, options.grid_size);
  const auto mode = static_cast<std::size_t>(
      std::max_element(kde.density.begin(), kde.density.end()) - kde.density.begin());
  if (kde.grid.size() - mode < 5) return labels;
  const std::span<const double> flank_x(kde.grid.data() + mode, kde.grid.size() - mode);
  const std::span<const double> flank_y(kde.density.data() + mode, kde.density.size() - mode);
  const auto knee = knee_detect(flank_x, flank_y, options.sensitivity, KneeShape::ConvexDec);
  if (!knee) return labels;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] && *scores[i] > *knee) labels[i] = 1;
  return labels;
}

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  const auto n = scores.size();
  if (labels.size() != n) throw InputError("roc_auc: scores and labels differ in length");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

  double rank_sum = 0.0;
  double n1 = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]]) {
        rank_sum += avg_rank;
        n1 += 1.0;
      }
    }
    i = j;
  }
  const double n0 = static_cast<double>(n) - n1;
  if (n1 == 0.0 || n0 == 0.0) throw InputError("AUC undefined");
  return (rank_sum - n1 * (n1 + 1.0) / 2.0) / (n1 * n0);
}

NeighborSets knn_sets(const PointCloud& cloud, Index k) {
  const Index n = cloud.size();
  if (k < 1 || k > n) throw InputError("knn_sets: k must lie in [1, n]");
  const auto& x = cloud.coords();
  NeighborSets sets(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 32)
  for (Index i = 0; i < n; ++i) {
    std::vector<std::pair<double, Index>> d;
    d.reserve(static_cast<std::size_t>(n - 1));
    for (Index j = 0; j < n; ++j)
      if (j != i) d.emplace_back((x.row(j) - x.row(i)).squaredNorm(), j);
    auto& set = sets[static_cast<std::size_t>(i)];
    set.push_back(i);
    const Index others = k - 1;
    if (others > 0) {
      std::nth_element(d.begin(), d.begin() + (others - 1), d.end());
      std::sort(d.begin(), d.begin() + others);
      for (Index m = 0; m < others; ++m) set.push_back(d[m].second);
    }
  }
  return sets;
}

namespace {

void check_sets(const Labels& labels, const NeighborSets& sets) {
  if (labels.size() != sets.size()) throw InputError("labels and neighbor sets differ in length");
  for (std::size_t i = 0; i < sets.size(); ++i)
    if (std::find(sets[i].begin(), sets[i].end(), static_cast<Index>(i)) == sets[i].end())
      throw InputError("neighbor set of a point must contain the point itself");
}

}  // namespace

std::vector<double> purity(const Labels& labels, const NeighborSets& sets) {
  check_sets(labels, sets);
  std::vector<double> out(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    double ones = 0.0;
    for (Index j : sets[i]) ones += labels[static_cast<std::size_t>(j)];
    out[i] = ones / static_cast<double>(sets[i].size());
  }
  return out;
}

std::vector<std::optional<double>> separation(const PointCloud& cloud, const Labels& labels,
                                              const NeighborSets& sets) {
  check_sets(labels, sets);
  if (static_cast<Index>(labels.size()) != cloud.size())
    throw InputError("separation: labels and cloud differ in length");
  const auto& x = cloud.coords();
  std::vector<std::optional<double>> out(labels.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (Index i = 0; i < cloud.size(); ++i) {
    if (!labels[static_cast<std::size_t>(i)]) continue;
    const auto& set = sets[static_cast<std::size_t>(i)];
    Eigen::RowVectorXd axis = Eigen::RowVectorXd::Zero(cloud.dim());
    std::size_t ones = 0;
    for (Index j : set) {
      if (labels[static_cast<std::size_t>(j)]) {
        axis += x.row(j) - x.row(i);
        ++ones;
      }
    }
    const double len = axis.norm();
    if (ones == set.size() || len == 0.0) {
      out[static_cast<std::size_t>(i)] = 0.5;
      continue;
    }
    axis /= len;
    std::vector<double> t;
    std::vector<std::uint8_t> y;
    t.reserve(set.size());
    y.reserve(set.size());
    for (Index j : set) {
      t.push_back((x.row(j) - x.row(i)).dot(axis));
      y.push_back(labels[static_cast<std::size_t>(j)]);
    }
    out[static_cast<std::size_t>(i)] = roc_auc(t, y);
  }
  return out;
}

DampingFunction::DampingFunction(double a_, double b_) : a(a_), b(b_) {
  if (!(a >= 0.0 && a < 1.0) || !(b >= 1.0)) throw InputError("damping requires a in [0,1), b >= 1");
}

double DampingFunction::operator()(double t) const {
  const double base = std::max(0.0, (t - a) / (1.0 - a));
  return std::pow(base, b);
}

DispersionReport dispersion(const PointCloud& cloud, const Labels& labels, const NeighborSets& sets,
                            double alpha_reg, DampingFunction d1, DampingFunction d2) {
  DispersionReport rep;
  rep.labels = labels;
  rep.purity = purity(labels, sets);
  rep.separation = separation(cloud, labels, sets);
  rep.q.assign(labels.size(), std::nullopt);
  const auto ones = std::count(labels.begin(), labels.end(), std::uint8_t{1});
  rep.global_purity = labels.empty() ? 0.0 : static_cast<double>(ones) / labels.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    const double q = 1.0 - 0.5 * (*rep.separation[i] + rep.purity[i]);
    rep.q[i] = q;
    sum += d2(q);
  }
  rep.dispersion = alpha_reg * d1(rep.global_purity) + sum;
  return rep;
}

}  // namespace singdet
