#include "singdet/evaluation.hpp"

#include "singdet/uniformity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace singdet {

RocCurve roc_curve(std::span<const std::optional<double>> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw InputError("roc: scores and labels differ in length");
  RocCurve curve;
  std::vector<std::pair<double, std::uint8_t>> rows;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!scores[i]) {
      ++curve.n_missing;
      continue;
    }
    rows.emplace_back(*scores[i], labels[i] ? 1 : 0);
  }
  const auto pos = static_cast<double>(std::count_if(rows.begin(), rows.end(), [](auto& r) { return r.second; }));
  const auto neg = static_cast<double>(rows.size()) - pos;
  if (pos == 0.0 || neg == 0.0) throw InputError("roc: both classes must be present");
  std::sort(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.first > b.first; });

  curve.thresholds.push_back(std::numeric_limits<double>::infinity());
  curve.fpr.push_back(0.0);
  curve.tpr.push_back(0.0);
  double tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < rows.size();) {
    const double t = rows[i].first;
    for (; i < rows.size() && rows[i].first == t; ++i) (rows[i].second ? tp : fp) += 1.0;
    curve.thresholds.push_back(t);
    curve.fpr.push_back(fp / neg);
    curve.tpr.push_back(tp / pos);
  }
  double area = 0.0;
  for (std::size_t j = 1; j < curve.fpr.size(); ++j)
    area += (curve.fpr[j] - curve.fpr[j - 1]) * 0.5 * (curve.tpr[j] + curve.tpr[j - 1]);
  curve.auc = area;
  return curve;
}

std::string roc_polyline_csv(const RocCurve& curve) {
  std::ostringstream out;
  out.precision(17);
  out << "fpr,tpr\n";
  for (std::size_t j = 0; j < curve.fpr.size(); ++j) out << curve.fpr[j] << ',' << curve.tpr[j] << '\n';
  return out.str();
}

FamilyParams family_params(SuiteFamily family) {
  switch (family) {
    case SuiteFamily::SolidBall: return {Shape::SolidBall, 0.02, 15000.0, 1.5};
    case SuiteFamily::TwoDisks: return {Shape::TwoDisks, 0.1, 15000.0, 1.5};
    case SuiteFamily::TwoSpheres: return {Shape::TwoSpheres, 0.03, 15000.0, 1.5};
  }
  throw InputError("unknown suite family");
}

std::string family_name(SuiteFamily family) { return shape_name(family_params(family).shape); }

SuiteFamily parse_family(const std::string& name) {
  const Shape s = parse_shape(name);
  for (auto f : {SuiteFamily::SolidBall, SuiteFamily::TwoSpheres, SuiteFamily::TwoDisks})
    if (family_params(f).shape == s) return f;
  throw InputError("'" + name + "' is not a suite family (solid-ball, two-spheres, two-disks)");
}

std::vector<SuiteRow> run_synthetic_suite(SuiteFamily family, std::span<const int> d_list, double scale,
                                          std::uint64_t seed, NullCache& nulls, const SuiteOptions& options) {
  if (!(scale > 0.0 && scale <= 1.0)) throw InputError("suite scale must lie in (0, 1]");
  const FamilyParams fp = family_params(family);
  std::vector<SuiteRow> rows;
  for (int d : d_list) {
    const ScaledParams sp = scaled_experiment_params(d, fp.r0, fp.n0, fp.growth);
    const auto n = std::max<Index>(50, static_cast<Index>(std::llround(sp.n * scale)));
    const auto start = std::chrono::steady_clock::now();

    ShapeSpec spec{fp.shape, d, n, options.noise, derive_seed(seed, static_cast<std::uint64_t>(d))};
    const LabeledCloud data = generate(spec);
    Hyperparams params;
    params.neighborhood = RadiusNeighborhood{sp.radius};
    params.eta = options.eta;
    params.kernel = PowerSeriesKernel::geometric(options.alpha);
    const auto results = singularity_scores(data.cloud, params, nulls);
    const auto scores = log_inv_p(p_values_of(results));
    const Labels truth = ground_truth_labels(data, sp.radius / 2.0);
    const RocCurve curve = roc_curve(scores, truth);

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back({family, d, n, sp.radius, curve.auc, secs});
  }
  return rows;
}

std::string suite_csv(std::span<const SuiteRow> rows) {
  std::ostringstream out;
  out.precision(10);
  out << "family,d,n,r,auc,seconds\n";
  for (const auto& r : rows)
    out << family_name(r.family) << ',' << r.d << ',' << r.n << ',' << r.r << ',' << r.auc << ',' << r.seconds
        << '\n';
  return out.str();
}

}  // namespace singdet
