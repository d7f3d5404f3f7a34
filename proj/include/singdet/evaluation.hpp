#pragma once

#include "singdet/null_dist.hpp"
#include "singdet/scoring.hpp"
#include "singdet/synth.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace singdet {

struct RocCurve {
  std::vector<double> thresholds;  ///< descending; the first is +inf
  std::vector<double> fpr;
  std::vector<double> tpr;
  double auc = 0.0;
  std::size_t n_missing = 0;
};

/// Threshold sweep over distinct scores (ties grouped); missing scores are
/// dropped and counted.
RocCurve roc_curve(std::span<const std::optional<double>> scores, std::span<const std::uint8_t> labels);

/// "fpr,tpr" polyline for plotting.
std::string roc_polyline_csv(const RocCurve& curve);

enum class SuiteFamily { SolidBall, TwoSpheres, TwoDisks };

struct FamilyParams {
  Shape shape;
  double r0;
  double n0;
  double growth;
};

FamilyParams family_params(SuiteFamily family);
SuiteFamily parse_family(const std::string& name);
std::string family_name(SuiteFamily family);

struct SuiteOptions {
  double eta = 0.95;
  double alpha = 0.5;
  double noise = 0.0;
};

struct SuiteRow {
  SuiteFamily family;
  int d = 0;
  Index n = 0;
  double r = 0.0;
  double auc = 0.0;
  double seconds = 0.0;
};

/// For each d: sample the family with r_d = r0^(1/d) and N_d = N0 growth^d
/// (times `scale`), score every point at the fixed eta, label points within
/// r_d / 2 of the singular locus and report the AUC of log(1/p).
std::vector<SuiteRow> run_synthetic_suite(SuiteFamily family, std::span<const int> d_list, double scale,
                                          std::uint64_t seed, NullCache& nulls,
                                          const SuiteOptions& options = {});

/// CSV with header family,d,n,r,auc,seconds.
std::string suite_csv(std::span<const SuiteRow> rows);

}  // namespace singdet
