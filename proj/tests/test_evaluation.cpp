#include "oracles.hpp"
#include "singdet/evaluation.hpp"

#include <gtest/gtest.h>

using namespace singdet;

namespace {

NullCache& nulls() {
  static NullCache cache;
  return cache;
}

std::vector<std::optional<double>> wrap(const std::vector<double>& v) {
  return {v.begin(), v.end()};
}

// Coarse scores so that ties are common.
void random_case(int n, std::uint64_t seed, std::vector<double>& s, Labels& y) {
  std::mt19937_64 g(seed);
  std::uniform_int_distribution<int> level(0, 9);
  std::bernoulli_distribution coin(0.3);
  s.resize(n);
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    y[i] = coin(g);
    s[i] = level(g) + (y[i] ? 1.5 : 0.0);
  }
  y[0] = 0;
  y[1] = 1;
}

double trapezoid(const RocCurve& c) {
  double a = 0.0;
  for (std::size_t i = 1; i < c.fpr.size(); ++i) a += (c.fpr[i] - c.fpr[i - 1]) * (c.tpr[i] + c.tpr[i - 1]) / 2;
  return a;
}

}  // namespace

TEST(Roc, PerfectSeparation) {
  const std::vector<double> s{0.1, 0.2, 0.3, 0.8, 0.9};
  const Labels y{0, 0, 0, 1, 1};
  const auto c = roc_curve(wrap(s), y);
  EXPECT_DOUBLE_EQ(c.auc, 1.0);
  bool corner = false;
  for (std::size_t i = 0; i < c.fpr.size(); ++i) corner = corner || (c.fpr[i] == 0.0 && c.tpr[i] == 1.0);
  EXPECT_TRUE(corner);
}

TEST(Roc, ShuffledLabelsGiveHalf) {
  std::mt19937_64 g(3);
  std::normal_distribution<double> nd;
  std::bernoulli_distribution coin(0.5);
  std::vector<double> s(10000);
  Labels y(10000);
  for (int i = 0; i < 10000; ++i) {
    s[i] = nd(g);
    y[i] = coin(g);
  }
  EXPECT_NEAR(roc_curve(wrap(s), y).auc, 0.5, 0.02);
}

TEST(Roc, NegationComplements) {
  std::vector<double> s;
  Labels y;
  random_case(500, 4, s, y);
  std::vector<double> neg(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) neg[i] = -s[i];
  EXPECT_NEAR(roc_curve(wrap(neg), y).auc, 1.0 - roc_curve(wrap(s), y).auc, 1e-12);
}

TEST(Roc, TrapezoidEqualsPairCounting) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<double> s;
    Labels y;
    random_case(50 + 37 * seed, seed, s, y);
    const auto c = roc_curve(wrap(s), y);
    EXPECT_NEAR(c.auc, oracle::auc_pairs(s, y), 1e-9);
    EXPECT_NEAR(c.auc, trapezoid(c), 1e-9);
    EXPECT_NEAR(c.auc, roc_auc(s, y), 1e-9);
  }
}

TEST(Roc, CurveShape) {
  std::vector<double> s;
  Labels y;
  random_case(300, 9, s, y);
  const auto c = roc_curve(wrap(s), y);
  ASSERT_EQ(c.fpr.size(), c.tpr.size());
  ASSERT_EQ(c.fpr.size(), c.thresholds.size());
  EXPECT_EQ(c.fpr.front(), 0.0);
  EXPECT_EQ(c.tpr.front(), 0.0);
  EXPECT_EQ(c.fpr.back(), 1.0);
  EXPECT_EQ(c.tpr.back(), 1.0);
  EXPECT_TRUE(std::isinf(c.thresholds.front()));
  for (std::size_t i = 1; i < c.fpr.size(); ++i) {
    EXPECT_GT(c.thresholds[i - 1], c.thresholds[i]);
    EXPECT_GE(c.fpr[i], c.fpr[i - 1]);
    EXPECT_GE(c.tpr[i], c.tpr[i - 1]);
  }
  // One point per distinct score plus the origin.
  std::set<double> distinct(s.begin(), s.end());
  EXPECT_EQ(c.fpr.size(), distinct.size() + 1);
}

TEST(Roc, MissingScoresCounted) {
  std::vector<std::optional<double>> s{0.9, std::nullopt, 0.1, 0.8, std::nullopt, 0.2};
  const Labels y{1, 1, 0, 1, 0, 0};
  const auto c = roc_curve(s, y);
  EXPECT_EQ(c.n_missing, 2u);
  EXPECT_DOUBLE_EQ(c.auc, 1.0);
}

TEST(Roc, Errors) {
  const std::vector<double> s{0.1, 0.2};
  EXPECT_THROW(roc_curve(wrap(s), Labels{1, 1}), InputError);
  EXPECT_THROW(roc_curve(wrap(s), Labels{1}), InputError);
  std::vector<std::optional<double>> partly{0.5, std::nullopt};
  EXPECT_THROW(roc_curve(partly, Labels{0, 1}), InputError);
}

TEST(Roc, PolylineCsv) {
  const auto c = roc_curve(wrap({0.1, 0.9}), Labels{0, 1});
  const std::string csv = roc_polyline_csv(c);
  EXPECT_EQ(csv.substr(0, 8), "fpr,tpr\n");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(c.fpr.size()) + 1);
}

TEST(Suite, FamiliesAndParsing) {
  EXPECT_EQ(parse_family("solid-ball"), SuiteFamily::SolidBall);
  EXPECT_EQ(parse_family("TwoDisks"), SuiteFamily::TwoDisks);
  EXPECT_THROW(parse_family("torus"), InputError);
  for (auto f : {SuiteFamily::SolidBall, SuiteFamily::TwoSpheres, SuiteFamily::TwoDisks})
    EXPECT_EQ(parse_family(family_name(f)), f);
  EXPECT_EQ(family_params(SuiteFamily::SolidBall).r0, 0.02);
  EXPECT_EQ(family_params(SuiteFamily::TwoDisks).r0, 0.1);
  EXPECT_EQ(family_params(SuiteFamily::TwoSpheres).r0, 0.03);
  for (auto f : {SuiteFamily::SolidBall, SuiteFamily::TwoSpheres, SuiteFamily::TwoDisks}) {
    EXPECT_EQ(family_params(f).n0, 15000);
    EXPECT_EQ(family_params(f).growth, 1.5);
  }
}

TEST(Suite, RowsAndDeterminism) {
  const std::vector<int> dims{1, 2};
  const auto a = run_synthetic_suite(SuiteFamily::TwoSpheres, dims, 0.05, 11, nulls());
  const auto b = run_synthetic_suite(SuiteFamily::TwoSpheres, dims, 0.05, 11, nulls());
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].n, std::llround(22500 * 0.05));
  EXPECT_EQ(a[1].n, std::llround(33750 * 0.05));
  EXPECT_DOUBLE_EQ(a[0].r, 0.03);
  EXPECT_NEAR(a[1].r, std::sqrt(0.03), 1e-15);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].auc, b[i].auc);
  const std::string csv = suite_csv(a);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "family,d,n,r,auc,seconds");
  EXPECT_THROW(run_synthetic_suite(SuiteFamily::TwoSpheres, dims, 0.0, 1, nulls()), InputError);
  EXPECT_THROW(run_synthetic_suite(SuiteFamily::TwoSpheres, dims, 1.5, 1, nulls()), InputError);
}

TEST(Suite, SolidBallIntervalEndpoints) {
  const std::vector<int> dims{1};
  const auto rows = run_synthetic_suite(SuiteFamily::SolidBall, dims, 0.2, 1, nulls());
  EXPECT_GE(rows[0].auc, 0.95);
}

TEST(Suite, TwoSpheresDeskScale) {
  const std::vector<int> dims{1, 2};
  const auto rows = run_synthetic_suite(SuiteFamily::TwoSpheres, dims, 0.2, 1, nulls());
  for (const auto& r : rows) EXPECT_GE(r.auc, 0.85) << "d=" << r.d;
}
