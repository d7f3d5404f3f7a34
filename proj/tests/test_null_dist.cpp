#include "oracles.hpp"
#include "singdet/null_dist.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

using namespace singdet;
namespace fs = std::filesystem;

namespace {

const auto kKernel = PowerSeriesKernel::geometric(0.5);

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("singdet_null_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const NullTable& shared_table() {
  static const NullTable t = build_null(2, kKernel, 100, 1000, 3);
  return t;
}

}  // namespace

TEST(SampleBall, OneDimensionalIsUniformInterval) {
  Rng rng(1);
  const Points p = sample_uniform_ball(1, 100000, rng);
  std::vector<double> v(p.data(), p.data() + p.size());
  EXPECT_LE(oracle::ks_distance(v, [](double x) { return (x + 1.0) / 2.0; }), 0.01);
}

TEST(SampleBall, ThreeDimensionalMeanIsZero) {
  Rng rng(2);
  const Points p = sample_uniform_ball(3, 100000, rng);
  const Eigen::RowVectorXd m = p.colwise().mean();
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(m[j], 0.0, 0.01);
}

TEST(SampleBall, EvenMomentsOfTheNorm) {
  Rng rng(3);
  for (int d = 1; d <= 4; ++d) {
    const Points p = sample_uniform_ball(d, 100000, rng);
    const Eigen::VectorXd sq = p.rowwise().squaredNorm();
    EXPECT_LE(sq.maxCoeff(), 1.0);
    for (int k = 1; k <= 3; ++k) {
      const double m = sq.array().pow(k).mean();
      EXPECT_NEAR(m, d / (d + 2.0 * k), k == 1 && d == 2 ? 0.005 : 0.01) << d << " " << k;
    }
  }
}

TEST(BuildNull, MeanMatchesExpectation) {
  const NullTable& t = shared_table();
  std::vector<double> scaled;
  for (double s : t.stats) scaled.push_back(s / t.n_ref);
  const double se = oracle::stddev(scaled) / std::sqrt(double(scaled.size()));
  EXPECT_NEAR(oracle::mean(scaled), expected_mmd_sq(kKernel, 2, 100), 3 * se);
}

TEST(BuildNull, SortedNonnegativeAndTailFit) {
  const NullTable& t = shared_table();
  ASSERT_EQ(t.n_sims(), 1000);
  EXPECT_TRUE(std::is_sorted(t.stats.begin(), t.stats.end()));
  EXPECT_GE(t.stats.front(), 0.0);
  EXPECT_DOUBLE_EQ(t.tail_anchor, t.stats[950]);
  EXPECT_GT(t.tail_rate, 0.0);
  double excess = 0.0;
  for (std::size_t i = 951; i < 1000; ++i) excess += t.stats[i] - t.tail_anchor;
  EXPECT_NEAR(t.tail_rate, 49.0 / excess, 1e-9 * t.tail_rate);
}

TEST(BuildNull, DeterministicUnderSeed) {
  const NullTable a = build_null(1, kKernel, 60, 300, 9);
  const NullTable b = build_null(1, kKernel, 60, 300, 9);
  const NullTable c = build_null(1, kKernel, 60, 300, 10);
  EXPECT_EQ(a.stats, b.stats);
  EXPECT_NE(a.stats, c.stats);
}

TEST(BuildNull, RejectsTinyTables) {
  EXPECT_THROW(build_null(1, kKernel, 10, 1000, 0), InputError);
  EXPECT_THROW(build_null(1, kKernel, 100, 50, 0), InputError);
}

TEST(BuildNull, DegenerateTailThrows) {
  NullTable t;
  t.stats.assign(500, 0.0);
  try {
    fit_exponential_tail(t);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("null degenerate"), std::string::npos);
  }
}

TEST(PValue, ZeroStatisticIsOne) {
  const NullTable& t = shared_table();
  EXPECT_DOUBLE_EQ(t.p_value(100, 0.0), 1.0);
}

TEST(PValue, MedianIsHalf) {
  const NullTable& t = shared_table();
  const double med = t.stats[500];
  EXPECT_NEAR(p_value(t, t.n_ref, med / t.n_ref), 0.5, 1.0 / t.n_sims() + 1e-12);
}

TEST(PValue, NonincreasingAndContinuousAtAnchor) {
  const NullTable& t = shared_table();
  double prev = 2.0;
  const double top = 3.0 * t.stats.back();
  for (int i = 0; i <= 4000; ++i) {
    const double s = top * i / 4000.0;
    const double p = t.p_value(1, s);
    EXPECT_LE(p, prev);
    EXPECT_GT(p, 0.0);
    prev = p;
  }
  const double below = t.p_value(1, std::nextafter(t.tail_anchor, 0.0));
  const double above = t.p_value(1, std::nextafter(t.tail_anchor, INFINITY));
  EXPECT_NEAR(below, above, 1.5 / t.n_sims());
  EXPECT_NEAR(above, t.tail_mass, 1e-9);
}

TEST(PValue, FloorAtTinyValue) {
  const NullTable& t = shared_table();
  EXPECT_DOUBLE_EQ(t.p_value(1, 1e6), 1e-300);
}

TEST(PValue, FreshNullDrawsAreUniform) {
  const NullTable& t = shared_table();
  Rng rng(77);
  std::vector<double> p;
  for (int i = 0; i < 1000; ++i) {
    const Points x = sample_uniform_ball(2, t.n_ref, rng);
    p.push_back(t.p_value(t.n_ref, mmd_sq_vs_uniform_disk(x, kKernel)));
  }
  EXPECT_LE(oracle::ks_distance(p, [](double u) { return u; }), 0.05);
}

TEST(PValue, ScaledStatisticStableAcrossReferenceSize) {
  const NullTable small = build_null(2, kKernel, 250, 600, 21);
  const NullTable large = build_null(2, kKernel, 1000, 600, 22);
  EXPECT_LE(oracle::ks_two_sample(small.stats, large.stats), 0.1);
}

TEST(NullCacheFile, RoundTripAndIdempotence) {
  const auto dir = scratch("roundtrip");
  const NullTable cold = null_cache_get(dir, 2, kKernel, 60, 300, 4);
  const auto file = dir / null_cache_filename(2, kKernel, 60, 300);
  ASSERT_TRUE(fs::exists(file));
  EXPECT_EQ(file.filename().string(), "null_d2_geom0.500000_60_300.bin");
  const auto stamp = fs::last_write_time(file);
  const NullTable warm = null_cache_get(dir, 2, kKernel, 60, 300, 4);
  EXPECT_EQ(cold.stats, warm.stats);
  EXPECT_EQ(cold.tail_rate, warm.tail_rate);
  EXPECT_EQ(stamp, fs::last_write_time(file));
}

TEST(NullCacheFile, KeysSeparateDimensions) {
  const auto dir = scratch("keys");
  null_cache_get(dir, 2, kKernel, 60, 300, 0);
  null_cache_get(dir, 3, kKernel, 60, 300, 0);
  EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 2);
}

TEST(NullCacheFile, TruncatedFileIsRebuilt) {
  const auto dir = scratch("trunc");
  const NullTable first = null_cache_get(dir, 1, kKernel, 60, 300, 5);
  const auto file = dir / null_cache_filename(1, kKernel, 60, 300);
  fs::resize_file(file, fs::file_size(file) / 2);
  EXPECT_THROW(read_null_table(file), InputError);
  const NullTable again = null_cache_get(dir, 1, kKernel, 60, 300, 5);
  EXPECT_EQ(first.stats, again.stats);
  EXPECT_NO_THROW(read_null_table(file));
}

TEST(NullCacheFile, GarbageAndSeedMismatchAreRebuilt) {
  const auto dir = scratch("garbage");
  const auto file = dir / null_cache_filename(1, kKernel, 60, 300);
  {
    std::ofstream out(file, std::ios::binary);
    out << "not a null table at all";
  }
  const NullTable t = null_cache_get(dir, 1, kKernel, 60, 300, 6);
  EXPECT_EQ(t.stats, build_null(1, kKernel, 60, 300, 6).stats);
  const NullTable other = null_cache_get(dir, 1, kKernel, 60, 300, 7);
  EXPECT_EQ(read_null_table(file).seed, 7u);
  EXPECT_NE(t.stats, other.stats);
}

TEST(NullCacheStore, ConcurrentRequestsShareOneTable) {
  NullCache cache(NullConfig{60, 300, 0, {}});
  std::vector<std::shared_ptr<const NullTable>> got(8);
  std::vector<std::thread> pool;
  for (int i = 0; i < 8; ++i) pool.emplace_back([&, i] { got[i] = cache.get(1 + i % 2, kKernel); });
  for (auto& th : pool) th.join();
  for (int i = 2; i < 8; ++i) EXPECT_EQ(got[i].get(), got[i % 2].get());
  EXPECT_NE(got[0].get(), got[1].get());
  EXPECT_EQ(cache.get(1, PowerSeriesKernel::geometric(0.3))->kernel, PowerSeriesKernel::geometric(0.3));
}
