#include "singdet/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace singdet;
namespace fs = std::filesystem;

namespace {

fs::path write_file(const std::string& name, const std::string& text) {
  const auto dir = fs::temp_directory_path() / "singdet_io";
  fs::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string error_of(const fs::path& p) {
  try {
    read_points(p);
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

// Direct double sum over the orthonormal DCT-II basis.
std::vector<double> dct_direct(const std::vector<double>& x, int n) {
  std::vector<double> out(x.size());
  auto c = [n](int k) { return k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n); };
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m)
          s += x[j * n + m] * std::cos(M_PI * (j + 0.5) * k / n) * std::cos(M_PI * (m + 0.5) * l / n);
      out[k * n + l] = c(k) * c(l) * s;
    }
  return out;
}

std::vector<double> random_image(int side, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  std::vector<double> v(side * side);
  for (auto& x : v) x = u(g);
  return v;
}

}  // namespace

TEST(Csv, HeaderlessNumbers) {
  const auto p = write_file("plain.csv", "1,2\n3.5,-4e-2\n\n+5,6\n");
  const Points x = read_points(p);
  ASSERT_EQ(x.rows(), 3);
  ASSERT_EQ(x.cols(), 2);
  EXPECT_EQ(x(1, 1), -0.04);
  EXPECT_EQ(x(2, 0), 5.0);
  const auto t = read_csv(p);
  EXPECT_TRUE(t.header.empty());
  EXPECT_EQ(t.line_numbers, (std::vector<std::size_t>{1, 2, 4}));
}

TEST(Csv, HeaderDetected) {
  const auto p = write_file("header.csv", "x, y\n1,2\n3,4\n");
  const auto t = read_csv(p);
  EXPECT_EQ(t.header, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(read_points(p).rows(), 2);
}

TEST(Csv, RaggedRowNamesLine) {
  const auto p = write_file("ragged.csv", "1,2\n3,4\n\n5\n");
  const std::string e = error_of(p);
  EXPECT_NE(e.find(":4:"), std::string::npos) << e;
  EXPECT_NE(e.find("expected 2 columns"), std::string::npos) << e;
}

TEST(Csv, BadNumberNamesLineAndColumn) {
  const auto p = write_file("bad.csv", "1,2\n3,abc\n");
  const std::string e = error_of(p);
  EXPECT_NE(e.find(":2:"), std::string::npos) << e;
  EXPECT_NE(e.find("'abc'"), std::string::npos) << e;
  EXPECT_NE(e.find("column 2"), std::string::npos) << e;
  EXPECT_NE(error_of(write_file("inf.csv", "1,inf\n")).find("bad number"), std::string::npos);
  EXPECT_NE(error_of(write_file("empty_cell.csv", "1,\n")).find("bad number"), std::string::npos);
}

TEST(Csv, MissingAndEmptyFiles) {
  EXPECT_THROW(read_points("/nonexistent/file.csv"), InputError);
  EXPECT_THROW(read_points(write_file("empty.csv", "\n\n")), InputError);
}

TEST(Csv, ParseDouble) {
  double v = 0;
  EXPECT_TRUE(parse_double("1e3", v));
  EXPECT_EQ(v, 1000.0);
  EXPECT_FALSE(parse_double("1.0x", v));
  EXPECT_FALSE(parse_double("", v));
  EXPECT_FALSE(parse_double("x", v));
}

TEST(AtomicWrite, ReplacesContentsLeavesNoTemp) {
  const auto p = fs::temp_directory_path() / "singdet_io" / "atomic.txt";
  fs::create_directories(p.parent_path());
  write_atomic(p, "first");
  write_atomic(p, "second");
  std::ifstream in(p);
  std::string s((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(s, "second");
  EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
  EXPECT_THROW(write_atomic("/nonexistent/dir/x.txt", "a"), InputError);
}

TEST(Dct, SmallKnownValues) {
  const auto c = dct2({1, 2, 3, 4}, 2);
  EXPECT_NEAR(c[0], 5.0, 1e-12);
  EXPECT_NEAR(c[1], -1.0, 1e-12);
  EXPECT_NEAR(c[2], -2.0, 1e-12);
  EXPECT_NEAR(c[3], 0.0, 1e-12);
}

TEST(Dct, ConstantImageDcTerm) {
  for (int side : {1, 4, 28}) {
    Points img = Points::Constant(1, side * side, 3.25);
    const Points out = ingest_dct(img, 1);
    ASSERT_EQ(out.cols(), 1);
    EXPECT_NEAR(out(0, 0), 3.25 * side, 1e-10);
  }
}

TEST(Dct, MatchesDirectSum) {
  const auto x = random_image(7, 1);
  const auto a = dct2(x, 7), b = dct_direct(x, 7);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
}

TEST(Dct, InverseAndEnergy) {
  const auto x = random_image(28, 2);
  const auto c = dct2(x, 28);
  const auto y = idct2(c, 28);
  double ex = 0, ec = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(y[i], x[i], 1e-9);
    ex += x[i] * x[i];
    ec += c[i] * c[i];
  }
  EXPECT_NEAR(ec, ex, 1e-9 * ex);
}

TEST(Dct, IngestKeepsTopLeftBlock) {
  const auto x = random_image(6, 3);
  Points img(2, 36);
  for (int j = 0; j < 36; ++j) {
    img(0, j) = x[j];
    img(1, j) = 2 * x[j];
  }
  const Points out = ingest_dct(img, 3);
  ASSERT_EQ(out.cols(), 9);
  const auto c = dct2(x, 6);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      EXPECT_NEAR(out(0, a * 3 + b), c[a * 6 + b], 1e-12);
      EXPECT_NEAR(out(1, a * 3 + b), 2 * c[a * 6 + b], 1e-9);
    }
  const Points full = ingest_dct(img, 6);
  EXPECT_EQ(full.cols(), 36);
}

TEST(Dct, Errors) {
  EXPECT_THROW(ingest_dct(Points::Zero(1, 10), 1), InputError);
  EXPECT_THROW(ingest_dct(Points::Zero(1, 16), 5), InputError);
  EXPECT_THROW(ingest_dct(Points::Zero(1, 16), 0), InputError);
  EXPECT_THROW(dct2({1, 2, 3}, 2), InputError);
}
