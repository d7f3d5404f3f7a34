#pragma once
// Reference computations used only by the tests. None of them call into the
// library's numerical routines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// beta_{d,k} by the ratio recursion beta_{d,k+1} / beta_{d,k} = (k + 1/2) / (k + d/2 + 1).
inline double beta(int d, int k) {
  double b = 1.0;
  for (int j = 0; j < k; ++j) b *= (j + 0.5) / (j + d / 2.0 + 1.0);
  return b;
}

// Uniform point in the unit d-ball by rejection from the cube (d <= 4 only).
template <class Gen>
std::vector<double> ball_point(int d, Gen& g) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(d);
  for (;;) {
    double s = 0.0;
    for (auto& v : x) {
      v = u(g);
      s += v * v;
    }
    if (s <= 1.0) return x;
  }
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Two-sided one-sample KS distance of `v` against the cdf `F`.
template <class F>
double ks_distance(std::vector<double> v, F cdf) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

// Two-sample KS distance.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

// O(n^2) pair count: P(s1 > s0) + P(tie) / 2.
inline double auc_pairs(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      den += 1.0;
    }
  }
  return num / den;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

inline double stddev(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

}  // namespace oracle
