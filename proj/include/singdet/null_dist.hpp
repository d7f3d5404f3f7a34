#pragma once

#include "singdet/common.hpp"
#include "singdet/kernel_mmd.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

namespace singdet {

/// I.i.d. uniform draws from the unit d-disk: normalized Gaussian direction
/// times radius U^(1/d).
Points sample_uniform_ball(int d, int n, Rng& rng);

/// Monte-Carlo null distribution of n_ref * MMD^2 against the unit d-disk,
/// with a shifted-exponential survival tail above the (1 - tail_mass) quantile.
struct NullTable {
  static constexpr double kDefaultTailMass = 0.05;

  int d = 0;
  PowerSeriesKernel kernel = PowerSeriesKernel::geometric(0.5);
  int n_ref = 0;
  std::uint64_t seed = 0;
  std::vector<double> stats;  ///< ascending
  double tail_rate = 0.0;
  double tail_anchor = 0.0;
  double tail_mass = kDefaultTailMass;

  int n_sims() const { return static_cast<int>(stats.size()); }

  /// Survival probability of the scaled statistic k_obs * mmd_sq_obs.
  double p_value(int k_obs, double mmd_sq_obs) const;
};

/// Fits tail_anchor / tail_rate from already-sorted stats. Throws InputError
/// ("null degenerate") when every exceedance is zero.
void fit_exponential_tail(NullTable& table);

NullTable build_null(int d, const PowerSeriesKernel& kernel, int n_ref, int n_sims,
                     std::uint64_t seed);

/// Free-function form of the p-value rule.
inline double p_value(const NullTable& table, int k_obs, double mmd_sq_obs) {
  return table.p_value(k_obs, mmd_sq_obs);
}

/// Cache file name for a key: null_d{d}_{kind}{param}_{n_ref}_{n_sims}.bin
std::string null_cache_filename(int d, const PowerSeriesKernel& kernel, int n_ref, int n_sims);

void write_null_table(const std::filesystem::path& file, const NullTable& table);

/// Reads a table file; throws InputError on any structural problem.
NullTable read_null_table(const std::filesystem::path& file);

/// Load the table for the key from `store`, or build, persist and return it.
/// A missing, corrupt or mismatched file is rebuilt and overwritten.
NullTable null_cache_get(const std::filesystem::path& store, int d,
                         const PowerSeriesKernel& kernel, int n_ref, int n_sims,
                         std::uint64_t seed);

struct NullConfig {
  int n_ref = 500;
  int n_sims = 1000;
  std::uint64_t seed = 0;
  std::filesystem::path directory;  ///< empty: keep tables in memory only
};

/// Concurrency-safe lazy table store keyed by (d, kernel). Concurrent requests
/// for the same key block on one build; different keys proceed independently.
class NullCache {
 public:
  explicit NullCache(NullConfig config = {});

  std::shared_ptr<const NullTable> get(int d, const PowerSeriesKernel& kernel);

  const NullConfig& config() const { return config_; }

 private:
  struct Slot {
    std::mutex mu;
    std::shared_ptr<const NullTable> table;
  };
  using Key = std::tuple<int, int, std::string>;

  NullConfig config_;
  std::mutex mu_;
  std::map<Key, std::shared_ptr<Slot>> slots_;
};

}  // namespace singdet
