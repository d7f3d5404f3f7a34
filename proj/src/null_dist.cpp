#include "singdet/null_dist.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace singdet {

namespace {

constexpr char kMagic[8] = {'S', 'D', 'N', 'U', 'L', 'L', '0', '1'};
constexpr double kMinPValue = 1e-300;

std::uint64_t kernel_stream(const PowerSeriesKernel& kernel) {
  const auto param = static_cast<std::uint64_t>(std::llround(kernel.parameter() * 1e6));
  return (static_cast<std::uint64_t>(kernel.kind()) << 56) ^ param;
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint64_t u64() {
    if (pos_ + 8 > bytes_.size()) throw InputError("null table file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 8;
};

}  // namespace

Points sample_uniform_ball(int d, int n, Rng& rng) {
  if (d < 1 || n < 1) throw InputError("sample_uniform_ball: d and n must be positive");
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  Points out(n, d);
  for (int i = 0; i < n; ++i) {
    double sq = 0.0;
    do {
      for (int j = 0; j < d; ++j) out(i, j) = normal(rng);
      sq = out.row(i).squaredNorm();
    } while (sq == 0.0);
    const double radius = std::pow(unif(rng), 1.0 / d);
    out.row(i) *= radius / std::sqrt(sq);
  }
  return out;
}

double NullTable::p_value(int k_obs, double mmd_sq_obs) const {
  if (k_obs < 1) throw InputError("p_value: k_obs must be positive");
  if (stats.empty()) throw InputError("p_value: empty null table");
  const double s = k_obs * mmd_sq_obs;
  if (s > tail_anchor) return std::max(tail_mass * std::exp(-tail_rate * (s - tail_anchor)), kMinPValue);
  const auto first_ge = std::lower_bound(stats.begin(), stats.end(), s);
  const auto count = static_cast<double>(std::distance(first_ge, stats.end()));
  return (count + 1.0) / (static_cast<double>(stats.size()) + 1.0);
}

void fit_exponential_tail(NullTable& table) {
  const auto n = table.stats.size();
  if (n == 0) throw InputError("null degenerate");
  auto anchor_index = static_cast<std::size_t>(std::floor((1.0 - table.tail_mass) * n));
  anchor_index = std::min(anchor_index, n - 1);
  table.tail_anchor = table.stats[anchor_index];
  double excess = 0.0;
  std::size_t count = 0;
  for (std::size_t i = anchor_index + 1; i < n; ++i) {
    excess += table.stats[i] - table.tail_anchor;
    ++count;
  }
  if (count == 0 || excess <= 0.0) throw InputError("null degenerate");
  table.tail_rate = static_cast<double>(count) / excess;
}

NullTable build_null(int d, const PowerSeriesKernel& kernel, int n_ref, int n_sims,
                     std::uint64_t seed) {
  if (d < 1) throw InputError("build_null: d must be positive");
  if (n_ref < 50) throw InputError("build_null: n_ref must be at least 50");
  if (n_sims < 200) throw InputError("build_null: n_sims must be at least 200");

  NullTable table;
  table.d = d;
  table.kernel = kernel;
  table.n_ref = n_ref;
  table.seed = seed;
  table.stats.assign(n_sims, 0.0);

  const std::uint64_t key_seed =
      derive_seed(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(d)), kernel_stream(kernel)),
                  static_cast<std::uint64_t>(n_ref));
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n_sims; ++i) {
    Rng rng(derive_seed(key_seed, static_cast<std::uint64_t>(i)));
    const Points sample = sample_uniform_ball(d, n_ref, rng);
    table.stats[i] = n_ref * mmd_sq_vs_uniform_disk(sample, kernel);
  }
  std::sort(table.stats.begin(), table.stats.end());
  fit_exponential_tail(table);
  return table;
}

std::string null_cache_filename(int d, const PowerSeriesKernel& kernel, int n_ref, int n_sims) {
  return "null_d" + std::to_string(d) + "_" + kernel.fingerprint() + "_" + std::to_string(n_ref) +
         "_" + std::to_string(n_sims) + ".bin";
}

// Layout (little-endian): 8-byte magic, then u64 d, u64 kind, f64 param,
// u64 truncation order, u64 n_ref, u64 n_sims, u64 seed, then n_sims f64 stats.
void write_null_table(const std::filesystem::path& file, const NullTable& table) {
  std::string bytes(kMagic, sizeof kMagic);
  put_u64(bytes, static_cast<std::uint64_t>(table.d));
  put_u64(bytes, static_cast<std::uint64_t>(table.kernel.kind()));
  put_f64(bytes, table.kernel.parameter());
  put_u64(bytes, static_cast<std::uint64_t>(table.kernel.truncation_order()));
  put_u64(bytes, static_cast<std::uint64_t>(table.n_ref));
  put_u64(bytes, static_cast<std::uint64_t>(table.stats.size()));
  put_u64(bytes, table.seed);
  for (double s : table.stats) put_f64(bytes, s);

  std::filesystem::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

NullTable read_null_table(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot open " + file.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw InputError("bad null table header");

  Reader r(bytes);
  NullTable table;
  table.d = static_cast<int>(r.u64());
  const auto kind = r.u64();
  const double param = r.f64();
  const auto order = static_cast<int>(r.u64());
  if (kind == static_cast<std::uint64_t>(KernelKind::Geometric))
    table.kernel = PowerSeriesKernel::geometric(param, order);
  else if (kind == static_cast<std::uint64_t>(KernelKind::ExpDot))
    table.kernel = PowerSeriesKernel::exp_dot(param, order);
  else
    throw InputError("bad kernel kind in null table");
  table.n_ref = static_cast<int>(r.u64());
  const auto n_sims = r.u64();
  table.seed = r.u64();
  if (r.remaining() != n_sims * 8) throw InputError("null table file truncated");
  table.stats.resize(n_sims);
  for (auto& s : table.stats) {
    s = r.f64();
    if (!std::isfinite(s) || s < 0.0) throw InputError("invalid statistic in null table");
  }
  if (!std::is_sorted(table.stats.begin(), table.stats.end()))
    throw InputError("null table statistics not sorted");
  fit_exponential_tail(table);
  return table;
}

NullTable null_cache_get(const std::filesystem::path& store, int d,
                         const PowerSeriesKernel& kernel, int n_ref, int n_sims,
                         std::uint64_t seed) {
  const auto file = store / null_cache_filename(d, kernel, n_ref, n_sims);
  if (std::filesystem::exists(file)) {
    try {
      NullTable table = read_null_table(file);
      if (table.d == d && table.kernel.fingerprint() == kernel.fingerprint() &&
          table.n_ref == n_ref && table.n_sims() == n_sims && table.seed == seed) {
        table.kernel = kernel;
        return table;
      }
      warn("null cache file " + file.string() + " does not match its key; rebuilding");
    } catch (const std::exception& e) {
      warn("null cache file " + file.string() + " unreadable (" + e.what() + "); rebuilding");
    }
  }
  NullTable table = build_null(d, kernel, n_ref, n_sims, seed);
  std::filesystem::create_directories(store);
  write_null_table(file, table);
  return table;
}

NullCache::NullCache(NullConfig config) : config_(std::move(config)) {}

std::shared_ptr<const NullTable> NullCache::get(int d, const PowerSeriesKernel& kernel) {
  std::shared_ptr<Slot> slot;
  {
    std::lock_guard lock(mu_);
    auto& entry = slots_[Key{d, static_cast<int>(kernel.kind()), kernel.fingerprint()}];
    if (!entry) entry = std::make_shared<Slot>();
    slot = entry;
  }
  std::lock_guard lock(slot->mu);
  if (!slot->table) {
    NullTable table =
        config_.directory.empty()
            ? build_null(d, kernel, config_.n_ref, config_.n_sims, config_.seed)
            : null_cache_get(config_.directory, d, kernel, config_.n_ref, config_.n_sims,
                             config_.seed);
    slot->table = std::make_shared<const NullTable>(std::move(table));
  }
  return slot->table;
}

}  // namespace singdet
