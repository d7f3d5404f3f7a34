#include "singdet/cli/commands.hpp"

#include "singdet/evaluation.hpp"
#include "singdet/io.hpp"
#include "singdet/mh_test.hpp"
#include "singdet/synth.hpp"
#include "singdet/tuning.hpp"
#include "singdet/uniformity.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace singdet::cli {

namespace {

using nlohmann::json;

NullCache make_nulls(const RunConfig& c) {
  NullConfig nc;
  nc.n_ref = c.null_nref;
  nc.n_sims = c.null_sims;
  nc.directory = c.null_dir;
  if (!nc.directory.empty()) std::filesystem::create_directories(nc.directory);
  return NullCache(nc);
}

void require_output(const RunConfig& c) {
  if (c.output.empty()) throw InputError("--output is required");
}

Hyperparams fixed_params(const RunConfig& c) {
  if (c.radius.has_value() == c.knn.has_value()) throw InputError("give exactly one of --radius or --knn");
  Hyperparams hp;
  if (c.radius)
    hp.neighborhood = RadiusNeighborhood{*c.radius};
  else
    hp.neighborhood = KnnNeighborhood{*c.knn};
  hp.eta = c.eta;
  hp.kernel = PowerSeriesKernel::geometric(c.alpha);
  hp.validate();
  return hp;
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::string scores_csv(const std::vector<UniformityResult>& results, const Labels& labels) {
  std::ostringstream out;
  out << "index,est_dim,k_obs,mmd,p_value,log_inv_p,label\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out << r.index << ',';
    if (r.d_hat) out << *r.d_hat;
    out << ',' << r.k_obs << ',';
    if (r.mmd) out << num(*r.mmd);
    out << ',';
    if (r.p_value) out << num(*r.p_value) << ',' << num(-std::log(*r.p_value));
    else out << ',';
    out << ',' << static_cast<int>(labels[i]) << '\n';
  }
  return out.str();
}

std::string write_json(const json& j, const std::filesystem::path& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_atomic(out, text);
  return text;
}

SearchGrid parse_grid(const std::string& spec) {
  std::string text = spec;
  if (std::filesystem::exists(spec)) {
    std::ifstream in(spec);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("--grid: ") + e.what());
  }
  SearchGrid g;
  try {
    g.radii = j.at("radii").get<std::vector<double>>();
    if (j.contains("etas")) g.etas = j["etas"].get<std::vector<double>>();
    if (j.contains("alphas")) g.alphas = j["alphas"].get<std::vector<double>>();
    if (g.radii.empty()) throw InputError("--grid: radii must be non-empty");
    const auto [lo, hi] = std::minmax_element(g.radii.begin(), g.radii.end());
    g.r_lower = j.value("r_lower", *lo);
    g.r_upper = j.value("r_upper", *hi);
    g.volume_dim = j.value("volume_dim", 1);
  } catch (const json::exception& e) {
    throw InputError(std::string("--grid: ") + e.what());
  }
  return g;
}

std::string echo(const RunConfig& c) {
  std::ostringstream s;
  s << "input=" << c.input.string() << " output=" << c.output.string() << " seed=" << c.seed
    << " subsample=" << c.subsample << " null_sims=" << c.null_sims << " null_nref=" << c.null_nref;
  if (!c.grid_json.empty()) s << " grid=" << c.grid_json;
  return s.str();
}

// p-value column of a scores CSV, or nullopt when the file is a raw cloud.
std::optional<std::vector<std::optional<double>>> p_column(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto it = std::find(t.header.begin(), t.header.end(), "p_value");
  if (it == t.header.end()) return std::nullopt;
  const auto col = static_cast<std::size_t>(it - t.header.begin());
  std::vector<std::optional<double>> p;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    if (col >= row.size() || row[col].empty()) {
      p.emplace_back();
      continue;
    }
    double v;
    if (!parse_double(row[col], v))
      throw InputError(path.string() + ":" + std::to_string(t.line_numbers[i]) + ": bad p_value");
    p.emplace_back(v);
  }
  return p;
}

// Single numeric column chosen by name (falls back to the only/first column).
std::vector<std::optional<double>> column(const std::filesystem::path& path, const std::vector<std::string>& names,
                                          bool allow_missing) {
  const CsvTable t = read_csv(path);
  std::size_t col = 0;
  for (const auto& name : names) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it != t.header.end()) {
      col = static_cast<std::size_t>(it - t.header.begin());
      break;
    }
  }
  std::vector<std::optional<double>> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = path.string() + ": row " + std::to_string(i + 1) + " (line " +
                              std::to_string(t.line_numbers[i]) + ")";
    if (col >= row.size() || row[col].empty()) {
      if (!allow_missing) throw InputError(where + ": missing value");
      out.emplace_back();
      continue;
    }
    double v;
    if (!parse_double(row[col], v)) throw InputError(where + ": bad value '" + row[col] + "'");
    out.emplace_back(v);
  }
  return out;
}

}  // namespace

void cmd_detect(const RunConfig& c) {
  require_output(c);
  const Hyperparams hp = fixed_params(c);
  const PointCloud cloud(read_points(c.input));
  NullCache nulls = make_nulls(c);
  const auto results = singularity_scores(cloud, hp, nulls, c.subsample, c.seed);
  const Labels labels = filter_labels(p_values_of(results));
  write_atomic(c.output, scores_csv(results, labels));
}

void cmd_auto(const RunConfig& c) {
  require_output(c);
  try {
    const PointCloud cloud(read_points(c.input));
    SearchGrid grid;
    if (c.grid_json.empty()) {
      const LocalScale scale = local_scale(cloud, 50, c.seed);
      grid = default_grid(scale);
    } else {
      grid = parse_grid(c.grid_json);
    }
    NullCache nulls = make_nulls(c);
    GridSearchOptions opts;
    opts.subsample_fraction = c.subsample;
    opts.seed = c.seed;
    const GridSearchResult res = grid_search(cloud, grid, nulls, opts);
    write_atomic(c.output, scores_csv(res.best_results, res.best_labels));
    auto report = c.output;
    report += ".report.csv";
    write_atomic(report, report_csv(res.report));
    std::cerr << "best: r=" << num(res.best_row.r) << " eta=" << res.best_row.eta << " alpha=" << res.best_row.alpha
              << " dispersion=" << num(res.best_row.dispersion) << "\n";
  } catch (const InputError& e) {
    throw InputError(std::string(e.what()) + "\n  config: " + echo(c));
  } catch (const ConsistencyError& e) {
    throw ConsistencyError(std::string(e.what()) + "\n  config: " + echo(c));
  }
}

void cmd_mh_test(const RunConfig& c) {
  NullCache nulls = make_nulls(c);
  std::vector<std::optional<double>> p;
  if (auto col = p_column(c.input)) {
    p = std::move(*col);
  } else {
    const Hyperparams hp = fixed_params(c);
    const PointCloud cloud(read_points(c.input));
    p = p_values_of(singularity_scores(cloud, hp, nulls, c.subsample, c.seed));
  }
  const MhReport rep = manifold_hypothesis_tests(p, PowerSeriesKernel::geometric(c.alpha), nulls);
  json j;
  j["supc"] = rep.supc;
  if (rep.upup) {
    j["upup_stat"] = rep.upup->stat;
    j["upup_p"] = rep.upup->p;
  }
  j["ks_stat"] = rep.ks.stat;
  j["ks_p"] = rep.ks.p;
  j["n_used"] = rep.n_used;
  write_json(j, c.output);
}

void cmd_synth(const RunConfig& c) {
  require_output(c);
  ShapeSpec spec;
  spec.shape = parse_shape(c.shape);
  spec.dim = c.dim;
  spec.n = c.n;
  spec.noise = c.noise;
  spec.seed = c.seed;
  const LabeledCloud data = generate(spec);
  std::ostringstream pts, dist;
  dist << "dist_to_singular\n";
  const auto& x = data.cloud.coords();
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) pts << (j ? "," : "") << num(x(i, j));
    pts << '\n';
    dist << num(data.dist_to_singular[static_cast<std::size_t>(i)]) << '\n';
  }
  write_atomic(c.output, pts.str());
  auto side = c.output;
  side += ".dist.csv";
  write_atomic(side, dist.str());
}

void cmd_roc(const RunConfig& c) {
  if (c.labels.empty()) throw InputError("roc needs --labels");
  const auto scores = column(c.input, {"log_inv_p", "score"}, true);
  const auto raw = column(c.labels, {"label", "dist_to_singular"}, false);
  if (raw.size() != scores.size())
    throw InputError("roc: " + std::to_string(scores.size()) + " scores but " + std::to_string(raw.size()) +
                     " labels");
  Labels labels(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = *raw[i];
    if (c.label_radius) {
      labels[i] = v <= *c.label_radius ? 1 : 0;
    } else if (v == 0.0 || v == 1.0) {
      labels[i] = static_cast<std::uint8_t>(v);
    } else {
      throw InputError(c.labels.string() + ": row " + std::to_string(i + 1) + ": label must be 0 or 1");
    }
  }
  const RocCurve curve = roc_curve(scores, labels);
  json j;
  j["auc"] = curve.auc;
  j["n"] = scores.size() - curve.n_missing;
  j["n_missing"] = curve.n_missing;
  j["n_positive"] = std::count(labels.begin(), labels.end(), 1);
  if (!c.output.empty()) {
    auto poly = c.output;
    poly += ".roc.csv";
    write_atomic(poly, roc_polyline_csv(curve));
  }
  write_json(j, c.output);
}

void cmd_ingest_dct(const RunConfig& c) {
  require_output(c);
  const Points reduced = ingest_dct(read_points(c.input), c.keep);
  std::ostringstream out;
  for (Index i = 0; i < reduced.rows(); ++i) {
    for (Index j = 0; j < reduced.cols(); ++j) out << (j ? "," : "") << num(reduced(i, j));
    out << '\n';
  }
  write_atomic(c.output, out.str());
}

void cmd_suite(const RunConfig& c) {
  NullCache nulls = make_nulls(c);
  const auto rows = run_synthetic_suite(parse_family(c.family), c.dims, c.scale, c.seed, nulls);
  const std::string text = suite_csv(rows);
  if (c.output.empty())
    std::cout << text;
  else
    write_atomic(c.output, text);
}

namespace {

// Fills options the user did not give on the command line from a JSON file.
void apply_config_file(const std::filesystem::path& path, CLI::App& sub, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  auto unset = [&](const std::string& flag) {
    const auto* opt = sub.get_option_no_throw("--" + flag);
    return opt == nullptr || opt->count() == 0;
  };
  try {
    for (auto& [key, value] : j.items()) {
      std::string flag = key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      if (!unset(flag)) continue;
      // A neighbourhood rule on the command line replaces either one in the file.
      if ((key == "radius" || key == "knn") && !(unset("radius") && unset("knn"))) continue;
      if (key == "input") c.input = value.get<std::string>();
      else if (key == "output") c.output = value.get<std::string>();
      else if (key == "radius") c.radius = value.get<double>();
      else if (key == "knn") c.knn = value.get<Index>();
      else if (key == "eta") c.eta = value.get<double>();
      else if (key == "alpha") c.alpha = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "threads") c.threads = value.get<int>();
      else if (key == "null_dir") c.null_dir = value.get<std::string>();
      else if (key == "null_sims") c.null_sims = value.get<int>();
      else if (key == "null_nref") c.null_nref = value.get<int>();
      else if (key == "subsample") c.subsample = value.get<double>();
      else if (key == "grid") c.grid_json = value.is_string() ? value.get<std::string>() : value.dump();
      else if (key == "shape") c.shape = value.get<std::string>();
      else if (key == "dim") c.dim = value.get<int>();
      else if (key == "n") c.n = value.get<Index>();
      else if (key == "noise") c.noise = value.get<double>();
      else if (key == "keep") c.keep = value.get<int>();
      else if (key == "labels") c.labels = value.get<std::string>();
      else if (key == "label_radius") c.label_radius = value.get<double>();
      else if (key == "family") c.family = value.get<std::string>();
      else if (key == "dims") c.dims = value.get<std::vector<int>>();
      else if (key == "scale") c.scale = value.get<double>();
      else warn("config: ignoring unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
}

}  // namespace

int run(const std::vector<std::string>& args) {
  RunConfig c;
  std::string config_path;
  std::optional<double> radius;
  std::optional<Index> knn;
  std::optional<double> label_radius;

  CLI::App app{"singdet: singularity detection in point clouds"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* s) {
    s->add_option("--input", c.input, "input CSV");
    s->add_option("--output", c.output, "output file");
    s->add_option("--seed", c.seed, "random seed");
    s->add_option("--threads", c.threads, "worker threads (0 = all cores)");
    s->add_option("--null-dir", c.null_dir, "null table cache directory");
    s->add_option("--null-sims", c.null_sims, "null simulations per table");
    s->add_option("--null-nref", c.null_nref, "reference sample size of null tables");
    s->add_option("--config", config_path, "JSON config; flags override it");
  };
  auto hyper = [&](CLI::App* s) {
    auto* r = s->add_option("--radius", radius, "neighbourhood radius");
    auto* k = s->add_option("--knn", knn, "neighbourhood size");
    r->excludes(k);
    s->add_option("--eta", c.eta, "explained-variance threshold");
    s->add_option("--alpha", c.alpha, "geometric kernel parameter");
    s->add_option("--subsample", c.subsample, "fraction of points scored");
  };

  auto* detect = app.add_subcommand("detect", "score points at fixed hyperparameters");
  common(detect);
  hyper(detect);
  auto* autos = app.add_subcommand("auto", "tune hyperparameters and score");
  common(autos);
  autos->add_option("--grid", c.grid_json, "JSON grid (inline or file)");
  autos->add_option("--subsample", c.subsample, "fraction of points scored");
  auto* mh = app.add_subcommand("mh-test", "manifold hypothesis tests");
  common(mh);
  hyper(mh);
  auto* synth = app.add_subcommand("synth", "sample a synthetic shape");
  common(synth);
  synth->add_option("--shape", c.shape, "shape name");
  synth->add_option("--dim", c.dim, "stratum dimension");
  synth->add_option("--n", c.n, "sample size");
  synth->add_option("--noise", c.noise, "uniform noise half-width");
  auto* roc = app.add_subcommand("roc", "ROC of scores against labels");
  common(roc);
  roc->add_option("--labels", c.labels, "labels CSV (0/1 or distances)");
  roc->add_option("--label-radius", label_radius, "label 1 where distance <= this");
  auto* ingest = app.add_subcommand("ingest-dct", "reduce square images by 2-D DCT");
  common(ingest);
  ingest->add_option("--keep", c.keep, "keep the top-left keep x keep block");
  auto* suite = app.add_subcommand("suite", "synthetic detection benchmark");
  common(suite);
  suite->add_option("--family", c.family, "solid-ball, two-spheres or two-disks");
  suite->add_option("--dims", c.dims, "stratum dimensions")->delimiter(',');
  suite->add_option("--scale", c.scale, "sample size scale in (0, 1]");
  bool full = false;
  suite->add_flag("--full", full, "full-scale sample sizes");

  std::vector<char*> argv;
  std::vector<std::string> storage(args);
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (radius) c.radius = radius;
    if (knn) c.knn = knn;
    if (label_radius) c.label_radius = label_radius;
    if (!config_path.empty()) apply_config_file(config_path, *sub, c);
    if (full) c.scale = 1.0;
    if (c.threads < 0) throw InputError("--threads must be >= 0");
    if (c.threads > 0) omp_set_num_threads(c.threads);
    if (sub != synth && sub != suite && c.input.empty()) throw InputError("--input is required");

    const std::map<const CLI::App*, Mode> modes{
        {detect, Mode::Detect}, {autos, Mode::Auto},  {mh, Mode::MhTest},    {synth, Mode::Synth},
        {roc, Mode::Roc},       {ingest, Mode::Ingest}, {suite, Mode::Suite}};
    c.mode = modes.at(sub);
    switch (c.mode) {
      case Mode::Detect: cmd_detect(c); break;
      case Mode::Auto: cmd_auto(c); break;
      case Mode::MhTest: cmd_mh_test(c); break;
      case Mode::Synth: cmd_synth(c); break;
      case Mode::Roc: cmd_roc(c); break;
      case Mode::Ingest: cmd_ingest_dct(c); break;
      case Mode::Suite: cmd_suite(c); break;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConsistencyError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace singdet::cli
