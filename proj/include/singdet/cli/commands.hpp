#pragma once

#include "singdet/common.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace singdet::cli {

enum class Mode { Detect, Auto, MhTest, Synth, Roc, Ingest, Suite };

struct RunConfig {
  Mode mode = Mode::Detect;
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<double> radius;
  std::optional<Index> knn;
  double eta = 0.8;
  double alpha = 0.5;
  std::uint64_t seed = 0;
  int threads = 0;  ///< 0: all cores
  std::filesystem::path null_dir;
  int null_sims = 1000;
  int null_nref = 500;
  double subsample = 1.0;
  std::string grid_json;  ///< inline JSON or a path to a JSON file

  // synth
  std::string shape = "two-spheres";
  int dim = 1;
  Index n = 1000;
  double noise = 0.01;

  // roc
  std::filesystem::path labels;
  std::optional<double> label_radius;  ///< labels file holds distances; 1 where dist <= this

  // ingest-dct
  int keep = 10;

  // suite
  std::string family = "two-spheres";
  std::vector<int> dims{1, 2};
  double scale = 0.2;
};

void cmd_detect(const RunConfig& config);
void cmd_auto(const RunConfig& config);
void cmd_mh_test(const RunConfig& config);
void cmd_synth(const RunConfig& config);
void cmd_roc(const RunConfig& config);
void cmd_ingest_dct(const RunConfig& config);
void cmd_suite(const RunConfig& config);

/// Parses argv (argv[0] is the program name), dispatches and maps failures
/// to exit codes: 0 ok, 1 internal, 2 user input.
int run(const std::vector<std::string>& args);

}  // namespace singdet::cli
