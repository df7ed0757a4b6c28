#ifndef LNSP_CONFIG_HPP
#define LNSP_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "lnsp/evalkit.hpp"
#include "lnsp/led_model.hpp"
#include "lnsp/matcher.hpp"

namespace lnsp {

/// Noise regime in grid-fraction coordinates (resolved to cells once the
/// grid exists).
struct NoiseRegimeSpec {
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  DistKind kind = DistKind::gaussian;
  std::vector<double> params = {0.0, 5.0};
};

/// One config file drives every subcommand; defaults reproduce the
/// committed pipeline (configs/default.json).
struct RunConfig {
  std::uint64_t seed = 1;
  int jobs = 0;
  std::string out_dir = "out";

  // file names (relative to out_dir unless absolute)
  std::string network_file = "network.txt";
  std::string routes_file = "routes.txt";
  std::string train_file = "train.csv";
  std::string train_tags_file = "train_tags.csv";
  std::string eval_file = "eval.csv";
  std::string truth_file = "truth.csv";
  std::string led_file = "led.model";
  std::string match_file = "matches.csv";
  std::string report_file = "report.csv";
  std::string diag_file = "diagnostics.csv";

  // city generation
  int city_cols = 10;
  int city_rows = 10;
  double city_spacing = 200.0;
  double oneway_frac = 0.15;
  double removal_frac = 0.10;

  // grid
  double cell_size = 100.0;
  double grid_pad = 200.0;

  // routes + trajectories
  int route_count = 20;
  double route_min_len = 1500.0;
  double coverage_goal = 0.7;
  int train_per_route = 10;
  int train_interval_s = 5;
  int eval_count = 50;
  int eval_interval_s = 5;
  double speed_mps = 10.0;

  std::vector<NoiseRegimeSpec> noise;

  LedBuildConfig led;
  MatchParams match;
  SuiteConfig eval;

  std::string resolve(const std::string& name) const;
};

RunConfig default_config();
RunConfig load_config(const std::string& path);
void save_config(const RunConfig& cfg, const std::string& path);

}  // namespace lnsp

#endif
