#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "lnsp/config.hpp"
#include "lnsp/datagen.hpp"
#include "lnsp/evalkit.hpp"
#include "lnsp/files.hpp"
#include "lnsp/led_model.hpp"
#include "lnsp/matcher.hpp"

namespace {

using namespace lnsp;

GridSpec make_grid(const RoadNetwork& net, const RunConfig& cfg) {
  XY lo, hi;
  net.bounds(lo, hi);
  GridSpec grid;
  grid.ref = net.ref();
  grid.origin = net.ref().to_geo({lo.x - cfg.grid_pad, lo.y - cfg.grid_pad});
  grid.cell_size = cfg.cell_size;
  grid.cols = static_cast<int>(std::ceil((hi.x - lo.x + 2 * cfg.grid_pad) / cfg.cell_size));
  grid.rows = static_cast<int>(std::ceil((hi.y - lo.y + 2 * cfg.grid_pad) / cfg.cell_size));
  return grid;
}

NoiseField make_noise(const GridSpec& grid, const RunConfig& cfg) {
  NoiseField field;
  field.grid = grid;
  for (const auto& spec : cfg.noise) {
    NoiseRegime reg;
    reg.col0 = static_cast<int>(std::lround(spec.x0 * grid.cols));
    reg.col1 = static_cast<int>(std::lround(spec.x1 * grid.cols));
    reg.row0 = static_cast<int>(std::lround(spec.y0 * grid.rows));
    reg.row1 = static_cast<int>(std::lround(spec.y1 * grid.rows));
    reg.kind = spec.kind;
    reg.params = spec.params;
    field.regimes.push_back(std::move(reg));
  }
  return field;
}

int cmd_gen(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  RoadNetwork net = gen_city(cfg.city_cols, cfg.city_rows, cfg.city_spacing,
                             cfg.seed, {114.0, 22.5, cfg.oneway_frac, cfg.removal_frac});
  net.save_file(cfg.resolve(cfg.network_file));
  GridSpec grid = make_grid(net, cfg);
  NoiseField noise = make_noise(grid, cfg);

  RoutesResult routes = gen_routes(net, grid, cfg.route_count, cfg.route_min_len,
                                   derive_seed(cfg.seed, 1), cfg.coverage_goal);
  write_routes_file(cfg.resolve(cfg.routes_file), net, routes.routes);

  // fixed-route (training) trajectories
  std::vector<Trajectory> train;
  std::vector<RouteTrajectory> tagged;
  std::uint64_t tseed = 0;
  for (const auto& [rid, path] : routes.routes) {
    for (int k = 0; k < cfg.train_per_route; ++k) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%s_t%03d", rid.c_str(), k);
      auto [traj, truth] = gen_trajectory(net, path, noise, cfg.train_interval_s,
                                          cfg.speed_mps,
                                          derive_seed(cfg.seed, 100 + tseed), buf);
      ++tseed;
      tagged.push_back({rid, traj});
      train.push_back(std::move(traj));
    }
  }
  write_trajectories_file(cfg.resolve(cfg.train_file), train);
  write_route_tags_file(cfg.resolve(cfg.train_tags_file), tagged);

  // evaluation trajectories along fresh random paths, with exact truth
  RoutesResult eval_paths = gen_routes(net, grid, cfg.eval_count, cfg.route_min_len,
                                       derive_seed(cfg.seed, 2), 0.0);
  std::vector<Trajectory> evals;
  GroundTruth truth;
  int ti = 0;
  for (const auto& [rid, path] : eval_paths.routes) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "v%04d", ti);
    auto [traj, gt] = gen_trajectory(net, path, noise, cfg.eval_interval_s,
                                     cfg.speed_mps,
                                     derive_seed(cfg.seed, 5000 + ti), buf);
    evals.push_back(std::move(traj));
    truth.emplace(buf, std::move(gt));
    ++ti;
  }
  write_trajectories_file(cfg.resolve(cfg.eval_file), evals);
  write_ground_truth_file(cfg.resolve(cfg.truth_file), net, truth);

  std::cout << "generated: " << net.nodes().size() << " nodes, "
            << net.segments().size() << " segments, " << routes.routes.size()
            << " routes (cell coverage " << routes.coverage << "), "
            << train.size() << " training + " << evals.size()
            << " evaluation trajectories\n";
  return 0;
}

int cmd_build_led(const RunConfig& cfg) {
  RoadNetwork net = RoadNetwork::load_file(cfg.resolve(cfg.network_file));
  auto routes = read_routes_file(cfg.resolve(cfg.routes_file), net);
  auto train = read_trajectories_file(cfg.resolve(cfg.train_file));
  auto tags = read_route_tags_file(cfg.resolve(cfg.train_tags_file));
  if (train.empty()) throw std::runtime_error("training trajectory file is empty");
  std::vector<RouteTrajectory> tagged;
  for (auto& tr : train) {
    auto it = tags.find(tr.id);
    if (it == tags.end()) {
      throw std::runtime_error("no route tag for trajectory '" + tr.id + "'");
    }
    tagged.push_back({it->second, std::move(tr)});
  }
  GridSpec grid = make_grid(net, cfg);
  LedBuildStats stats;
  LedModel model = build_led(net, routes, tagged, grid, cfg.led, &stats);
  model.save_file(cfg.resolve(cfg.led_file));

  std::cout << "LED model: " << stats.n_subregions << " sub-regions over "
            << stats.covered_cells << " covered cells (K_g=" << model.kg()
            << ", sigma=" << model.sigma() << ")\n";
  std::cout << "distribution families:\n";
  for (const auto& [family, count] : stats.family_counts) {
    std::cout << "  " << family << ": " << count << '\n';
  }
  std::cout << "  (histogram fallbacks: " << stats.fallbacks << ")\n";
  return 0;
}

int cmd_match(const RunConfig& cfg, const std::string& method) {
  RoadNetwork net = RoadNetwork::load_file(cfg.resolve(cfg.network_file));
  auto trajs = read_trajectories_file(cfg.resolve(cfg.eval_file));
  std::vector<MatchResult> results;
  if (method == "spt") {
    results.resize(trajs.size());
    for (std::size_t i = 0; i < trajs.size(); ++i) {
      results[i].traj_id = trajs[i].id;
      try {
        auto mp = match_spt_baseline(net, trajs[i], cfg.eval.spt_radius);
        if (mp) {
          results[i].fragments.push_back(std::move(*mp));
        } else {
          results[i].error = "no endpoint candidates";
        }
      } catch (const std::exception& ex) {
        results[i].error = ex.what();
      }
    }
  } else {
    LedModel led = LedModel::load_file(cfg.resolve(cfg.led_file));
    MatchParams params = method_params(cfg.match, method);
    results = match_corpus(net, &led, trajs, params, cfg.jobs);
  }
  write_match_results_file(cfg.resolve(cfg.match_file), net, results);
  int ok = 0, failed = 0, gaps = 0;
  for (const auto& r : results) {
    if (!r.error.empty()) {
      ++failed;
    } else {
      ++ok;
      if (r.has_gaps()) ++gaps;
    }
  }
  std::cout << "matched " << ok << "/" << results.size() << " trajectories ("
            << failed << " failed, " << gaps << " with gaps) -> "
            << cfg.resolve(cfg.match_file) << '\n';
  return 0;
}

int cmd_eval(const RunConfig& cfg) {
  RoadNetwork net = RoadNetwork::load_file(cfg.resolve(cfg.network_file));
  LedModel led = LedModel::load_file(cfg.resolve(cfg.led_file));
  auto trajs = read_trajectories_file(cfg.resolve(cfg.eval_file));
  GroundTruth truth = read_ground_truth_file(cfg.resolve(cfg.truth_file), net);
  SuiteResult suite = run_suite(net, led, trajs, truth, cfg.match, cfg.eval);
  {
    std::ofstream out(cfg.resolve(cfg.report_file));
    if (!out) throw std::runtime_error("cannot write " + cfg.resolve(cfg.report_file));
    write_report(out, suite.rows);
  }
  {
    std::ofstream out(cfg.resolve(cfg.diag_file));
    if (!out) throw std::runtime_error("cannot write " + cfg.resolve(cfg.diag_file));
    write_diagnostics(out, suite.diagnostics);
  }
  std::cout << "method    interval  acc     prc     mt_ms\n";
  for (const auto& r : suite.rows) {
    std::printf("%-10s %6d  %.4f  %.4f  %8.2f\n", r.method.c_str(), r.interval_s,
                r.acc, r.prc, r.mt_ms);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LED-aware sliding-window offline map matching toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string config_path;
  std::string method = "lnsp";
  std::string out_dir_override;
  std::uint64_t seed_override = 0;
  int jobs_override = -1;
  app.add_option("--config", config_path, "JSON config file (defaults apply when omitted)");
  app.add_option("--out-dir", out_dir_override, "override config out_dir");
  app.add_option("--seed", seed_override, "override config seed");
  app.add_option("--jobs", jobs_override, "worker threads (0 = all cores)");

  auto* gen = app.add_subcommand("gen", "generate the synthetic dataset");
  auto* build = app.add_subcommand("build-led", "build the LED model from fixed routes");
  auto* match = app.add_subcommand("match", "match evaluation trajectories");
  match->add_option("--method", method, "lnsp | lnsp-nonsp | lnsp-nosed | spt")
      ->check(CLI::IsMember({"lnsp", "lnsp-nonsp", "lnsp-nosed", "spt"}));
  auto* eval = app.add_subcommand("eval", "run the full method/interval evaluation");
  auto* pipeline = app.add_subcommand("pipeline", "gen + build-led + match + eval");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = config_path.empty() ? lnsp::default_config()
                                        : lnsp::load_config(config_path);
    if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
    if (seed_override != 0) {
      cfg.seed = seed_override;
      cfg.led.seed = seed_override;
      cfg.eval.seed = seed_override;
    }
    if (jobs_override >= 0) {
      cfg.jobs = jobs_override;
      cfg.led.jobs = jobs_override;
      cfg.eval.jobs = jobs_override;
    }
    if (gen->parsed()) return cmd_gen(cfg);
    if (build->parsed()) return cmd_build_led(cfg);
    if (match->parsed()) return cmd_match(cfg, method);
    if (eval->parsed()) return cmd_eval(cfg);
    if (pipeline->parsed()) {
      int rc = cmd_gen(cfg);
      if (rc == 0) rc = cmd_build_led(cfg);
      if (rc == 0) rc = cmd_match(cfg, method);
      if (rc == 0) rc = cmd_eval(cfg);
      return rc;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
