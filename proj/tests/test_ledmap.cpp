#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "lnsp/datagen.hpp"
#include "lnsp/led_model.hpp"
#include "lnsp/spectral.hpp"

using namespace lnsp;

namespace {

GridSpec simple_grid(int cols, int rows, double cell = 100.0) {
  GridSpec g;
  g.ref = PlanarRef::at(114.0, 22.5);
  g.origin = {114.0, 22.5, -1};
  g.cell_size = cell;
  g.cols = cols;
  g.rows = rows;
  return g;
}

GridSpec grid_over(const RoadNetwork& net, double pad = 150.0) {
  XY lo, hi;
  net.bounds(lo, hi);
  GridSpec g;
  g.ref = net.ref();
  g.origin = net.ref().to_geo({lo.x - pad, lo.y - pad});
  g.cell_size = 100.0;
  g.cols = static_cast<int>((hi.x - lo.x + 2 * pad) / 100.0) + 1;
  g.rows = static_cast<int>((hi.y - lo.y + 2 * pad) / 100.0) + 1;
  return g;
}

ErrorHistogram hist_with(const std::vector<double>& edges,
                         const std::vector<double>& counts) {
  ErrorHistogram h(edges);
  h.counts = counts;
  h.n = 0.0;
  for (double c : counts) h.n += c;
  return h;
}

std::vector<RouteTrajectory> make_training(const RoadNetwork& net,
                                           const RoutesResult& routes,
                                           const NoiseField& noise, int per_route,
                                           std::uint64_t seed) {
  std::vector<RouteTrajectory> train;
  int k = 0;
  for (const auto& [rid, path] : routes.routes) {
    for (int i = 0; i < per_route; ++i) {
      auto [traj, gt] = gen_trajectory(net, path, noise, 5, 10.0,
                                       derive_seed(seed, 100 + k),
                                       rid + "x" + std::to_string(i));
      train.push_back({rid, std::move(traj)});
      ++k;
    }
  }
  return train;
}

double mixture_loglik_by_hand(const std::vector<double>& params,
                              const std::vector<double>& xs) {
  double z = 0.0;
  for (std::size_t j = 0; j + 2 < params.size(); j += 3) {
    z += params[j] * (1.0 - normal_cdf(-params[j + 1] / params[j + 2]));
  }
  double ll = 0.0;
  for (double x : xs) {
    double dens = 0.0;
    for (std::size_t j = 0; j + 2 < params.size(); j += 3) {
      double zz = (x - params[j + 1]) / params[j + 2];
      dens += params[j] * std::exp(-0.5 * zz * zz) /
              (params[j + 2] * std::sqrt(2.0 * M_PI));
    }
    ll += std::log(dens / z);
  }
  return ll;
}

}  // namespace

TEST_CASE("cell_of: corner convention and bounds") {
  GridSpec g = simple_grid(4, 3);
  CHECK(g.cell_of(g.origin) == 0);

  XY q = g.ref.to_xy(g.origin);
  q.x += 150.0;
  q.y += 50.0;
  CHECK(g.cell_of_xy(q) == 1);  // col 1, row 0

  q = g.ref.to_xy(g.origin);
  q.x -= 1.0;
  CHECK_FALSE(g.cell_of_xy(q).has_value());

  // boundary point belongs to the cell to its northeast
  q = g.ref.to_xy(g.origin);
  q.x += 100.0;
  CHECK(g.cell_of_xy(q) == 1);
}

TEST_CASE("histogram: binning, normalization, cdf, quantile") {
  ErrorHistogram h(default_bin_edges());
  h.add(0.0);
  h.add(12.0);  // edge sample goes to the bin above
  h.add(12.5);
  h.add(500.0);  // clamps into the overflow bin
  CHECK(h.n == 4);
  CHECK(h.counts[0] == 1);
  CHECK(h.counts[12] == 2);
  CHECK(h.counts.back() == 1);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 120.0);
  ErrorHistogram r(default_bin_edges());
  for (int i = 0; i < 1000; ++i) r.add(u(rng));
  double sum = 0.0;
  for (double v : r.normalized()) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

  ErrorHistogram e = hist_with({0.0, 5.0, 10.0}, {3.0, 1.0});
  CHECK(e.cdf(5.0) == doctest::Approx(0.75));
  CHECK(e.cdf(0.0) == 0.0);
  CHECK(e.cdf(10.0) == doctest::Approx(1.0));
  CHECK(e.quantile(0.75) == doctest::Approx(5.0));
}

TEST_CASE("collect_errors: on-route, offset, disjoint cells, unknown route") {
  std::istringstream net_txt(
      "N A 114.0 22.5\n"
      "N B 114.004 22.5\n"
      "S e1 A B 10\n");
  RoadNetwork net = RoadNetwork::load(net_txt);
  GridSpec grid = grid_over(net);

  std::map<std::string, NetPath> routes;
  routes.emplace("r0", full_path(net, {0}));

  const Segment& seg = net.segments()[0];
  Trajectory on_route;
  on_route.id = "a";
  for (int i = 0; i < 5; ++i) {
    on_route.points.push_back(net.ref().to_geo(seg.line.at_offset(20.0 * i), i * 5));
  }
  auto hists = collect_errors(net, routes, {{"r0", on_route}}, grid, default_bin_edges());
  double total = 0.0, first_bin = 0.0;
  for (const auto& [cell, h] : hists) {
    total += h.n;
    first_bin += h.counts[0];
  }
  CHECK(total == 5);
  CHECK(first_bin == 5);

  Trajectory off;
  off.id = "b";
  XY q = seg.line.at_offset(100.0);
  off.points.push_back(net.ref().to_geo(q, 0));
  q.y += 12.5;
  off.points.push_back(net.ref().to_geo(q, 5));
  hists = collect_errors(net, routes, {{"r0", off}}, grid, default_bin_edges());
  double in_bin12 = 0.0;
  for (const auto& [cell, h] : hists) in_bin12 += h.counts[12];
  CHECK(in_bin12 == 1);

  std::vector<std::string> skipped;
  hists = collect_errors(net, routes, {{"nope", off}}, grid, default_bin_edges(), &skipped);
  CHECK(hists.empty());
  REQUIRE(skipped.size() == 1);
  CHECK(skipped[0].find("nope") != std::string::npos);

  Trajectory left, right;
  left.id = "l";
  right.id = "r";
  left.points.push_back(net.ref().to_geo(seg.line.at_offset(10.0), 0));
  left.points.push_back(net.ref().to_geo(seg.line.at_offset(20.0), 5));
  right.points.push_back(net.ref().to_geo(seg.line.at_offset(seg.length - 20.0), 0));
  right.points.push_back(net.ref().to_geo(seg.line.at_offset(seg.length - 10.0), 5));
  hists = collect_errors(net, routes, {{"r0", left}, {"r0", right}}, grid,
                         default_bin_edges());
  CHECK(hists.size() == 2);
  for (const auto& [cell, h] : hists) CHECK(h.n == 2);
}

TEST_CASE("fill_missing: fixed point, identical donors, two-donor mean") {
  GridSpec g = simple_grid(3, 3);
  std::vector<double> edges{0.0, 1.0, 2.0, 3.0};

  CellHistograms full;
  for (int c = 0; c < 9; ++c) full.emplace(c, hist_with(edges, {3.0, 2.0, 1.0}));
  CellHistograms before = full;
  fill_missing(full, g, 5, 3);
  for (int c = 0; c < 9; ++c) {
    CHECK(full.at(c).counts == before.at(c).counts);
    CHECK_FALSE(full.at(c).filled);
  }

  CellHistograms ring;
  for (int c : {1, 3, 5, 7}) ring.emplace(c, hist_with(edges, {8.0, 4.0, 4.0}));
  fill_missing(ring, g, 5, 1);
  REQUIRE(ring.count(4) == 1);
  CHECK(ring.at(4).filled);
  CHECK(ring.at(4).counts[0] == doctest::Approx(0.5));
  CHECK(ring.at(4).counts[1] == doctest::Approx(0.25));
  CHECK(ring.at(4).counts[2] == doctest::Approx(0.25));

  CellHistograms two;
  two.emplace(1, hist_with(edges, {2.0, 2.0, 0.0}));
  two.emplace(7, hist_with(edges, {0.0, 1.0, 1.0}));
  fill_missing(two, g, 2, 1);
  REQUIRE(two.count(4) == 1);
  CHECK(two.at(4).counts[0] == doctest::Approx(0.25));
  CHECK(two.at(4).counts[1] == doctest::Approx(0.5));
  CHECK(two.at(4).counts[2] == doctest::Approx(0.25));
  // cells 3 and 5 touch no donor in this single round and stay empty
  CHECK(two.count(3) == 0);
  CHECK(two.count(5) == 0);
}

TEST_CASE("similarity: kernel bounds and the non-adjacency rule") {
  std::vector<double> edges{0.0, 1.0, 2.0};
  ErrorHistogram a = hist_with(edges, {4.0, 0.0});
  ErrorHistogram b = hist_with(edges, {0.0, 4.0});

  CHECK(similarity(a, a, 0.5, true) == doctest::Approx(1.0));
  CHECK(similarity(a, b, 0.5, false) == 0.0);
  // normalized vectors differ by norm sqrt(2); with sigma = 1 -> exp(-1)
  CHECK(similarity(a, b, 1.0, true) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  ErrorHistogram c = hist_with({0.0, 2.0, 4.0}, {1.0, 1.0});
  CHECK_THROWS_AS(similarity(a, c, 1.0, true), std::invalid_argument);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    ErrorHistogram x = hist_with(edges, {u(rng), u(rng)});
    ErrorHistogram y = hist_with(edges, {u(rng), u(rng)});
    double s = similarity(x, y, 0.7, true);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("spectral_cluster: two blocks recovered; exhaustive ncut agrees") {
  GridSpec g = simple_grid(4, 2);
  const int n = 8;
  AffinityMatrix W(n);
  auto block = [](int cell) { return (cell % 4) < 2 ? 0 : 1; };
  for (int a = 0; a < n; ++a) {
    for (int b : g.neighbors4(a)) {
      double w = block(a) == block(b) ? 1.0 : 0.01;
      W.at(a, b) = w;
      W.at(b, a) = w;
    }
  }
  std::vector<int> labels = spectral_cluster(W, 2, 123);
  REQUIRE(labels.size() == 8);
  CHECK(labels[0] == labels[1]);
  CHECK(labels[0] == labels[4]);
  CHECK(labels[0] == labels[5]);
  CHECK(labels[2] == labels[3]);
  CHECK(labels[2] == labels[6]);
  CHECK(labels[2] == labels[7]);
  CHECK(labels[0] != labels[2]);

  auto ncut = [&](unsigned mask) {
    double cut = 0.0, vol_a = 0.0, vol_b = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        bool ia = mask & (1u << i), ja = mask & (1u << j);
        if (ia) vol_a += W.at(i, j);
        if (!ia) vol_b += W.at(i, j);
        if (ia != ja) cut += W.at(i, j) * 0.5;
      }
    }
    if (vol_a == 0.0 || vol_b == 0.0) return 1e9;
    return cut / vol_a + cut / vol_b;
  };
  unsigned best_mask = 0;
  double best = 1e18;
  for (unsigned mask = 1; mask < (1u << n) - 1; ++mask) {
    double v = ncut(mask);
    if (v < best) {
      best = v;
      best_mask = mask;
    }
  }
  unsigned got_mask = 0;
  for (int i = 0; i < n; ++i) {
    if (labels[i] == labels[0]) got_mask |= 1u << i;
  }
  CHECK((got_mask == best_mask || got_mask == ((~best_mask) & 0xFFu)));
}

TEST_CASE("spectral_cluster: degenerate cases") {
  AffinityMatrix W(4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) W.at(i, j) = 1.0;
    }
  }
  CHECK(spectral_cluster(W, 1, 5) == std::vector<int>(4, 0));

  AffinityMatrix single(1);
  CHECK(spectral_cluster(single, 1, 5) == std::vector<int>{0});
  CHECK_THROWS_AS(spectral_cluster(single, 2, 5), std::invalid_argument);
}

TEST_CASE("fit_distribution: exponential recovery within 10%") {
  std::mt19937_64 rng(2024);
  std::exponential_distribution<double> exp_d(0.2);
  ErrorHistogram h(default_bin_edges());
  for (int i = 0; i < 10000; ++i) h.add(exp_d(rng));
  FitResult fr = fit_distribution(h);
  REQUIRE(fr.best.kind == DistKind::exponential);
  CHECK(fr.best.params[0] == doctest::Approx(0.2).epsilon(0.10));
  CHECK_FALSE(fr.fell_back);
}

TEST_CASE("fit_distribution: truncated gaussian recovery within 0.3") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> nd(8.0, 2.0);
  ErrorHistogram h(default_bin_edges());
  int kept = 0;
  while (kept < 10000) {
    double v = nd(rng);
    if (v >= 0.0) {
      h.add(v);
      ++kept;
    }
  }
  FitResult fr = fit_distribution(h);
  REQUIRE(fr.best.kind == DistKind::gaussian);
  CHECK(std::abs(fr.best.params[0] - 8.0) < 0.3);
  CHECK(std::abs(fr.best.params[1] - 2.0) < 0.3);

  // AIC cross-check against an independently computed log-likelihood
  double z = 1.0 - normal_cdf(-fr.best.params[0] / fr.best.params[1]);
  double ll = 0.0;
  for (double x : h.raw) {
    double s = (std::max(x, 0.01) - fr.best.params[0]) / fr.best.params[1];
    ll += -0.5 * s * s - std::log(fr.best.params[1]) -
          0.5 * std::log(2.0 * M_PI) - std::log(z);
  }
  CHECK(*fr.best.aic == doctest::Approx(2 * 2 - 2 * ll).epsilon(1e-9));
}

TEST_CASE("fit_distribution: bimodal data prefers the mixture by AIC") {
  std::mt19937_64 rng(555);
  std::normal_distribution<double> lo(6.0, 1.5), hi(20.0, 3.0);
  ErrorHistogram h(default_bin_edges());
  for (int i = 0; i < 10000; ++i) {
    double v = (i % 2 == 0) ? lo(rng) : hi(rng);
    if (v < 0.0) v = -v;
    h.add(v);
  }
  FitResult fr = fit_distribution(h);
  REQUIRE(fr.best.kind == DistKind::gaussian_mixture);

  double aic_gauss = 0.0, aic_mix = 0.0;
  std::vector<double> mix_params;
  for (const auto& c : fr.tried) {
    if (c.kind == DistKind::gaussian) aic_gauss = c.aic;
    if (c.kind == DistKind::gaussian_mixture && c.n_params == 5) {
      aic_mix = c.aic;
      mix_params = c.params;
    }
  }
  CHECK(aic_mix < aic_gauss);

  std::vector<double> xs;
  for (double x : h.raw) xs.push_back(std::max(x, 0.01));
  double ll = mixture_loglik_by_hand(mix_params, xs);
  CHECK(aic_mix == doctest::Approx(2 * 5 - 2 * ll).epsilon(1e-6));
}

TEST_CASE("fit_distribution: lognormal recovery") {
  std::mt19937_64 rng(31);
  std::lognormal_distribution<double> ln(2.0, 0.5);
  ErrorHistogram h(default_bin_edges());
  for (int i = 0; i < 10000; ++i) h.add(ln(rng));
  FitResult fr = fit_distribution(h);
  REQUIRE(fr.best.kind == DistKind::lognormal);
  CHECK(fr.best.params[0] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(fr.best.params[1] == doctest::Approx(0.5).epsilon(0.10));
}

TEST_CASE("fit_distribution: small samples fall back to the histogram") {
  ErrorHistogram h(default_bin_edges());
  for (int i = 0; i < 50; ++i) h.add(i * 0.3);
  FitResult fr = fit_distribution(h);
  CHECK(fr.best.kind == DistKind::histogram);
  CHECK(fr.best.insufficient_data);
  CHECK(fr.fell_back);
}

TEST_CASE("AIC picks the planted family in a quick multi-seed sweep") {
  int wins = 0;
  const int trials = 10;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(9000 + t);
    std::exponential_distribution<double> e(0.15);
    ErrorHistogram h(default_bin_edges());
    for (int i = 0; i < 10000; ++i) h.add(e(rng));
    if (fit_distribution(h).best.kind == DistKind::exponential) ++wins;
  }
  CHECK(wins >= 9);
}

TEST_CASE("cdf and quantile identities per family") {
  ErrorDistribution e = ErrorDistribution::exponential(0.1);
  CHECK(e.cdf(0.0) == 0.0);
  CHECK(e.cdf(std::log(2.0) / 0.1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(search_radius(e, 0.99, 15.0, 150.0) ==
        doctest::Approx(std::log(100.0) / 0.1).epsilon(1e-9));

  ErrorDistribution h;
  h.kind = DistKind::histogram;
  h.hist_edges = {0.0, 5.0, 10.0};
  h.hist_weights = {3.0, 1.0};
  CHECK(h.cdf(5.0) == doctest::Approx(0.75));

  ErrorDistribution tight;
  tight.kind = DistKind::histogram;
  tight.hist_edges = {0.0, 5.0};
  tight.hist_weights = {10.0};
  CHECK(search_radius(tight, 0.99, 15.0, 150.0) == 15.0);  // clamped up

  std::vector<ErrorDistribution> dists = {
      ErrorDistribution::gaussian(20.0, 8.0),
      ErrorDistribution::exponential(0.1),
      ErrorDistribution::lognormal(3.0, 0.5),
      ErrorDistribution::mixture({0.5, 8.0, 2.0, 0.5, 30.0, 5.0}),
      h,
  };
  for (const auto& d : dists) {
    double prev = -1.0;
    for (double q : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
      double r = d.quantile(q);
      CHECK(r >= prev);
      prev = r;
    }
  }
}

TEST_CASE("cdf monotone on a fine grid; quantile inverts cdf") {
  std::vector<ErrorDistribution> dists = {
      ErrorDistribution::gaussian(20.0, 8.0),
      ErrorDistribution::gaussian(-2.0, 6.0),  // heavily truncated
      ErrorDistribution::exponential(0.05),
      ErrorDistribution::lognormal(2.5, 0.8),
      ErrorDistribution::mixture({0.6, 10.0, 3.0, 0.4, 45.0, 9.0}),
  };
  for (const auto& d : dists) {
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      double c = d.cdf(i * 0.12);
      CHECK(c >= prev - 1e-12);
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
      prev = c;
    }
    for (double q : {0.5, 0.9, 0.99}) {
      CHECK(d.cdf(d.quantile(q)) == doctest::Approx(q).epsilon(0.002));
    }
  }
}

TEST_CASE("all five distribution kinds are expressible") {
  std::vector<ErrorDistribution> kinds = {
      ErrorDistribution::gaussian(10.0, 3.0),
      ErrorDistribution::mixture({0.5, 5.0, 2.0, 0.3, 15.0, 3.0, 0.2, 40.0, 8.0}),
      ErrorDistribution::exponential(0.2),
      ErrorDistribution::lognormal(2.0, 0.4),
  };
  ErrorHistogram h(default_bin_edges());
  for (int i = 0; i < 300; ++i) h.add(i % 25);
  kinds.push_back(ErrorDistribution::from_histogram(h));
  for (const auto& d : kinds) {
    CHECK(d.cdf(1000.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(d.cdf(0.0) == 0.0);
  }
}

TEST_CASE("build_led: planted two-regime city recovers sigmas") {
  std::uint64_t seed = 42;
  RoadNetwork net = gen_city(6, 6, 200.0, seed);
  GridSpec grid = grid_over(net);

  NoiseField noise;
  noise.grid = grid;
  NoiseRegime west;
  west.col1 = grid.cols / 2;
  west.params = {0.0, 3.0};
  NoiseRegime east;
  east.col0 = grid.cols / 2;
  east.params = {0.0, 15.0};
  noise.regimes = {west, east};

  RoutesResult routes = gen_routes(net, grid, 10, 1200.0, seed);
  auto train = make_training(net, routes, noise, 8, seed);

  LedBuildConfig cfg;
  cfg.k_subregions = 2;
  cfg.seed = seed;
  LedBuildStats stats;
  LedModel model = build_led(net, routes.routes, train, grid, cfg, &stats);
  CHECK(stats.covered_cells > 20);
  CHECK(model.subregion_count() >= 2);

  std::map<int, std::pair<int, int>> side_counts;  // sub -> (west, east) cells
  for (int cell = 0; cell < grid.cell_count(); ++cell) {
    int sub = model.subregion_of_cell(cell);
    if (sub < 0) continue;
    if (grid.col_of(cell) < grid.cols / 2) {
      side_counts[sub].first++;
    } else {
      side_counts[sub].second++;
    }
  }
  int west_sub = -1, east_sub = -1, west_best = 0, east_best = 0;
  for (const auto& [sub, wc] : side_counts) {
    if (wc.first > west_best) {
      west_best = wc.first;
      west_sub = sub;
    }
    if (wc.second > east_best) {
      east_best = wc.second;
      east_sub = sub;
    }
  }
  REQUIRE(west_sub >= 0);
  REQUIRE(east_sub >= 0);
  CHECK(west_sub != east_sub);
  // median-based scale readout: half-normal sigma = median / 0.6745
  auto scale_of = [&](int sub) {
    return model.subregion_dist(sub).quantile(0.5) / 0.674489750196082;
  };
  CHECK(std::abs(scale_of(west_sub) - 3.0) / 3.0 < 0.25);
  CHECK(std::abs(scale_of(east_sub) - 15.0) / 15.0 < 0.25);
  CHECK(model.subregion_radius(west_sub) < model.subregion_radius(east_sub));
}

TEST_CASE("build_led: zero trajectories leaves every query on the fallback") {
  RoadNetwork net = gen_city(3, 3, 200.0, 1);
  GridSpec grid = grid_over(net);
  LedBuildStats stats;
  LedModel model = build_led(net, {}, {}, grid, {}, &stats);
  CHECK(stats.covered_cells == 0);
  CHECK(model.subregion_count() == 0);
  CHECK_THROWS_AS(model.score_error({114.0, 22.5, -1}, 5.0), std::runtime_error);
}

TEST_CASE("build_led: K_g = 1 over connected coverage stays one sub-region") {
  RoadNetwork net = gen_city(4, 4, 200.0, 3, {114.0, 22.5, 0.0, 0.0});
  GridSpec grid = grid_over(net);

  RoutesResult routes = gen_routes(net, grid, 1, 1500.0, 9);
  NoiseField noise;
  noise.grid = grid;
  noise.regimes.push_back({0, 0, 1 << 30, 1 << 30, DistKind::gaussian, {0.0, 4.0}});
  auto train = make_training(net, routes, noise, 12, 3);

  LedBuildConfig cfg;
  cfg.k_subregions = 1;
  LedModel model = build_led(net, routes.routes, train, grid, cfg);
  // scattered single-sample cells may split off; the dominant sub-region
  // must hold nearly everything
  std::map<int, int> sizes;
  int covered = 0;
  for (int cell = 0; cell < grid.cell_count(); ++cell) {
    int s = model.subregion_of_cell(cell);
    if (s >= 0) {
      ++covered;
      sizes[s]++;
    }
  }
  int largest = 0;
  for (auto& [s, c] : sizes) largest = std::max(largest, c);
  CHECK(largest >= covered * 9 / 10);
}

TEST_CASE("sub-regions are 4-connected after the repair pass") {
  std::uint64_t seed = 77;
  RoadNetwork net = gen_city(5, 5, 200.0, seed);
  GridSpec grid = grid_over(net);
  NoiseField noise;
  noise.grid = grid;
  noise.regimes.push_back({0, 0, 1 << 30, 1 << 30, DistKind::exponential, {0.25}});
  RoutesResult routes = gen_routes(net, grid, 6, 1000.0, seed);
  auto train = make_training(net, routes, noise, 6, seed);

  LedBuildConfig cfg;
  cfg.k_subregions = 4;
  cfg.seed = seed;
  LedModel model = build_led(net, routes.routes, train, grid, cfg);

  const auto& cells = model.cell_map();
  for (int sub = 0; sub < model.subregion_count(); ++sub) {
    int start = -1, member_count = 0;
    for (int c = 0; c < grid.cell_count(); ++c) {
      if (cells[c] == sub) {
        ++member_count;
        if (start < 0) start = c;
      }
    }
    REQUIRE(member_count > 0);
    std::vector<int> stack{start};
    std::set<int> seen{start};
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      for (int nb : grid.neighbors4(cur)) {
        if (cells[nb] == sub && !seen.count(nb)) {
          seen.insert(nb);
          stack.push_back(nb);
        }
      }
    }
    CHECK(static_cast<int>(seen.size()) == member_count);
  }
}

TEST_CASE("LED model file round trip reproduces cdf to 1e-12") {
  std::uint64_t seed = 21;
  RoadNetwork net = gen_city(4, 4, 200.0, seed);
  GridSpec grid = grid_over(net);
  NoiseField noise;
  noise.grid = grid;
  noise.regimes.push_back({0, 0, 1 << 30, 1 << 30, DistKind::lognormal, {1.8, 0.6}});
  RoutesResult routes = gen_routes(net, grid, 5, 900.0, seed);
  auto train = make_training(net, routes, noise, 5, seed);

  LedBuildConfig cfg;
  cfg.seed = seed;
  LedModel model = build_led(net, routes.routes, train, grid, cfg);

  std::ostringstream out;
  model.save(out);
  std::istringstream in(out.str());
  LedModel loaded = LedModel::load(in);

  CHECK(loaded.subregion_count() == model.subregion_count());
  CHECK(loaded.cell_map() == model.cell_map());
  CHECK(loaded.sigma() == model.sigma());
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> dx(-0.004, 0.004), de(0.0, 60.0);
  for (int i = 0; i < 300; ++i) {
    GeoPoint p{114.0 + dx(rng), 22.5 + dx(rng), -1};
    double err = de(rng);
    CHECK(std::abs(model.score_error(p, err) - loaded.score_error(p, err)) <= 1e-12);
    CHECK(model.radius_at(p) == loaded.radius_at(p));
  }
}

TEST_CASE("score_error: bounds, quantile identity, monotonicity") {
  std::uint64_t seed = 15;
  RoadNetwork net = gen_city(3, 3, 220.0, seed);
  GridSpec grid = grid_over(net);
  NoiseField noise;
  noise.grid = grid;
  noise.regimes.push_back({0, 0, 1 << 30, 1 << 30, DistKind::exponential, {0.08}});
  RoutesResult routes = gen_routes(net, grid, 4, 700.0, seed);
  auto train = make_training(net, routes, noise, 8, seed);
  LedBuildConfig cfg;
  cfg.seed = seed;
  LedModel model = build_led(net, routes.routes, train, grid, cfg);

  GeoPoint inside = net.nodes()[4].pos;
  CHECK(model.score_error(inside, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
  double prev = 2.0;
  for (double err : {0.0, 2.0, 5.0, 11.0, 30.0, 80.0}) {
    double s = model.score_error(inside, err);
    CHECK(s <= prev + 1e-12);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    prev = s;
  }
  const auto& d = model.dist_at(inside);
  double r = d.quantile(0.99);
  CHECK(1.0 - d.cdf(r) == doctest::Approx(0.01).epsilon(0.01));
  CHECK_THROWS_AS(model.score_error(inside, -1.0), std::invalid_argument);
}
