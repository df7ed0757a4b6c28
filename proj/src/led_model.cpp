#include "lnsp/led_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lnsp/spectral.hpp"

namespace lnsp {

namespace {

void collect_into(const RoadNetwork& net, const PathGeometry& route_geom,
                  const Trajectory& traj, const GridSpec& grid,
                  const std::vector<double>& edges, CellHistograms& out) {
  for (const auto& p : traj.points) {
    auto cell = grid.cell_of(p);
    if (!cell) continue;
    XY q = net.ref().to_xy(p);
    PolyProjection pp = route_geom.project(q);
    auto it = out.find(*cell);
    if (it == out.end()) {
      it = out.emplace(*cell, ErrorHistogram(edges)).first;
    }
    it->second.add(pp.dist);
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

CellHistograms collect_errors(const RoadNetwork& net,
                              const std::map<std::string, NetPath>& fixed_routes,
                              const std::vector<RouteTrajectory>& trajectories,
                              const GridSpec& grid,
                              const std::vector<double>& bin_edges,
                              std::vector<std::string>* skipped) {
  std::map<std::string, PathGeometry> geoms;
  for (const auto& [rid, path] : fixed_routes) {
    geoms.emplace(rid, PathGeometry(net, path));
  }
  CellHistograms out;
  for (const auto& rt : trajectories) {
    auto g = geoms.find(rt.route_id);
    if (g == geoms.end()) {
      if (skipped) skipped->push_back(rt.traj.id + ": unknown route '" + rt.route_id + "'");
      continue;
    }
    collect_into(net, g->second, rt.traj, grid, bin_edges, out);
  }
  for (auto& [cell, h] : out) std::sort(h.raw.begin(), h.raw.end());
  return out;
}

CellHistograms collect_errors_parallel(const RoadNetwork& net,
                                       const std::map<std::string, NetPath>& fixed_routes,
                                       const std::vector<RouteTrajectory>& trajectories,
                                       const GridSpec& grid,
                                       const std::vector<double>& bin_edges,
                                       int jobs,
                                       std::vector<std::string>* skipped) {
#ifndef _OPENMP
  (void)jobs;
  return collect_errors(net, fixed_routes, trajectories, grid, bin_edges, skipped);
#else
  if (jobs == 1) {
    return collect_errors(net, fixed_routes, trajectories, grid, bin_edges, skipped);
  }
  std::map<std::string, PathGeometry> geoms;
  for (const auto& [rid, path] : fixed_routes) {
    geoms.emplace(rid, PathGeometry(net, path));
  }
  int nthreads = jobs > 0 ? jobs : omp_get_max_threads();
  std::vector<CellHistograms> partial(nthreads);
  std::vector<std::vector<std::string>> partial_skipped(nthreads);
  int n = static_cast<int>(trajectories.size());
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (int i = 0; i < n; ++i) {
    int tid = omp_get_thread_num();
    const auto& rt = trajectories[i];
    auto g = geoms.find(rt.route_id);
    if (g == geoms.end()) {
      partial_skipped[tid].push_back(rt.traj.id + ": unknown route '" + rt.route_id + "'");
      continue;
    }
    collect_into(net, g->second, rt.traj, grid, bin_edges, partial[tid]);
  }
  CellHistograms out;
  for (auto& part : partial) {
    for (auto& [cell, h] : part) {
      auto it = out.find(cell);
      if (it == out.end()) {
        out.emplace(cell, std::move(h));
      } else {
        it->second.merge(h);
      }
    }
  }
  for (auto& [cell, h] : out) std::sort(h.raw.begin(), h.raw.end());
  if (skipped) {
    for (auto& ps : partial_skipped) {
      skipped->insert(skipped->end(), ps.begin(), ps.end());
    }
    std::sort(skipped->begin(), skipped->end());
  }
  return out;
#endif
}

void fill_missing(CellHistograms& hists, const GridSpec& grid, int min_samples,
                  int rounds) {
  if (rounds < 1) throw std::invalid_argument("fill rounds must be >= 1");
  if (hists.empty()) return;
  const std::vector<double>* edges = &hists.begin()->second.edges;
  auto eligible = [&](int cell) {
    auto it = hists.find(cell);
    if (it == hists.end()) return false;
    return it->second.n >= min_samples || it->second.filled;
  };
  for (int round = 0; round < rounds; ++round) {
    // snapshot donors so a round's fills don't feed each other
    std::vector<std::pair<int, std::vector<double>>> updates;
    for (int cell = 0; cell < grid.cell_count(); ++cell) {
      auto it = hists.find(cell);
      bool needs = it == hists.end() || (it->second.n < min_samples && !it->second.filled);
      if (!needs) continue;
      std::vector<double> mean(edges->size() - 1, 0.0);
      int donors = 0;
      for (int nb : grid.neighbors4(cell)) {
        if (!eligible(nb)) continue;
        std::vector<double> v = hists.at(nb).normalized();
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
        ++donors;
      }
      if (donors == 0) continue;
      for (double& m : mean) m /= donors;
      updates.emplace_back(cell, std::move(mean));
    }
    if (updates.empty()) break;
    for (auto& [cell, vec] : updates) {
      ErrorHistogram h(*edges);
      h.counts = vec;
      h.n = std::accumulate(vec.begin(), vec.end(), 0.0);
      h.filled = true;
      hists[cell] = std::move(h);
    }
  }
}

double similarity(const ErrorHistogram& vi, const ErrorHistogram& vj,
                  double sigma, bool adjacent) {
  if (!adjacent) return 0.0;
  if (vi.edges != vj.edges) throw std::invalid_argument("mismatched bin edges");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  std::vector<double> a = vi.normalized();
  std::vector<double> b = vj.normalized();
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::exp(-d2 / (2.0 * sigma * sigma));
}

LedModel build_led(const RoadNetwork& net,
                   const std::map<std::string, NetPath>& fixed_routes,
                   const std::vector<RouteTrajectory>& trajectories,
                   const GridSpec& grid, const LedBuildConfig& config,
                   LedBuildStats* stats) {
  LedModel model;
  model.grid_ = grid;
  model.bin_edges_ = config.bin_edges.empty() ? default_bin_edges() : config.bin_edges;
  model.radius_q_ = config.radius_q;
  model.radius_min_ = config.radius_min;
  model.radius_max_ = config.radius_max;
  model.cell_sub_.assign(grid.cell_count(), -1);

  {
    std::ostringstream cfg;
    cfg << config.sigma_override << '|' << config.k_subregions << '|'
        << config.fill_min_samples << '|' << config.fill_rounds << '|'
        << config.fit_min_samples << '|' << config.ks_gate << '|'
        << config.radius_q << '|' << config.radius_min << '|' << config.radius_max
        << '|' << config.seed;
    for (double e : model.bin_edges_) cfg << ',' << e;
    model.config_hash_ = std::to_string(fnv1a(cfg.str()));
  }

  CellHistograms collected = collect_errors_parallel(
      net, fixed_routes, trajectories, grid, model.bin_edges_, config.jobs);

  // global pooled fallback from real samples only
  ErrorHistogram pooled(model.bin_edges_);
  for (const auto& [cell, h] : collected) pooled.merge(h);
  FitOptions fit_opt{config.fit_min_samples, config.ks_gate};
  if (pooled.n > 0.0) {
    model.global_ = fit_distribution(pooled, fit_opt).best;
    model.has_global_ = true;
    model.global_radius_ = search_radius(model.global_, config.radius_q,
                                         config.radius_min, config.radius_max);
  }

  CellHistograms working = collected;
  fill_missing(working, grid, config.fill_min_samples, config.fill_rounds);

  std::vector<int> all_covered;
  // clustering runs over cells with solid statistics (enough samples or a
  // neighbor fill); sparse cells are attached to a neighboring sub-region
  // afterwards so noisy histograms cannot distort the cut
  std::vector<int> covered;
  for (const auto& [cell, h] : working) {
    if (h.n <= 0.0) continue;
    all_covered.push_back(cell);
    if (h.n >= config.fill_min_samples || h.filled) covered.push_back(cell);
  }
  if (covered.empty()) covered = all_covered;
  if (stats) stats->covered_cells = static_cast<int>(all_covered.size());
  if (all_covered.empty()) {
    if (stats) stats->n_subregions = 0;
    return model;
  }

  std::map<int, int> covered_index;
  for (std::size_t i = 0; i < covered.size(); ++i) covered_index[covered[i]] = static_cast<int>(i);

  // neighbor-smoothed vectors for the affinity: averaging knocks down
  // per-cell sampling noise so the kernel contrast reflects regime
  // differences, not histogram variance
  std::vector<std::vector<double>> norm(covered.size());
  for (std::size_t i = 0; i < covered.size(); ++i) {
    norm[i] = working.at(covered[i]).normalized();
    int donors = 1;
    for (int nb : grid.neighbors4(covered[i])) {
      if (!covered_index.count(nb)) continue;
      std::vector<double> v = working.at(nb).normalized();
      for (std::size_t k = 0; k < norm[i].size(); ++k) norm[i][k] += v[k];
      ++donors;
    }
    for (double& v : norm[i]) v /= donors;
  }

  // kernel bandwidth: median distance over adjacent covered pairs
  double sigma = config.sigma_override;
  if (sigma <= 0.0) {
    std::vector<double> dists;
    for (std::size_t i = 0; i < covered.size(); ++i) {
      for (int nb : grid.neighbors4(covered[i])) {
        auto it = covered_index.find(nb);
        if (it == covered_index.end() || nb < covered[i]) continue;
        double d2 = 0.0;
        const auto& a = norm[i];
        const auto& b = norm[it->second];
        for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
        dists.push_back(std::sqrt(d2));
      }
    }
    if (!dists.empty()) {
      std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
      sigma = dists[dists.size() / 2];
    }
    if (sigma <= 1e-9) sigma = 1e-3;
  }
  model.sigma_ = sigma;

  int n = static_cast<int>(covered.size());
  if (config.k_subregions > n) {
    throw std::invalid_argument("K_g exceeds covered-cell count");
  }

  // connected components of the reliable-cell adjacency; the eigenvectors of
  // a disconnected graph only encode its components, so the spectral split
  // runs inside the largest component and smaller ones become own labels
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> comp_members;
  for (int i = 0; i < n; ++i) {
    if (comp[i] != -1) continue;
    int cid = static_cast<int>(comp_members.size());
    comp_members.emplace_back();
    std::vector<int> stack{i};
    comp[i] = cid;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      comp_members[cid].push_back(cur);
      for (int nb : grid.neighbors4(covered[cur])) {
        auto it = covered_index.find(nb);
        if (it != covered_index.end() && comp[it->second] == -1) {
          comp[it->second] = cid;
          stack.push_back(it->second);
        }
      }
    }
  }
  std::size_t main_comp = 0;
  for (std::size_t c = 1; c < comp_members.size(); ++c) {
    if (comp_members[c].size() > comp_members[main_comp].size()) main_comp = c;
  }
  const std::vector<int>& main_cells = comp_members[main_comp];
  int m = static_cast<int>(main_cells.size());

  std::vector<int> pos_in_main(n, -1);
  for (int i = 0; i < m; ++i) pos_in_main[main_cells[i]] = i;
  AffinityMatrix W(m);
  for (int i = 0; i < m; ++i) {
    for (int nb : grid.neighbors4(covered[main_cells[i]])) {
      auto it = covered_index.find(nb);
      if (it == covered_index.end()) continue;
      int j = pos_in_main[it->second];
      if (j < 0) continue;
      double d2 = 0.0;
      const auto& a = norm[main_cells[i]];
      const auto& b = norm[main_cells[j]];
      for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
      double s = std::exp(-d2 / (2.0 * sigma * sigma));
      W.at(i, j) = s;
      W.at(j, i) = s;
    }
  }

  int kg = config.k_subregions;
  // paper-like sub-region density (~16-30 cells each) keeps pooled fits
  // above the sample floor; the spectrum of noisy data has no gap at all
  // beyond that scale
  int cap = std::clamp(m / 16, 1, 32);
  if (kg <= 0) kg = eigengap_k(W, cap);
  kg = std::min(kg, m);
  model.kg_ = kg;

  std::vector<int> main_labels = kg == 1 ? std::vector<int>(m, 0)
                                         : spectral_cluster(W, kg, config.seed);
  std::vector<int> labels(n, -1);
  for (int i = 0; i < m; ++i) labels[main_cells[i]] = main_labels[i];
  {
    int next = kg;
    for (std::size_t c = 0; c < comp_members.size(); ++c) {
      if (c == main_comp) continue;
      for (int idx : comp_members[c]) labels[idx] = next;
      ++next;
    }
  }

  // connectivity repair: split each label class into 4-connected components
  std::vector<int> final_label(n, -1);
  int next_id = 0;
  for (int i = 0; i < n; ++i) {
    if (final_label[i] != -1) continue;
    int id = next_id++;
    std::vector<int> stack{i};
    final_label[i] = id;
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      for (int nb : grid.neighbors4(covered[cur])) {
        auto it = covered_index.find(nb);
        if (it == covered_index.end()) continue;
        int j = it->second;
        if (final_label[j] == -1 && labels[j] == labels[cur]) {
          final_label[j] = id;
          stack.push_back(j);
        }
      }
    }
  }

  for (int i = 0; i < n; ++i) model.cell_sub_[covered[i]] = final_label[i];

  // attach sparse covered cells to the most-similar adjacent sub-region;
  // anything unreachable becomes its own connected sub-region
  {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int cell : all_covered) {
        if (model.cell_sub_[cell] != -1) continue;
        int best_sub = -1;
        double best_sim = -1.0;
        for (int nb : grid.neighbors4(cell)) {
          if (nb >= static_cast<int>(model.cell_sub_.size())) continue;
          int sub = model.cell_sub_[nb];
          if (sub < 0 || !working.count(nb)) continue;
          double s = similarity(working.at(cell), working.at(nb), sigma, true);
          if (s > best_sim || (s == best_sim && sub < best_sub)) {
            best_sim = s;
            best_sub = sub;
          }
        }
        if (best_sub >= 0) {
          model.cell_sub_[cell] = best_sub;
          changed = true;
        }
      }
    }
    for (int cell : all_covered) {
      if (model.cell_sub_[cell] != -1) continue;
      int id = next_id++;
      std::vector<int> stack{cell};
      model.cell_sub_[cell] = id;
      while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        for (int nb : grid.neighbors4(cur)) {
          if (nb < static_cast<int>(model.cell_sub_.size()) &&
              model.cell_sub_[nb] == -1 && working.count(nb) &&
              working.at(nb).n > 0.0) {
            model.cell_sub_[nb] = id;
            stack.push_back(nb);
          }
        }
      }
    }
  }

  // per-sub-region pooled fit from real (pre-fill) samples
  model.subs_.resize(next_id);
  model.sub_radius_.resize(next_id);
  std::vector<ErrorHistogram> pools(next_id, ErrorHistogram(model.bin_edges_));
  std::vector<ErrorHistogram> filled_pools(next_id, ErrorHistogram(model.bin_edges_));
  for (int cell : all_covered) {
    int label = model.cell_sub_[cell];
    auto it = collected.find(cell);
    if (it != collected.end()) pools[label].merge(it->second);
    filled_pools[label].merge(working.at(cell));
  }
  for (int s = 0; s < next_id; ++s) {
    const ErrorHistogram& src = pools[s].n > 0.0 ? pools[s] : filled_pools[s];
    FitResult fr = fit_distribution(src, fit_opt);
    model.subs_[s] = fr.best;
    model.sub_radius_[s] = search_radius(fr.best, config.radius_q,
                                         config.radius_min, config.radius_max);
    if (stats) {
      ++stats->family_counts[kind_name(fr.best.kind)];
      if (fr.fell_back) ++stats->fallbacks;
    }
  }
  if (stats) stats->n_subregions = next_id;
  return model;
}

LedModel LedModel::assemble(const GridSpec& grid,
                            std::vector<int> cell_to_subregion,
                            std::vector<ErrorDistribution> subregions,
                            std::optional<ErrorDistribution> global,
                            double radius_q, double radius_min,
                            double radius_max) {
  LedModel m;
  m.grid_ = grid;
  if (static_cast<int>(cell_to_subregion.size()) != grid.cell_count()) {
    throw std::invalid_argument("cell map size does not match the grid");
  }
  for (int v : cell_to_subregion) {
    if (v < -1 || v >= static_cast<int>(subregions.size())) {
      throw std::invalid_argument("cell map references a missing sub-region");
    }
  }
  m.cell_sub_ = std::move(cell_to_subregion);
  m.subs_ = std::move(subregions);
  m.radius_q_ = radius_q;
  m.radius_min_ = radius_min;
  m.radius_max_ = radius_max;
  m.bin_edges_ = default_bin_edges();
  m.kg_ = static_cast<int>(m.subs_.size());
  m.sub_radius_.resize(m.subs_.size());
  for (std::size_t i = 0; i < m.subs_.size(); ++i) {
    m.sub_radius_[i] = search_radius(m.subs_[i], radius_q, radius_min, radius_max);
  }
  if (global) {
    m.global_ = std::move(*global);
    m.has_global_ = true;
    m.global_radius_ = search_radius(m.global_, radius_q, radius_min, radius_max);
  }
  return m;
}

int LedModel::subregion_of_cell(int cell) const {
  if (cell < 0 || cell >= static_cast<int>(cell_sub_.size())) return -1;
  return cell_sub_[cell];
}

int LedModel::subregion_at(const GeoPoint& p) const {
  auto cell = grid_.cell_of(p);
  return cell ? subregion_of_cell(*cell) : -1;
}

int LedModel::subregion_at_xy(const XY& q) const {
  auto cell = grid_.cell_of_xy(q);
  return cell ? subregion_of_cell(*cell) : -1;
}

const ErrorDistribution& LedModel::global_dist() const {
  if (!has_global_) throw std::runtime_error("LED model holds no data");
  return global_;
}

const ErrorDistribution& LedModel::dist_at(const GeoPoint& p) const {
  int s = subregion_at(p);
  return s >= 0 ? subs_[s] : global_dist();
}

const ErrorDistribution& LedModel::dist_at_xy(const XY& q) const {
  int s = subregion_at_xy(q);
  return s >= 0 ? subs_[s] : global_dist();
}

double LedModel::score_error(const GeoPoint& at, double err) const {
  if (err < 0.0) throw std::invalid_argument("error must be non-negative");
  return 1.0 - dist_at(at).cdf(err);
}

double LedModel::score_error_xy(const XY& at, double err) const {
  if (err < 0.0) throw std::invalid_argument("error must be non-negative");
  return 1.0 - dist_at_xy(at).cdf(err);
}

double LedModel::radius_at(const GeoPoint& p) const {
  int s = subregion_at(p);
  if (s >= 0) return sub_radius_[s];
  if (!has_global_) throw std::runtime_error("LED model holds no data");
  return global_radius_;
}

double LedModel::radius_at_xy(const XY& q) const {
  int s = subregion_at_xy(q);
  if (s >= 0) return sub_radius_[s];
  if (!has_global_) throw std::runtime_error("LED model holds no data");
  return global_radius_;
}

double LedModel::radius_for(double q, const XY& at) const {
  int s = subregion_at_xy(at);
  const ErrorDistribution& d = s >= 0 ? subs_[s] : global_dist();
  return search_radius(d, q, radius_min_, radius_max_);
}

namespace {

void write_dist(std::ostream& out, const ErrorDistribution& d) {
  out << kind_name(d.kind);
  if (d.kind == DistKind::histogram) {
    out << ' ' << d.hist_edges.size();
    for (double e : d.hist_edges) out << ' ' << e;
    for (double w : d.hist_weights) out << ' ' << w;
  } else {
    out << ' ' << d.params.size();
    for (double p : d.params) out << ' ' << p;
  }
  if (d.aic) {
    out << " AIC " << *d.aic;
  } else {
    out << " AIC NA";
  }
  if (d.insufficient_data) out << " LOWDATA";
  out << '\n';
}

ErrorDistribution read_dist(std::istringstream& ss, int line_no) {
  auto fail = [line_no](const std::string& m) -> std::runtime_error {
    return std::runtime_error("LED model parse error at line " +
                              std::to_string(line_no) + ": " + m);
  };
  std::string kname;
  if (!(ss >> kname)) throw fail("missing distribution kind");
  auto kind = kind_from_name(kname);
  if (!kind) throw fail("unknown distribution kind '" + kname + "'");
  ErrorDistribution d;
  d.kind = *kind;
  std::size_t count;
  if (!(ss >> count)) throw fail("missing parameter count");
  if (d.kind == DistKind::histogram) {
    d.hist_edges.resize(count);
    for (auto& e : d.hist_edges) {
      if (!(ss >> e)) throw fail("truncated histogram edges");
    }
    d.hist_weights.resize(count > 0 ? count - 1 : 0);
    for (auto& w : d.hist_weights) {
      if (!(ss >> w)) throw fail("truncated histogram weights");
    }
  } else {
    d.params.resize(count);
    for (auto& p : d.params) {
      if (!(ss >> p)) throw fail("truncated parameters");
    }
  }
  std::string tag, aic;
  if (ss >> tag >> aic) {
    if (tag != "AIC") throw fail("expected AIC tag");
    if (aic != "NA") d.aic = std::stod(aic);
  }
  if (ss >> tag && tag == "LOWDATA") d.insufficient_data = true;
  return d;
}

}  // namespace

void LedModel::save(std::ostream& out) const {
  out << std::setprecision(17);
  out << "LEDMODEL v1\n";
  out << "REF " << grid_.ref.lon0 << ' ' << grid_.ref.lat0 << '\n';
  out << "GRID " << grid_.origin.lon << ' ' << grid_.origin.lat << ' '
      << grid_.cell_size << ' ' << grid_.cols << ' ' << grid_.rows << '\n';
  out << "SIGMA " << sigma_ << '\n';
  out << "KG " << kg_ << '\n';
  out << "RADIUS " << radius_q_ << ' ' << radius_min_ << ' ' << radius_max_ << '\n';
  out << "BINS " << bin_edges_.size();
  for (double e : bin_edges_) out << ' ' << e;
  out << '\n';
  out << "CONFIG " << config_hash_ << '\n';
  out << "CELLS";
  for (int v : cell_sub_) out << ' ' << v;
  out << '\n';
  out << "NSUB " << subs_.size() << '\n';
  for (std::size_t i = 0; i < subs_.size(); ++i) {
    out << "DIST " << i << ' ';
    write_dist(out, subs_[i]);
  }
  if (has_global_) {
    out << "GLOBAL ";
    write_dist(out, global_);
  } else {
    out << "GLOBAL none\n";
  }
  out << "END\n";
}

void LedModel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write LED model file: " + path);
  save(out);
}

LedModel LedModel::load(std::istream& in) {
  LedModel m;
  std::string line;
  int line_no = 0;
  auto next = [&](const char* what) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line[0] != '#') return;
    }
    throw std::runtime_error(std::string("LED model file truncated; expected ") + what);
  };
  next("header");
  if (line != "LEDMODEL v1") throw std::runtime_error("not a LED model file");
  double lon0 = 0.0, lat0 = 0.0;
  next("REF");
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag >> lon0 >> lat0;
    if (tag != "REF") throw std::runtime_error("expected REF line");
  }
  next("GRID");
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag >> m.grid_.origin.lon >> m.grid_.origin.lat >> m.grid_.cell_size >>
        m.grid_.cols >> m.grid_.rows;
    if (tag != "GRID") throw std::runtime_error("expected GRID line");
    m.grid_.ref = PlanarRef::at(lon0, lat0);
  }
  next("SIGMA");
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag >> m.sigma_;
  }
  next("KG");
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag >> m.kg_;
  }
  next("RADIUS");
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag >> m.radius_q_ >> m.radius_min_ >> m.radius_max_;
  }
  next("BINS");
  {
    std::istringstream ss(line);
    std::string tag;
    std::size_t count;
    ss >> tag >> count;
    m.bin_edges_.resize(count);
    for (auto& e : m.bin_edges_) ss >> e;
  }
  next("CONFIG");
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag >> m.config_hash_;
  }
  next("CELLS");
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    m.cell_sub_.resize(static_cast<std::size_t>(m.grid_.cols) * m.grid_.rows);
    for (auto& v : m.cell_sub_) {
      if (!(ss >> v)) throw std::runtime_error("CELLS array shorter than grid");
    }
  }
  next("NSUB");
  std::size_t nsub = 0;
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag >> nsub;
  }
  m.subs_.resize(nsub);
  m.sub_radius_.resize(nsub);
  for (std::size_t i = 0; i < nsub; ++i) {
    next("DIST");
    std::istringstream ss(line);
    std::string tag;
    std::size_t id;
    ss >> tag >> id;
    if (tag != "DIST" || id >= nsub) {
      throw std::runtime_error("bad DIST record at line " + std::to_string(line_no));
    }
    m.subs_[id] = read_dist(ss, line_no);
    m.sub_radius_[id] = search_radius(m.subs_[id], m.radius_q_, m.radius_min_, m.radius_max_);
  }
  next("GLOBAL");
  {
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    auto pos = ss.tellg();
    std::string peek;
    ss >> peek;
    if (peek != "none") {
      ss.clear();
      ss.seekg(pos);
      m.global_ = read_dist(ss, line_no);
      m.has_global_ = true;
      m.global_radius_ = search_radius(m.global_, m.radius_q_, m.radius_min_, m.radius_max_);
    }
  }
  return m;
}

LedModel LedModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open LED model file: " + path);
  return load(in);
}

}  // namespace lnsp
