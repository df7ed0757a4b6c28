#include "lnsp/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace lnsp {

using nlohmann::json;

std::string RunConfig::resolve(const std::string& name) const {
  if (!name.empty() && name[0] == '/') return name;
  return out_dir + "/" + name;
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.noise = {{0.0, 0.0, 0.5, 1.0, DistKind::gaussian, {0.0, 3.0}},
               {0.5, 0.0, 1.0, 1.0, DistKind::gaussian, {0.0, 15.0}}};
  return cfg;
}

namespace {

template <typename T>
void get_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void parse_noise(const json& j, std::vector<NoiseRegimeSpec>& out) {
  out.clear();
  for (const auto& e : j) {
    NoiseRegimeSpec spec;
    auto rect = e.at("rect");
    if (!rect.is_array() || rect.size() != 4) {
      throw std::runtime_error("noise.rect must be [x0,y0,x1,y1] fractions");
    }
    spec.x0 = rect[0].get<double>();
    spec.y0 = rect[1].get<double>();
    spec.x1 = rect[2].get<double>();
    spec.y1 = rect[3].get<double>();
    auto kind = kind_from_name(e.at("kind").get<std::string>());
    if (!kind || *kind == DistKind::histogram) {
      throw std::runtime_error("noise.kind must be a continuous family");
    }
    spec.kind = *kind;
    spec.params = e.at("params").get<std::vector<double>>();
    out.push_back(std::move(spec));
  }
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw std::runtime_error("config parse error in " + path + ": " + ex.what());
  }
  RunConfig cfg = default_config();
  get_if(j, "seed", cfg.seed);
  get_if(j, "jobs", cfg.jobs);
  get_if(j, "out_dir", cfg.out_dir);
  if (j.contains("files")) {
    const auto& f = j["files"];
    get_if(f, "network", cfg.network_file);
    get_if(f, "routes", cfg.routes_file);
    get_if(f, "train", cfg.train_file);
    get_if(f, "train_tags", cfg.train_tags_file);
    get_if(f, "eval", cfg.eval_file);
    get_if(f, "truth", cfg.truth_file);
    get_if(f, "led", cfg.led_file);
    get_if(f, "matches", cfg.match_file);
    get_if(f, "report", cfg.report_file);
    get_if(f, "diagnostics", cfg.diag_file);
  }
  if (j.contains("city")) {
    const auto& c = j["city"];
    get_if(c, "cols", cfg.city_cols);
    get_if(c, "rows", cfg.city_rows);
    get_if(c, "spacing_m", cfg.city_spacing);
    get_if(c, "oneway_frac", cfg.oneway_frac);
    get_if(c, "removal_frac", cfg.removal_frac);
    if (cfg.city_cols < 2) throw std::runtime_error("config city.cols must be >= 2");
    if (cfg.city_rows < 2) throw std::runtime_error("config city.rows must be >= 2");
  }
  if (j.contains("grid")) {
    get_if(j["grid"], "cell_m", cfg.cell_size);
    get_if(j["grid"], "pad_m", cfg.grid_pad);
    if (!(cfg.cell_size > 0)) throw std::runtime_error("config grid.cell_m must be > 0");
  }
  if (j.contains("routes")) {
    const auto& r = j["routes"];
    get_if(r, "count", cfg.route_count);
    get_if(r, "min_len_m", cfg.route_min_len);
    get_if(r, "coverage_goal", cfg.coverage_goal);
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    get_if(t, "per_route", cfg.train_per_route);
    get_if(t, "interval_s", cfg.train_interval_s);
    get_if(t, "speed_mps", cfg.speed_mps);
  }
  if (j.contains("eval_set")) {
    const auto& e = j["eval_set"];
    get_if(e, "count", cfg.eval_count);
    get_if(e, "interval_s", cfg.eval_interval_s);
  }
  if (j.contains("noise")) parse_noise(j["noise"], cfg.noise);
  if (j.contains("led")) {
    const auto& l = j["led"];
    get_if(l, "kg", cfg.led.k_subregions);
    get_if(l, "sigma", cfg.led.sigma_override);
    get_if(l, "fill_min_samples", cfg.led.fill_min_samples);
    get_if(l, "fill_rounds", cfg.led.fill_rounds);
    get_if(l, "fit_min_samples", cfg.led.fit_min_samples);
    get_if(l, "ks_gate", cfg.led.ks_gate);
    get_if(l, "radius_q", cfg.led.radius_q);
    get_if(l, "radius_min", cfg.led.radius_min);
    get_if(l, "radius_max", cfg.led.radius_max);
    if (l.contains("bin_edges")) cfg.led.bin_edges = l["bin_edges"].get<std::vector<double>>();
  }
  if (j.contains("match")) {
    const auto& m = j["match"];
    get_if(m, "window_len_m", cfg.match.window_len);
    get_if(m, "overlap_len_m", cfg.match.overlap_len);
    get_if(m, "k", cfg.match.top_k);
    get_if(m, "radius_q", cfg.match.radius_q);
    get_if(m, "max_candidates", cfg.match.max_candidates);
    get_if(m, "uniform_radius", cfg.match.uniform_radius);
    get_if(m, "uniform_decay", cfg.match.uniform_decay);
    if (m.contains("nsp")) {
      const auto& n = m["nsp"];
      get_if(n, "enabled", cfg.match.nsp.enabled);
      get_if(n, "n", cfg.match.nsp.n);
      get_if(n, "err", cfg.match.nsp.err);
      get_if(n, "max_err", cfg.match.nsp.max_err);
      get_if(n, "len", cfg.match.nsp.len);
      get_if(n, "deviation_gate", cfg.match.nsp.deviation_gate);
    }
    cfg.match.validate();
  }
  if (j.contains("eval")) {
    const auto& e = j["eval"];
    get_if(e, "methods", cfg.eval.methods);
    get_if(e, "intervals", cfg.eval.intervals);
    get_if(e, "spt_radius", cfg.eval.spt_radius);
  }
  cfg.led.seed = cfg.seed;
  cfg.eval.seed = cfg.seed;
  cfg.eval.jobs = cfg.jobs;
  cfg.led.jobs = cfg.jobs;
  return cfg;
}

void save_config(const RunConfig& cfg, const std::string& path) {
  json j;
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  j["out_dir"] = cfg.out_dir;
  j["city"] = {{"cols", cfg.city_cols},
               {"rows", cfg.city_rows},
               {"spacing_m", cfg.city_spacing},
               {"oneway_frac", cfg.oneway_frac},
               {"removal_frac", cfg.removal_frac}};
  j["grid"] = {{"cell_m", cfg.cell_size}, {"pad_m", cfg.grid_pad}};
  j["routes"] = {{"count", cfg.route_count},
                 {"min_len_m", cfg.route_min_len},
                 {"coverage_goal", cfg.coverage_goal}};
  j["train"] = {{"per_route", cfg.train_per_route},
                {"interval_s", cfg.train_interval_s},
                {"speed_mps", cfg.speed_mps}};
  j["eval_set"] = {{"count", cfg.eval_count}, {"interval_s", cfg.eval_interval_s}};
  j["noise"] = json::array();
  for (const auto& nr : cfg.noise) {
    j["noise"].push_back({{"rect", {nr.x0, nr.y0, nr.x1, nr.y1}},
                          {"kind", kind_name(nr.kind)},
                          {"params", nr.params}});
  }
  j["led"] = {{"kg", cfg.led.k_subregions},
              {"sigma", cfg.led.sigma_override},
              {"fill_min_samples", cfg.led.fill_min_samples},
              {"fill_rounds", cfg.led.fill_rounds},
              {"fit_min_samples", cfg.led.fit_min_samples},
              {"ks_gate", cfg.led.ks_gate},
              {"radius_q", cfg.led.radius_q},
              {"radius_min", cfg.led.radius_min},
              {"radius_max", cfg.led.radius_max}};
  j["match"] = {{"window_len_m", cfg.match.window_len},
                {"overlap_len_m", cfg.match.overlap_len},
                {"k", cfg.match.top_k},
                {"radius_q", cfg.match.radius_q},
                {"max_candidates", cfg.match.max_candidates},
                {"uniform_radius", cfg.match.uniform_radius},
                {"uniform_decay", cfg.match.uniform_decay},
                {"nsp",
                 {{"enabled", cfg.match.nsp.enabled},
                  {"n", cfg.match.nsp.n},
                  {"err", cfg.match.nsp.err},
                  {"max_err", cfg.match.nsp.max_err},
                  {"len", cfg.match.nsp.len},
                  {"deviation_gate", cfg.match.nsp.deviation_gate}}}};
  j["eval"] = {{"methods", cfg.eval.methods},
               {"intervals", cfg.eval.intervals},
               {"spt_radius", cfg.eval.spt_radius}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace lnsp
