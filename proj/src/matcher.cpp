#include "lnsp/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lnsp {

void MatchParams::validate() const {
  if (!(overlap_len > 0.0 && overlap_len < window_len)) {
    throw std::invalid_argument("require 0 < W_olen < W_len");
  }
  if (top_k < 1) throw std::invalid_argument("top_k must be >= 1");
  if (!(radius_q > 0.0 && radius_q < 1.0)) {
    throw std::invalid_argument("radius quantile must be in (0,1)");
  }
  if (max_candidates < 1) throw std::invalid_argument("max_candidates must be >= 1");
}

std::vector<std::pair<int, int>> window_bounds(const Trajectory& traj,
                                               const PlanarRef& ref,
                                               double window_len,
                                               double overlap_len) {
  traj.validate();
  std::vector<double> cum = traj.chord_cumulative(ref);
  int n = static_cast<int>(cum.size());
  const double eps = 1e-3;  // a millimeter of slack so exact spans count
  std::vector<std::pair<int, int>> out;
  int left = 0;
  while (true) {
    int right = left + 1;
    while (right < n - 1 && cum[right] - cum[left] < window_len - eps) ++right;
    out.emplace_back(left, right);
    if (right == n - 1) break;
    // advance as far as possible while keeping >= overlap_len of the
    // previous window; fall back to a single-point step on sparse gaps
    int next_left = -1;
    for (int i = left + 1; i <= right; ++i) {
      if (cum[right] - cum[i] >= overlap_len - eps) next_left = i;
    }
    left = next_left > left ? next_left : left + 1;
  }
  return out;
}

Scorer::Scorer(const LedModel* led, const MatchParams& params)
    : led_(led),
      mode_(params.mode),
      uniform_radius_(params.uniform_radius),
      uniform_decay_(params.uniform_decay) {
  if (mode_ == ScoreMode::led && led_ == nullptr) {
    throw std::invalid_argument("LED scoring requires a model");
  }
}

double Scorer::operator()(const XY& matched_at, double err) const {
  if (mode_ == ScoreMode::uniform) return std::exp(-err / uniform_decay_);
  return led_->score_error_xy(matched_at, err);
}

double Scorer::radius(const XY& at) const {
  if (mode_ == ScoreMode::uniform) return uniform_radius_;
  return led_->radius_at_xy(at);
}

PathScore score_path(const RoadNetwork& net, const Scorer& scorer,
                     const NetPath& path, const std::vector<XY>& window_pts) {
  if (path.empty()) throw std::invalid_argument("cannot score an empty path");
  PathGeometry geom(net, path);
  PathScore ps;
  ps.match_points.reserve(window_pts.size());
  double prev = 0.0;
  for (const XY& q : window_pts) {
    PolyProjection pp = geom.project(q, prev);
    CandidatePoint cp = geom.locate(net, pp.offset, pp.dist);
    double s = scorer(cp.xy, pp.dist);
    ps.f += s;
    ps.match_points.push_back(std::move(cp));
    ps.offsets.push_back(pp.offset);
    ps.scores.push_back(s);
    prev = pp.offset;
  }
  return ps;
}

namespace {

// scores within this margin count as tied so the deterministic structural
// tie-breaks (length, then ids) decide instead of float dust
constexpr double kScoreTie = 1e-9;

bool scored_less(const RoadNetwork& net, const ScoredPath& a, const ScoredPath& b) {
  if (std::abs(a.af - b.af) > kScoreTie) return a.af > b.af;
  if (std::abs(a.path.length - b.path.length) > 1e-9) {
    return a.path.length < b.path.length;
  }
  std::size_t m = std::min(a.path.segments.size(), b.path.segments.size());
  for (std::size_t i = 0; i < m; ++i) {
    const std::string& ia = net.segment(a.path.segments[i]).id;
    const std::string& ib = net.segment(b.path.segments[i]).id;
    if (ia != ib) return ia < ib;
  }
  if (a.path.segments.size() != b.path.segments.size()) {
    return a.path.segments.size() < b.path.segments.size();
  }
  if (a.path.entry_offset != b.path.entry_offset) {
    return a.path.entry_offset < b.path.entry_offset;
  }
  return a.path.exit_offset < b.path.exit_offset;
}

bool local_less(const RoadNetwork& net, const nsp::LocalPath& a,
                const nsp::LocalPath& b) {
  if (std::abs(a.f - b.f) > kScoreTie) return a.f > b.f;
  if (std::abs(a.path.length - b.path.length) > 1e-9) {
    return a.path.length < b.path.length;
  }
  std::size_t m = std::min(a.path.segments.size(), b.path.segments.size());
  for (std::size_t i = 0; i < m; ++i) {
    const std::string& ia = net.segment(a.path.segments[i]).id;
    const std::string& ib = net.segment(b.path.segments[i]).id;
    if (ia != ib) return ia < ib;
  }
  return a.path.segments.size() < b.path.segments.size();
}

int repair_depth_limit(double chord, double len) {
  return static_cast<int>(std::ceil(chord / std::max(len, 1.0))) + 1;
}

}  // namespace

void select_top_k(std::vector<std::shared_ptr<ScoredPath>>& paths, int k,
                  const RoadNetwork& net) {
  std::sort(paths.begin(), paths.end(),
            [&net](const std::shared_ptr<ScoredPath>& a,
                   const std::shared_ptr<ScoredPath>& b) {
              return scored_less(net, *a, *b);
            });
  if (static_cast<int>(paths.size()) > k) paths.resize(k);
}

SlidingMatcher::SlidingMatcher(const RoadNetwork& net, const LedModel* led,
                               MatchParams params)
    : net_(net), led_(led), params_(std::move(params)), scorer_(led, params_) {
  params_.validate();
}

std::vector<CandidatePoint> SlidingMatcher::window_candidates(const XY& q) const {
  double r = scorer_.radius(q);
  auto v = net_.candidates_xy(q, r);
  if (v.empty()) v = net_.candidates_xy(q, 2.0 * r);  // one escalation
  if (static_cast<int>(v.size()) > params_.max_candidates) {
    v.resize(params_.max_candidates);
  }
  return v;
}

nsp::LocalPath SlidingMatcher::rescore(const std::vector<XY>& pts,
                                       const NetPath& path,
                                       const CandidatePoint& end_cand, int left,
                                       int right) const {
  std::vector<XY> window(pts.begin() + left, pts.begin() + right + 1);
  PathScore ps = score_path(net_, scorer_, path, window);
  nsp::LocalPath lp;
  lp.path = path;
  lp.f = ps.f;
  lp.match_points = std::move(ps.match_points);
  lp.match_offsets = std::move(ps.offsets);
  lp.point_scores = std::move(ps.scores);
  lp.end_cand = end_cand;
  return lp;
}

nsp::LocalPath SlidingMatcher::nsp_process(const std::vector<XY>& pts,
                                           nsp::LocalPath lp,
                                           const CandidatePoint& start_cand,
                                           int left, int right, int depth) const {
  if (!params_.nsp.enabled) return lp;
  double chord = 0.0;
  for (int i = left; i < right; ++i) chord += hypot_xy(pts[i], pts[i + 1]);
  if (chord < params_.nsp.len) return lp;  // recursion base case
  int limit = repair_depth_limit(chord, params_.nsp.len);
  if (depth > limit) {
    throw std::logic_error("NSP recursion exceeded its depth bound");
  }
  if (depth == limit) return lp;

  std::vector<XY> window(pts.begin() + left, pts.begin() + right + 1);
  auto flag = nsp::detect(lp.match_points, window, lp.point_scores, params_.nsp);
  if (!flag) return lp;

  nsp::RepairContext ctx;
  ctx.enumerate_topk = [this, &pts](const CandidatePoint& s,
                                    const std::vector<CandidatePoint>& ends,
                                    int l, int r, int d) {
    return enumerate_topk(pts, s, ends, l, r, d);
  };
  ctx.candidates_at = [this, &pts](int idx) { return window_candidates(pts[idx]); };
  ctx.rescore = [this, &pts](const NetPath& p, const CandidatePoint& e, int l, int r) {
    return rescore(pts, p, e, l, r);
  };
  ctx.chord = [&pts](int a, int b) {
    double c = 0.0;
    for (int i = a; i < b; ++i) c += hypot_xy(pts[i], pts[i + 1]);
    return c;
  };
  auto repaired = nsp::repair(lp, *flag, start_cand, left, right, ctx,
                              params_.nsp, depth + 1);
  return repaired ? std::move(*repaired) : std::move(lp);
}

std::vector<nsp::LocalPath> SlidingMatcher::enumerate_topk(
    const std::vector<XY>& pts, const CandidatePoint& start,
    const std::vector<CandidatePoint>& ends, int left, int right,
    int depth) const {
  std::vector<nsp::LocalPath> out;
  for (const auto& end : ends) {
    auto sp = shortest_path(net_, start, end);
    if (!sp) continue;
    nsp::LocalPath lp = rescore(pts, *sp, end, left, right);
    out.push_back(nsp_process(pts, std::move(lp), start, left, right, depth));
  }
  std::sort(out.begin(), out.end(),
            [this](const nsp::LocalPath& a, const nsp::LocalPath& b) {
              return local_less(net_, a, b);
            });
  if (static_cast<int>(out.size()) > params_.top_k) out.resize(params_.top_k);
  return out;
}

std::vector<std::shared_ptr<ScoredPath>> SlidingMatcher::run_window(
    const std::vector<XY>& pts, int left, int right,
    const std::vector<Start>& starts) const {
  if (starts.empty()) return {};
  std::vector<CandidatePoint> ends = window_candidates(pts[right]);
  if (ends.empty()) return {};

  std::size_t total = starts.size() * ends.size();
  std::vector<std::shared_ptr<ScoredPath>> scored(total);
  int n = static_cast<int>(total);
#ifdef _OPENMP
  bool nested = omp_in_parallel();
#else
  bool nested = true;
#endif
#pragma omp parallel for schedule(dynamic) if (!nested && n > 4)
  for (int i = 0; i < n; ++i) {
    const Start& st = starts[i / ends.size()];
    const CandidatePoint& end = ends[i % ends.size()];
    auto sp = shortest_path(net_, st.cand, end);
    if (!sp) continue;
    nsp::LocalPath lp = rescore(pts, *sp, end, left, right);
    lp = nsp_process(pts, std::move(lp), st.cand, left, right, 0);
    auto out = std::make_shared<ScoredPath>();
    out->path = std::move(lp.path);
    out->match_points = std::move(lp.match_points);
    out->match_offsets = std::move(lp.match_offsets);
    out->point_scores = std::move(lp.point_scores);
    out->f = lp.f;
    out->af = lp.f + (st.pred ? st.pred->af : 0.0);
    out->w_left = left;
    out->w_right = right;
    out->start_off_in_pred = st.off_in_pred;
    out->pred = st.pred;
    scored[i] = std::move(out);
  }
  std::vector<std::shared_ptr<ScoredPath>> live;
  live.reserve(total);
  for (auto& s : scored) {
    if (s) live.push_back(std::move(s));
  }
  select_top_k(live, params_.top_k, net_);
  return live;
}

MatchedPath SlidingMatcher::backtrack(
    const std::string& traj_id,
    const std::shared_ptr<const ScoredPath>& best) const {
  std::vector<const ScoredPath*> chain;
  for (const ScoredPath* p = best.get(); p != nullptr; p = p->pred.get()) {
    chain.push_back(p);
  }
  std::reverse(chain.begin(), chain.end());

  NetPath merged = chain.front()->path;
  for (std::size_t w = 1; w < chain.size(); ++w) {
    // the splice point is this window's start candidate, located on the
    // predecessor path which forms the tail of `merged`
    double t = merged.length - chain[w - 1]->path.length + chain[w]->start_off_in_pred;
    NetPath prefix = PathGeometry(net_, merged).truncate(t);
    merged = splice_paths(prefix, chain[w]->path);
  }

  MatchedPath mp;
  mp.traj_id = traj_id;
  canonicalize_path(net_, merged);
  mp.path = std::move(merged);
  mp.total_af = best->af;
  mp.first_idx = chain.front()->w_left;
  mp.last_idx = chain.back()->w_right;
  for (const ScoredPath* p : chain) {
    for (int i = p->w_left; i <= p->w_right; ++i) {
      mp.per_point[i] = p->match_points[i - p->w_left];  // later window wins
    }
    mp.chain.push_back({p->w_left, p->w_right, p->f, p->path});
  }
  return mp;
}

MatchResult SlidingMatcher::match(const Trajectory& traj) const {
  MatchResult result;
  result.traj_id = traj.id;
  traj.validate();
  std::vector<XY> pts;
  pts.reserve(traj.points.size());
  for (const auto& p : traj.points) pts.push_back(net_.ref().to_xy(p));

  auto windows = window_bounds(traj, net_.ref(), params_.window_len,
                               params_.overlap_len);

  std::vector<std::shared_ptr<ScoredPath>> retained;
  auto fresh_starts = [&](int l) {
    std::vector<Start> starts;
    for (auto& c : window_candidates(pts[l])) starts.push_back({c, nullptr, 0.0});
    return starts;
  };

  for (auto [l, r] : windows) {
    std::vector<Start> starts;
    if (retained.empty()) {
      starts = fresh_starts(l);
    } else {
      for (auto& rp : retained) {
        int li = l - rp->w_left;
        starts.push_back({rp->match_points[li], rp, rp->match_offsets[li]});
      }
    }
    auto got = run_window(pts, l, r, starts);
    if (got.empty() && !retained.empty()) {
      // unmatchable continuation: flush the fragment, restart fresh here
      result.fragments.push_back(backtrack(traj.id, retained.front()));
      retained.clear();
      got = run_window(pts, l, r, fresh_starts(l));
    }
    if (got.empty()) continue;  // gap window; points stay unmatched
    retained = std::move(got);
  }
  if (!retained.empty()) {
    result.fragments.push_back(backtrack(traj.id, retained.front()));
  }
  if (result.fragments.empty()) result.error = "no window could be matched";
  return result;
}

std::optional<MatchedPath> match_spt_baseline(const RoadNetwork& net,
                                              const Trajectory& traj,
                                              double radius) {
  traj.validate();
  std::vector<XY> pts;
  pts.reserve(traj.points.size());
  for (const auto& p : traj.points) pts.push_back(net.ref().to_xy(p));

  auto starts = net.candidates_xy(pts.front(), radius);
  auto ends = net.candidates_xy(pts.back(), radius);
  const std::size_t cap = 32;
  if (starts.size() > cap) starts.resize(cap);
  if (ends.size() > cap) ends.resize(cap);
  if (starts.empty() || ends.empty()) return std::nullopt;

  double traj_len = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    traj_len += hypot_xy(pts[i], pts[i + 1]);
  }

  std::optional<MatchedPath> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    for (const auto& e : ends) {
      auto sp = shortest_path(net, s, e);
      if (!sp) continue;
      PathGeometry geom(net, *sp);
      double prev = 0.0, err_sum = 0.0;
      std::map<int, CandidatePoint> per_point;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        PolyProjection pp = geom.project(pts[i], prev);
        per_point[static_cast<int>(i)] = geom.locate(net, pp.offset, pp.dist);
        err_sum += pp.dist;
        prev = pp.offset;
      }
      double longer = std::max(sp->length, traj_len);
      double length_sim = longer > 1e-9 ? std::min(sp->length, traj_len) / longer : 1.0;
      double score = length_sim - (err_sum / pts.size()) / radius;
      bool better = score > best_score;
      if (!better && score == best_score && best) {
        better = sp->length < best->path.length;
      }
      if (better) {
        MatchedPath mp;
        mp.traj_id = traj.id;
        mp.path = *sp;
        canonicalize_path(net, mp.path);
        mp.per_point = std::move(per_point);
        mp.total_af = score;
        mp.first_idx = 0;
        mp.last_idx = static_cast<int>(pts.size()) - 1;
        mp.chain = {{0, static_cast<int>(pts.size()) - 1, score, *sp}};
        best = std::move(mp);
        best_score = score;
      }
    }
  }
  return best;
}

std::vector<MatchResult> match_corpus(const RoadNetwork& net, const LedModel* led,
                                      const std::vector<Trajectory>& trajs,
                                      const MatchParams& params, int jobs) {
  SlidingMatcher matcher(net, led, params);
  std::vector<MatchResult> out(trajs.size());
  int n = static_cast<int>(trajs.size());
#ifdef _OPENMP
  int nthreads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
#endif
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = matcher.match(trajs[i]);
    } catch (const std::exception& ex) {
      out[i].traj_id = trajs[i].id;
      out[i].error = ex.what();
    }
  }
  return out;
}

}  // namespace lnsp
