#ifndef LNSP_MATCHER_HPP
#define LNSP_MATCHER_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lnsp/led_model.hpp"
#include "lnsp/network.hpp"
#include "lnsp/nsp.hpp"
#include "lnsp/routing.hpp"
#include "lnsp/trajectory.hpp"

namespace lnsp {

/// led: sub-region LED radii and scoring. uniform: the SED-ablation scorer,
/// fixed search radius and F(err) = exp(-err / uniform_decay) everywhere.
enum class ScoreMode { led, uniform };

struct MatchParams {
  double window_len = 600.0;   // W_len (m)
  double overlap_len = 300.0;  // W_olen (m)
  int top_k = 4;
  double radius_q = 0.99;
  int max_candidates = 32;
  ScoreMode mode = ScoreMode::led;
  double uniform_radius = 100.0;
  double uniform_decay = 20.0;
  nsp::NspParams nsp;

  void validate() const;
};

/// One retained candidate path for a window, with Eq.-style accumulated
/// score and predecessor links for backtracking.
struct ScoredPath {
  NetPath path;
  std::vector<CandidatePoint> match_points;  // one per window GPS point
  std::vector<double> match_offsets;         // on-path offsets, non-decreasing
  std::vector<double> point_scores;
  double f = 0.0;
  double af = 0.0;
  int w_left = 0;
  int w_right = 0;
  double start_off_in_pred = 0.0;  // offset of our start candidate on pred->path
  std::shared_ptr<const ScoredPath> pred;
};

struct WindowTrace {
  int left = 0;
  int right = 0;
  double f = 0.0;
  NetPath path;
};

/// Final matched route for one trajectory fragment.
struct MatchedPath {
  std::string traj_id;
  NetPath path;
  std::map<int, CandidatePoint> per_point;  // GPS index -> matched point
  double total_af = 0.0;
  std::vector<WindowTrace> chain;           // windows along the chosen route
  int first_idx = 0;
  int last_idx = 0;
};

/// Whole-trajectory result; more than one fragment means the trajectory was
/// split at an unmatchable window (gap). `error` is set when matching
/// aborted entirely.
struct MatchResult {
  std::string traj_id;
  std::vector<MatchedPath> fragments;
  std::string error;
  bool has_gaps() const { return fragments.size() != 1; }
  bool ok() const { return error.empty() && !fragments.empty(); }
};

/// Meter-based sliding windows over the trajectory chord: each window spans
/// at least window_len, successive windows keep at least overlap_len of
/// overlap, and the last window ends at the final point.
std::vector<std::pair<int, int>> window_bounds(const Trajectory& traj,
                                               const PlanarRef& ref,
                                               double window_len,
                                               double overlap_len);

/// Per-point scoring function: upper-tail LED plausibility or the uniform
/// ablation decay, evaluated at the matched point's position.
class Scorer {
 public:
  Scorer(const LedModel* led, const MatchParams& params);
  double operator()(const XY& matched_at, double err) const;
  double radius(const XY& at) const;

 private:
  const LedModel* led_;
  ScoreMode mode_;
  double uniform_radius_;
  double uniform_decay_;
};

struct PathScore {
  double f = 0.0;
  std::vector<CandidatePoint> match_points;
  std::vector<double> offsets;
  std::vector<double> scores;
};

/// Projects each window point onto the path in order (non-decreasing path
/// offset) and sums the per-point scores.
PathScore score_path(const RoadNetwork& net, const Scorer& scorer,
                     const NetPath& path, const std::vector<XY>& window_pts);

/// Keeps the k best entries by (af desc, path length asc, segment ids asc).
void select_top_k(std::vector<std::shared_ptr<ScoredPath>>& paths, int k,
                  const RoadNetwork& net);

/// Sliding-window LED matcher with local non-shortest-path repair.
class SlidingMatcher {
 public:
  SlidingMatcher(const RoadNetwork& net, const LedModel* led, MatchParams params);

  MatchResult match(const Trajectory& traj) const;

  /// LED-radius candidates at one trajectory point, capped at
  /// max_candidates; doubles the radius once when the first pass is empty.
  std::vector<CandidatePoint> window_candidates(const XY& q) const;

  const MatchParams& params() const { return params_; }

 private:
  struct Start {
    CandidatePoint cand;
    std::shared_ptr<const ScoredPath> pred;
    double off_in_pred = 0.0;
  };

  std::vector<std::shared_ptr<ScoredPath>> run_window(
      const std::vector<XY>& pts, int left, int right,
      const std::vector<Start>& starts) const;

  nsp::LocalPath rescore(const std::vector<XY>& pts, const NetPath& path,
                         const CandidatePoint& end_cand, int left, int right) const;
  std::vector<nsp::LocalPath> enumerate_topk(const std::vector<XY>& pts,
                                             const CandidatePoint& start,
                                             const std::vector<CandidatePoint>& ends,
                                             int left, int right, int depth) const;
  nsp::LocalPath nsp_process(const std::vector<XY>& pts, nsp::LocalPath lp,
                             const CandidatePoint& start_cand, int left,
                             int right, int depth) const;
  MatchedPath backtrack(const std::string& traj_id,
                        const std::shared_ptr<const ScoredPath>& best) const;

  const RoadNetwork& net_;
  const LedModel* led_;
  MatchParams params_;
  Scorer scorer_;
};

/// Global shortest-path reference matcher: fixed-radius candidates at the
/// endpoints only; picks the (start, end) shortest path maximizing length
/// similarity minus the mean projection distance normalized by the radius.
std::optional<MatchedPath> match_spt_baseline(const RoadNetwork& net,
                                              const Trajectory& traj,
                                              double radius);

/// Matches a corpus; trajectories are independent, so the loop runs under
/// OpenMP with results stored by index (deterministic regardless of jobs).
std::vector<MatchResult> match_corpus(const RoadNetwork& net, const LedModel* led,
                                      const std::vector<Trajectory>& trajs,
                                      const MatchParams& params, int jobs = 0);

}  // namespace lnsp

#endif
