#ifndef LNSP_NSP_HPP
#define LNSP_NSP_HPP

#include <functional>
#include <optional>
#include <vector>

#include "lnsp/network.hpp"
#include "lnsp/routing.hpp"

namespace lnsp::nsp {

/// Thresholds for local non-shortest-path detection. Defaults were tuned on
/// the synthetic pilot datasets; all are configurable.
struct NspParams {
  bool enabled = true;
  int n = 3;                    // minimum consecutive high-error points
  double err = 20.0;            // per-point error threshold (m)
  double max_err = 40.0;        // run peak must exceed this (m)
  double len = 80.0;            // minimum flagged-run chord length (m)
  double deviation_gate = 0.05; // flag only when mean plausibility drops below
};

/// A flagged away-then-return run of window points.
struct NspFlag {
  int start_idx = 0;
  int end_idx = 0;
  int peak_idx = 0;
  double peak_err = 0.0;
};

/// Scans the matched window for the longest run of >= n consecutive points
/// with projection error above `err`; flags it when the peak exceeds
/// max_err, the run's chord length exceeds `len`, and the run's mean
/// plausibility score falls below deviation_gate.
std::optional<NspFlag> detect(const std::vector<CandidatePoint>& match_points,
                              const std::vector<XY>& window_points,
                              const std::vector<double>& point_scores,
                              const NspParams& params);

/// A candidate path local to one window, scored by window score f only.
struct LocalPath {
  NetPath path;
  double f = 0.0;
  std::vector<CandidatePoint> match_points;
  std::vector<double> match_offsets;
  std::vector<double> point_scores;
  CandidatePoint end_cand;  // the end candidate the path was routed to
};

/// Matcher services the repair needs; implemented by the sliding matcher.
/// Indices are trajectory-global; `depth` is the recursion budget.
struct RepairContext {
  /// Top-k paths from one start candidate to each of `ends` over
  /// [left, right], scored and (recursively) repair-processed.
  std::function<std::vector<LocalPath>(const CandidatePoint& start,
                                       const std::vector<CandidatePoint>& ends,
                                       int left, int right, int depth)>
      enumerate_topk;
  /// LED-radius candidates at a trajectory point.
  std::function<std::vector<CandidatePoint>(int idx)> candidates_at;
  /// Scores an already-built path over [left, right] (no repair).
  std::function<LocalPath(const NetPath& path, const CandidatePoint& end_cand,
                          int left, int right)>
      rescore;
  /// Chord length between two trajectory indices.
  std::function<double(int, int)> chord;
};

/// Split-and-rematch repair of a flagged window: matches the left half from
/// the sequence's start to fresh candidates at the peak, seeds the right
/// half with each left endpoint, and keeps the best recombined path iff it
/// beats the original window score. Returns nullopt when no improvement.
std::optional<LocalPath> repair(const LocalPath& seq, const NspFlag& flag,
                                const CandidatePoint& start_cand,
                                int left, int right, const RepairContext& ctx,
                                const NspParams& params, int depth);

}  // namespace lnsp::nsp

#endif
