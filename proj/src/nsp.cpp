#include "lnsp/nsp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lnsp::nsp {

std::optional<NspFlag> detect(const std::vector<CandidatePoint>& match_points,
                              const std::vector<XY>& window_points,
                              const std::vector<double>& point_scores,
                              const NspParams& params) {
  std::size_t n = match_points.size();
  if (n != window_points.size() || n != point_scores.size()) {
    throw std::invalid_argument("detect: misaligned window arrays");
  }
  // longest run of consecutive points with err above the threshold
  int best_start = -1, best_len = 0;
  int run_start = -1;
  for (std::size_t i = 0; i <= n; ++i) {
    bool high = i < n && match_points[i].err > params.err;
    if (high && run_start < 0) run_start = static_cast<int>(i);
    if (!high && run_start >= 0) {
      int len = static_cast<int>(i) - run_start;
      if (len > best_len) {
        best_len = len;
        best_start = run_start;
      }
      run_start = -1;
    }
  }
  if (best_len < params.n) return std::nullopt;

  NspFlag flag;
  flag.start_idx = best_start;
  flag.end_idx = best_start + best_len - 1;
  flag.peak_idx = best_start;
  flag.peak_err = match_points[best_start].err;
  for (int i = best_start + 1; i <= flag.end_idx; ++i) {
    if (match_points[i].err > flag.peak_err) {
      flag.peak_err = match_points[i].err;
      flag.peak_idx = i;
    }
  }
  if (!(flag.peak_err > params.max_err)) return std::nullopt;

  double chord = 0.0;
  for (int i = flag.start_idx; i < flag.end_idx; ++i) {
    chord += hypot_xy(window_points[i], window_points[i + 1]);
  }
  if (!(chord > params.len)) return std::nullopt;

  double mean_score = 0.0;
  for (int i = flag.start_idx; i <= flag.end_idx; ++i) mean_score += point_scores[i];
  mean_score /= best_len;
  if (!(mean_score < params.deviation_gate)) return std::nullopt;

  return flag;
}

std::optional<LocalPath> repair(const LocalPath& seq, const NspFlag& flag,
                                const CandidatePoint& start_cand, int left,
                                int right, const RepairContext& ctx,
                                const NspParams& params, int depth) {
  int split = left + flag.peak_idx;  // trajectory-global split index
  if (split <= left || split >= right) return std::nullopt;

  std::vector<CandidatePoint> split_cands = ctx.candidates_at(split);
  if (split_cands.empty()) return std::nullopt;

  // left half: from the sequence's start candidate to the split candidates
  std::vector<LocalPath> left_list =
      ctx.enumerate_topk(start_cand, split_cands, left, split, depth);
  if (left_list.empty()) return std::nullopt;

  // right half: each left endpoint seeds a match to the original endpoint
  std::optional<LocalPath> best;
  for (const auto& lp : left_list) {
    std::vector<LocalPath> right_list =
        ctx.enumerate_topk(lp.end_cand, {seq.end_cand}, split, right, depth);
    for (const auto& rp : right_list) {
      NetPath joined = splice_paths(lp.path, rp.path);
      LocalPath combined = ctx.rescore(joined, seq.end_cand, left, right);
      if (!best || combined.f > best->f) best = std::move(combined);
    }
  }
  if (!best || !(best->f > seq.f)) return std::nullopt;
  return best;
}

}  // namespace lnsp::nsp
