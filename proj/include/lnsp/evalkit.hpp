#ifndef LNSP_EVALKIT_HPP
#define LNSP_EVALKIT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lnsp/datagen.hpp"
#include "lnsp/led_model.hpp"
#include "lnsp/matcher.hpp"

namespace lnsp {

/// Fraction of GPS points whose matched segment equals the true segment at
/// the point's true path offset. Points at a segment boundary (within 1 cm)
/// accept either adjoining segment; unmatched points count as wrong.
double point_accuracy(const RoadNetwork& net, const MatchResult& result,
                      const GroundTruthEntry& truth);

/// Shared traversed length between the matched and true paths divided by
/// the true path length, capped at 1.
double path_precision(const RoadNetwork& net, const MatchResult& result,
                      const GroundTruthEntry& truth);

/// Mean matching time in milliseconds.
double mean_time_ms(const std::vector<double>& timings_ms);

struct EvalRow {
  std::string method;
  int interval_s = 0;
  double acc = 0.0;
  double prc = 0.0;
  double mt_ms = 0.0;
  int n_ok = 0;
  int n_fail = 0;
};

struct TrajDiagnostic {
  std::string method;
  int interval_s = 0;
  std::string traj_id;
  double acc = 0.0;
  double prc = 0.0;
  double ms = 0.0;
  int n_points = 0;
  int n_fragments = 0;
};

struct SuiteConfig {
  std::vector<std::string> methods = {"lnsp", "lnsp-nonsp", "lnsp-nosed", "spt"};
  std::vector<int> intervals = {5, 10, 30, 60, 120};
  double spt_radius = 100.0;
  int jobs = 0;
  std::uint64_t seed = 1;  // drives downsampling jitter
};

struct SuiteResult {
  std::vector<EvalRow> rows;
  std::vector<TrajDiagnostic> diagnostics;
};

/// Matches every trajectory under each (method, sampling interval) pair and
/// aggregates pooled Acc/Prc plus mean matching time. Acc pools correct
/// points over all points; Prc pools overlap length over true length.
SuiteResult run_suite(const RoadNetwork& net, const LedModel& led,
                      const std::vector<Trajectory>& base_trajs,
                      const GroundTruth& truth, const MatchParams& params,
                      const SuiteConfig& config);

/// Report CSV: `method,interval_s,acc,prc,mt_ms,n_ok,n_fail`.
void write_report(std::ostream& out, const std::vector<EvalRow>& rows);
/// Per-trajectory diagnostics CSV.
void write_diagnostics(std::ostream& out, const std::vector<TrajDiagnostic>& rows);

/// Applies a method name to the base parameters: "lnsp", "lnsp-nonsp"
/// (repair disabled), "lnsp-nosed" (uniform scoring, fixed radius).
MatchParams method_params(const MatchParams& base, const std::string& method);

}  // namespace lnsp

#endif
