#ifndef LNSP_ROUTING_HPP
#define LNSP_ROUTING_HPP

#include <optional>
#include <vector>

#include "lnsp/network.hpp"

namespace lnsp {

/// A route through the network: an ordered chain of directed segments with
/// partial traversal of the first and last one. `length` is the traversed
/// arc length.
struct NetPath {
  std::vector<int> segments;   // segment indices, chained end-to-start
  double entry_offset = 0.0;   // meters into the first segment
  double exit_offset = 0.0;    // meters into the last segment
  double length = 0.0;

  bool empty() const { return segments.empty(); }
};

/// Full-segment path over the given chain (entry 0, exit = last length).
NetPath full_path(const RoadNetwork& net, const std::vector<int>& segments);

/// Minimum-length directed route between two on-segment positions, with the
/// first and last segments costed by their traversed portion only. Returns
/// nullopt when unreachable. The virtual endpoints live in query-local state;
/// the network is never mutated.
std::optional<NetPath> shortest_path(const RoadNetwork& net,
                                     const CandidatePoint& from,
                                     const CandidatePoint& to);

/// Joins two paths where `a` ends exactly where `b` begins (same segment,
/// same offset within 1e-6 m).
NetPath splice_paths(const NetPath& a, const NetPath& b);

/// Drops zero-length end portions (a first segment entered at its very end,
/// or a last segment exited at offset 0) so equivalent routes share one
/// canonical segment list.
void canonicalize_path(const RoadNetwork& net, NetPath& path);

/// Materialized geometry of a NetPath with offset bookkeeping, so window
/// points can be projected onto the path and path offsets mapped back to
/// (segment, segment offset) positions.
class PathGeometry {
 public:
  PathGeometry() = default;
  PathGeometry(const RoadNetwork& net, const NetPath& path);

  double length() const { return line_.length(); }
  const Polyline& line() const { return line_; }

  /// Nearest on-path position at path offset >= min_offset.
  PolyProjection project(const XY& q, double min_offset = 0.0) const;

  /// Converts a path offset into a candidate point on the underlying segment.
  CandidatePoint locate(const RoadNetwork& net, double path_offset,
                        double err = 0.0) const;

  /// Prefix of the path ending at `path_offset`.
  NetPath truncate(double path_offset) const;

 private:
  NetPath path_;
  Polyline line_;
  std::vector<double> portion_begin_;  // path offset where segment i's portion starts
  std::vector<double> portion_len_;
  std::vector<double> seg_entry_;      // segment offset where the portion starts
};

}  // namespace lnsp

#endif
