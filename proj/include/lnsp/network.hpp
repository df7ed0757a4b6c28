#ifndef LNSP_NETWORK_HPP
#define LNSP_NETWORK_HPP

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "lnsp/geo.hpp"

namespace lnsp {

struct Node {
  std::string id;
  GeoPoint pos;
  XY xy;
};

/// Directed road segment. Geometry runs from the start node to the end node
/// and includes both node positions.
struct Segment {
  std::string id;
  int idx = -1;        // dense index within the owning network
  int start = -1;      // node index
  int end = -1;        // node index
  double speed_mps = 0.0;
  double length = 0.0; // polyline arc length in meters
  std::vector<GeoPoint> geometry;
  Polyline line;       // geometry in the network's planar frame
};

/// Projection of a GPS point onto one segment.
struct CandidatePoint {
  GeoPoint position;     // on the segment polyline
  XY xy;
  int segment = -1;      // segment index
  std::string segment_id;
  double offset = 0.0;   // meters from the segment start along its geometry
  double err = 0.0;      // distance from the source GPS point to `position`
};

/// Directed road graph with a uniform-cell spatial index. Immutable after
/// load; safe for concurrent reads.
class RoadNetwork {
 public:
  /// Parses the line-oriented text format (see README). Throws
  /// std::runtime_error with the offending line number on malformed input,
  /// dangling node references, or zero-length segments.
  static RoadNetwork load(std::istream& in);
  static RoadNetwork load_file(const std::string& path);
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;

  /// Builds a network from already-assembled parts (used by the generator).
  static RoadNetwork build(std::vector<Node> nodes,
                           std::vector<Segment> segments);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const Segment& segment(int idx) const { return segments_[idx]; }
  const Node& node(int idx) const { return nodes_[idx]; }
  const std::vector<int>& outgoing(int node_idx) const { return out_[node_idx]; }
  const PlanarRef& ref() const { return ref_; }

  int node_index(const std::string& id) const;     // -1 when unknown
  int segment_index(const std::string& id) const;  // -1 when unknown

  /// Closest position on `seg` to `point`.
  CandidatePoint project(const GeoPoint& point, const Segment& seg) const;
  CandidatePoint project_xy(const XY& q, const Segment& seg) const;

  /// One CandidatePoint per segment whose minimal distance to `point` is
  /// <= radius, sorted by err ascending (ties by segment id).
  std::vector<CandidatePoint> candidates(const GeoPoint& point,
                                         double radius) const;
  std::vector<CandidatePoint> candidates_xy(const XY& q, double radius) const;

  /// Bounding box of all node and geometry points, in the planar frame.
  void bounds(XY& lo, XY& hi) const;

 private:
  void finalize();  // fills xy/line/lengths, adjacency, spatial index

  std::vector<Node> nodes_;
  std::vector<Segment> segments_;
  std::vector<std::vector<int>> out_;
  std::unordered_map<std::string, int> node_by_id_;
  std::unordered_map<std::string, int> seg_by_id_;
  PlanarRef ref_;

  // spatial index: uniform cells over the padded bounding box
  double cell_ = 100.0;
  XY grid_lo_;
  int gcols_ = 0, grows_ = 0;
  std::vector<std::vector<int>> cell_segs_;
};

}  // namespace lnsp

#endif
