#ifndef LNSP_GEO_HPP
#define LNSP_GEO_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace lnsp {

/// A GPS fix: longitude/latitude in degrees plus an optional timestamp
/// (whole seconds since epoch, -1 when absent).
struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;
  std::int64_t t = -1;

  bool has_time() const { return t >= 0; }
};

inline constexpr double kMetersPerDegree = 111320.0;

struct XY {
  double x = 0.0;
  double y = 0.0;
};

inline double hypot_xy(const XY& a, const XY& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Equirectangular planar frame anchored at (lon0, lat0). All geometry in
/// this project is computed in this frame; the anchor is fixed per network
/// so distances are consistent across modules.
struct PlanarRef {
  double lon0 = 0.0;
  double lat0 = 0.0;
  double kx = kMetersPerDegree;  // meters per degree longitude at lat0
  double ky = kMetersPerDegree;  // meters per degree latitude

  static PlanarRef at(double lon0, double lat0) {
    PlanarRef r;
    r.lon0 = lon0;
    r.lat0 = lat0;
    r.kx = kMetersPerDegree * std::cos(lat0 * M_PI / 180.0);
    r.ky = kMetersPerDegree;
    return r;
  }

  XY to_xy(const GeoPoint& p) const {
    return {(p.lon - lon0) * kx, (p.lat - lat0) * ky};
  }

  GeoPoint to_geo(const XY& q, std::int64_t t = -1) const {
    return {lon0 + q.x / kx, lat0 + q.y / ky, t};
  }

  double distance(const GeoPoint& a, const GeoPoint& b) const {
    return hypot_xy(to_xy(a), to_xy(b));
  }
};

/// Planar distance in meters between two GPS points, anchored at their
/// midpoint latitude so the result is symmetric.
inline double distance(const GeoPoint& a, const GeoPoint& b) {
  return PlanarRef::at(0.0, 0.5 * (a.lat + b.lat)).distance(a, b);
}

struct PolyProjection {
  XY point;          // closest position on the polyline
  double offset = 0; // arc-length from the polyline start to `point`
  double dist = 0;   // distance from the query to `point`
};

/// Immutable planar polyline with precomputed cumulative arc lengths.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<XY> pts);

  double length() const { return cum_.empty() ? 0.0 : cum_.back(); }
  const std::vector<XY>& points() const { return pts_; }
  const std::vector<double>& cum() const { return cum_; }
  bool empty() const { return pts_.empty(); }

  /// Position at arc-length `offset` (clamped to [0, length]).
  XY at_offset(double offset) const;

  /// Unit tangent of the subsegment containing `offset`.
  XY direction_at(double offset) const;

  /// Closest point on the polyline, restricted to offsets >= min_offset.
  /// Ties resolve to the smallest offset.
  PolyProjection project(const XY& q, double min_offset = 0.0) const;

 private:
  std::vector<XY> pts_;
  std::vector<double> cum_;
};

}  // namespace lnsp

#endif
