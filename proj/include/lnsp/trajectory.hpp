#ifndef LNSP_TRAJECTORY_HPP
#define LNSP_TRAJECTORY_HPP

#include <string>
#include <vector>

#include "lnsp/geo.hpp"

namespace lnsp {

/// Timestamp-ordered GPS point sequence.
struct Trajectory {
  std::string id;
  std::vector<GeoPoint> points;

  /// Throws when timestamps regress or fewer than 2 points are present.
  void validate() const;

  /// Cumulative chord length (meters) in the given planar frame;
  /// result[i] is the length from point 0 to point i.
  std::vector<double> chord_cumulative(const PlanarRef& ref) const;
};

/// A training trajectory tagged with the fixed route it was driven on.
struct RouteTrajectory {
  std::string route_id;
  Trajectory traj;
};

}  // namespace lnsp

#endif
