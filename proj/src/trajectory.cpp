#include "lnsp/trajectory.hpp"

#include <stdexcept>

namespace lnsp {

void Trajectory::validate() const {
  if (points.size() < 2) {
    throw std::runtime_error("trajectory '" + id + "' has fewer than 2 points");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].t < points[i - 1].t) {
      throw std::runtime_error("trajectory '" + id + "' timestamps regress at index " +
                               std::to_string(i));
    }
  }
}

std::vector<double> Trajectory::chord_cumulative(const PlanarRef& ref) const {
  std::vector<double> cum(points.size(), 0.0);
  XY prev = ref.to_xy(points.empty() ? GeoPoint{} : points[0]);
  for (std::size_t i = 1; i < points.size(); ++i) {
    XY cur = ref.to_xy(points[i]);
    cum[i] = cum[i - 1] + hypot_xy(prev, cur);
    prev = cur;
  }
  return cum;
}

}  // namespace lnsp
