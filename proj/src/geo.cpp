#include "lnsp/geo.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace lnsp {

Polyline::Polyline(std::vector<XY> pts) : pts_(std::move(pts)) {
  if (pts_.empty()) return;
  cum_.resize(pts_.size());
  cum_[0] = 0.0;
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    cum_[i] = cum_[i - 1] + hypot_xy(pts_[i - 1], pts_[i]);
  }
}

XY Polyline::at_offset(double offset) const {
  if (pts_.empty()) throw std::logic_error("at_offset on empty polyline");
  if (offset <= 0.0) return pts_.front();
  if (offset >= length()) return pts_.back();
  auto it = std::upper_bound(cum_.begin(), cum_.end(), offset);
  std::size_t i = static_cast<std::size_t>(it - cum_.begin());
  // cum_[i-1] <= offset < cum_[i]
  double seg_len = cum_[i] - cum_[i - 1];
  double t = seg_len > 0.0 ? (offset - cum_[i - 1]) / seg_len : 0.0;
  return {pts_[i - 1].x + t * (pts_[i].x - pts_[i - 1].x),
          pts_[i - 1].y + t * (pts_[i].y - pts_[i - 1].y)};
}

XY Polyline::direction_at(double offset) const {
  if (pts_.size() < 2) return {1.0, 0.0};
  offset = std::clamp(offset, 0.0, length());
  std::size_t i = 1;
  while (i + 1 < cum_.size() && cum_[i] <= offset) ++i;
  // skip zero-length subsegments
  std::size_t a = i - 1, b = i;
  while (b + 1 < pts_.size() && cum_[b] - cum_[a] <= 0.0) ++b;
  double len = cum_[b] - cum_[a];
  if (len <= 0.0) return {1.0, 0.0};
  return {(pts_[b].x - pts_[a].x) / len, (pts_[b].y - pts_[a].y) / len};
}

PolyProjection Polyline::project(const XY& q, double min_offset) const {
  if (pts_.empty()) throw std::logic_error("project on empty polyline");
  min_offset = std::clamp(min_offset, 0.0, length());
  PolyProjection best;
  best.dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
    if (cum_[i + 1] < min_offset) continue;
    const XY& a = pts_[i];
    const XY& b = pts_[i + 1];
    double seg_len = cum_[i + 1] - cum_[i];
    double t = 0.0;
    if (seg_len > 0.0) {
      t = ((q.x - a.x) * (b.x - a.x) + (q.y - a.y) * (b.y - a.y)) /
          (seg_len * seg_len);
    }
    double t_min = seg_len > 0.0 ? (min_offset - cum_[i]) / seg_len : 0.0;
    t = std::clamp(t, std::max(0.0, t_min), 1.0);
    XY p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
    double d = std::hypot(q.x - p.x, q.y - p.y);
    double off = cum_[i] + t * seg_len;
    if (d < best.dist - 1e-12 ||
        (std::abs(d - best.dist) <= 1e-12 && off < best.offset)) {
      best = {p, off, d};
    }
  }
  if (pts_.size() == 1) {
    best = {pts_[0], 0.0, hypot_xy(q, pts_[0])};
  }
  if (best.offset < min_offset) best.offset = min_offset;
  return best;
}

}  // namespace lnsp
