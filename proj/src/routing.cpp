#include "lnsp/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace lnsp {

NetPath full_path(const RoadNetwork& net, const std::vector<int>& segments) {
  NetPath p;
  p.segments = segments;
  if (segments.empty()) return p;
  p.entry_offset = 0.0;
  p.exit_offset = net.segment(segments.back()).length;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    if (net.segment(segments[i]).end != net.segment(segments[i + 1]).start) {
      throw std::invalid_argument("segments do not chain");
    }
    p.length += net.segment(segments[i]).length;
  }
  p.length += p.exit_offset;
  return p;
}

std::optional<NetPath> shortest_path(const RoadNetwork& net,
                                     const CandidatePoint& from,
                                     const CandidatePoint& to) {
  const Segment& sa = net.segment(from.segment);
  const Segment& sb = net.segment(to.segment);

  if (from.segment == to.segment && from.offset <= to.offset) {
    NetPath p;
    p.segments = {from.segment};
    p.entry_offset = from.offset;
    p.exit_offset = to.offset;
    p.length = to.offset - from.offset;
    return p;
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(net.nodes().size(), inf);
  std::vector<int> pred(net.nodes().size(), -1);  // segment used to arrive
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;

  dist[sa.end] = sa.length - from.offset;
  pred[sa.end] = from.segment;
  pq.push({dist[sa.end], sa.end});

  const int goal = sb.start;
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    if (u == goal) break;
    for (int sidx : net.outgoing(u)) {
      const Segment& e = net.segment(sidx);
      double nd = d + e.length;
      if (nd < dist[e.end]) {
        dist[e.end] = nd;
        pred[e.end] = sidx;
        pq.push({nd, e.end});
      } else if (nd == dist[e.end] && pred[e.end] >= 0 &&
                 e.id < net.segment(pred[e.end]).id) {
        pred[e.end] = sidx;  // deterministic tie-break
      }
    }
  }
  if (dist[goal] == inf) return std::nullopt;

  NetPath p;
  p.entry_offset = from.offset;
  p.exit_offset = to.offset;
  p.length = dist[goal] + to.offset;
  std::vector<int> chain;
  int u = goal;
  while (u != sa.end) {
    int sidx = pred[u];
    chain.push_back(sidx);
    u = net.segment(sidx).start;
  }
  p.segments.push_back(from.segment);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) p.segments.push_back(*it);
  p.segments.push_back(to.segment);
  return p;
}

NetPath splice_paths(const NetPath& a, const NetPath& b) {
  if (a.segments.empty()) return b;
  if (b.segments.empty()) return a;
  if (a.segments.back() != b.segments.front() ||
      std::abs(a.exit_offset - b.entry_offset) > 1e-6) {
    throw std::invalid_argument("paths do not join at a shared candidate point");
  }
  NetPath out;
  out.segments = a.segments;
  out.segments.insert(out.segments.end(), b.segments.begin() + 1, b.segments.end());
  out.entry_offset = a.entry_offset;
  out.exit_offset = b.exit_offset;
  out.length = a.length + b.length;
  return out;
}

void canonicalize_path(const RoadNetwork& net, NetPath& path) {
  const double eps = 1e-9;
  while (path.segments.size() > 1 &&
         path.entry_offset >= net.segment(path.segments.front()).length - eps) {
    path.segments.erase(path.segments.begin());
    path.entry_offset = 0.0;
  }
  while (path.segments.size() > 1 && path.exit_offset <= eps) {
    path.segments.pop_back();
    path.exit_offset = net.segment(path.segments.back()).length;
  }
}

namespace {

// Points of `line` strictly inside (from_off, to_off), plus both endpoints.
void append_portion(const Polyline& line, double from_off, double to_off,
                    std::vector<XY>& out) {
  XY first = line.at_offset(from_off);
  if (out.empty() || hypot_xy(out.back(), first) > 1e-9) out.push_back(first);
  const auto& cum = line.cum();
  for (std::size_t i = 0; i < cum.size(); ++i) {
    if (cum[i] > from_off + 1e-9 && cum[i] < to_off - 1e-9) {
      out.push_back(line.points()[i]);
    }
  }
  XY last = line.at_offset(to_off);
  if (out.empty() || hypot_xy(out.back(), last) > 1e-9 || out.size() == 1) {
    out.push_back(last);
  }
}

}  // namespace

PathGeometry::PathGeometry(const RoadNetwork& net, const NetPath& path)
    : path_(path) {
  std::vector<XY> pts;
  portion_begin_.reserve(path.segments.size());
  portion_len_.reserve(path.segments.size());
  seg_entry_.reserve(path.segments.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < path.segments.size(); ++i) {
    const Segment& seg = net.segment(path.segments[i]);
    double a = (i == 0) ? path.entry_offset : 0.0;
    double b = (i + 1 == path.segments.size()) ? path.exit_offset : seg.length;
    if (b < a - 1e-9) throw std::invalid_argument("inverted segment portion");
    b = std::max(a, b);
    portion_begin_.push_back(acc);
    portion_len_.push_back(b - a);
    seg_entry_.push_back(a);
    if (path.segments.size() == 1 && b == a) {
      pts.push_back(seg.line.at_offset(a));
    } else if (b > a) {
      append_portion(seg.line, a, b, pts);
    }
    acc += b - a;
  }
  line_ = Polyline(std::move(pts));
}

PolyProjection PathGeometry::project(const XY& q, double min_offset) const {
  return line_.project(q, min_offset);
}

CandidatePoint PathGeometry::locate(const RoadNetwork& net, double path_offset,
                                    double err) const {
  if (path_.segments.empty()) throw std::logic_error("locate on empty path");
  path_offset = std::clamp(path_offset, 0.0, path_.length);
  // first portion whose span covers the offset
  std::size_t i = 0;
  for (; i + 1 < portion_begin_.size(); ++i) {
    if (path_offset <= portion_begin_[i] + portion_len_[i] + 1e-9) break;
  }
  const Segment& seg = net.segment(path_.segments[i]);
  double seg_off = seg_entry_[i] + (path_offset - portion_begin_[i]);
  seg_off = std::clamp(seg_off, 0.0, seg.length);
  CandidatePoint cp;
  cp.segment = seg.idx;
  cp.segment_id = seg.id;
  cp.offset = seg_off;
  cp.xy = seg.line.at_offset(seg_off);
  cp.position = net.ref().to_geo(cp.xy);
  cp.err = err;
  return cp;
}

NetPath PathGeometry::truncate(double path_offset) const {
  path_offset = std::clamp(path_offset, 0.0, path_.length);
  std::size_t i = 0;
  for (; i + 1 < portion_begin_.size(); ++i) {
    if (path_offset <= portion_begin_[i] + portion_len_[i] + 1e-9) break;
  }
  NetPath out;
  out.segments.assign(path_.segments.begin(), path_.segments.begin() + i + 1);
  out.entry_offset = path_.entry_offset;
  out.exit_offset = seg_entry_[i] + (path_offset - portion_begin_[i]);
  out.length = path_offset;
  return out;
}

}  // namespace lnsp
