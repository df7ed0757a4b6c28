#ifndef LNSP_FILES_HPP
#define LNSP_FILES_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lnsp/datagen.hpp"
#include "lnsp/matcher.hpp"
#include "lnsp/network.hpp"
#include "lnsp/trajectory.hpp"

namespace lnsp {

/// Trajectory CSV: header `traj_id,lon,lat,t`, rows sorted by (traj_id, t).
void write_trajectories(std::ostream& out, const std::vector<Trajectory>& trajs);
std::vector<Trajectory> read_trajectories(std::istream& in);
void write_trajectories_file(const std::string& path, const std::vector<Trajectory>& trajs);
std::vector<Trajectory> read_trajectories_file(const std::string& path);

/// Fixed routes: `R <route_id> <seg_id> <seg_id> ...` lines.
void write_routes(std::ostream& out, const RoadNetwork& net,
                  const std::map<std::string, NetPath>& routes);
std::map<std::string, NetPath> read_routes(std::istream& in, const RoadNetwork& net);
void write_routes_file(const std::string& path, const RoadNetwork& net,
                       const std::map<std::string, NetPath>& routes);
std::map<std::string, NetPath> read_routes_file(const std::string& path,
                                                const RoadNetwork& net);

/// Training-trajectory route tags: CSV `traj_id,route_id`.
void write_route_tags(std::ostream& out, const std::vector<RouteTrajectory>& tagged);
std::map<std::string, std::string> read_route_tags(std::istream& in);
void write_route_tags_file(const std::string& path, const std::vector<RouteTrajectory>& tagged);
std::map<std::string, std::string> read_route_tags_file(const std::string& path);

/// Ground truth CSV: `traj_id,seg;seg;...,off;off;...` (per-point offsets
/// along the true path).
void write_ground_truth(std::ostream& out, const RoadNetwork& net, const GroundTruth& gt);
GroundTruth read_ground_truth(std::istream& in, const RoadNetwork& net);
void write_ground_truth_file(const std::string& path, const RoadNetwork& net,
                             const GroundTruth& gt);
GroundTruth read_ground_truth_file(const std::string& path, const RoadNetwork& net);

/// Match output CSV: one record per fragment
/// `traj_id,af,seg;seg;...,idx:seg:offset:err idx:seg:offset:err ...`
/// with a `traj_id,GAP,,` record between fragments of a split trajectory.
void write_match_results(std::ostream& out, const RoadNetwork& net,
                         const std::vector<MatchResult>& results);
void write_match_results_file(const std::string& path, const RoadNetwork& net,
                              const std::vector<MatchResult>& results);

}  // namespace lnsp

#endif
