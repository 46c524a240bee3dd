#pragma once

#include <string>

#include "hpn/sim.hpp"

namespace hpn::sim {

struct WorldConfig {
    WorldParams params;
    Track track;
    std::string track_decl = "oval 1 0.3"; // as written in the config line
};

/// World configuration text format, header "hpnworld 1": "key = value"
/// lines for the kinematic and sensing parameters plus one track line,
/// either "track = oval <straight> <radius>" or "track = file <path>".
WorldConfig parse_world(const std::string& content, const std::string& base_dir = "");
std::string serialize_world(const WorldConfig& config);

/// Track geometry file, header "hpntrack 1": one element per line,
/// "segment x1 y1 x2 y2" or "arc cx cy radius a0 a1" (radians, CCW).
Track parse_track(const std::string& content);
std::string serialize_track(const Track& track);

} // namespace hpn::sim
