#pragma once

#include <string>

#include "hpn/flatten.hpp"
#include "hpn/net.hpp"

namespace hpn {

/// Graphviz view of the hierarchy, one cluster per net. Places draw as
/// circles, pages as double circles, transitions as boxes with their
/// condition in square brackets; fusion members are dashed and carry the
/// group name.
std::string export_dot(const System& sys);

/// Flat view of a ground net.
std::string export_dot(const GroundNet& ground);

} // namespace hpn
