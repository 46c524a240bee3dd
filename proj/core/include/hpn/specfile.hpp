#pragma once

#include <string>

#include "hpn/builder.hpp"

namespace hpn {

/// System description text format, header line "hpnspec 1".
///
///   [system <name>]                       (optional, defaults to "sys")
///   [agent <name>]
///   [subsystem <agent>.<name>]
///     kind = c|e|r
///     initial = <behaviour>
///     terminal = <behaviour>
///     transition <from> -> <to> : <cond_key>
///   [behaviour <agent>.<subsystem>.<name>]
///     f = <op_key>
///     error = <cond_key>
///     terminal = <cond_key>
///     recv_composition = sequential|parallel
///   [comm]
///     comm <producer> -> <consumer> : <async|block_p|block_c|block_pc> [sequential|parallel]
///
/// Channel endpoints are behaviour paths; "world.<name>" endpoints are
/// serviced by the simulated real effectors/receptors.
SystemSpec parse_spec(const std::string& content);
std::string serialize_spec(const SystemSpec& spec);

} // namespace hpn
