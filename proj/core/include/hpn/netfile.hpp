#pragma once

#include <string>

#include "hpn/net.hpp"
#include "hpn/textfmt.hpp" // parse_error

namespace hpn {

/// Net definition text format, header line "hpnnet 1".
///
/// Sections, one declaration per line:
///   [places]          <net>.<name> [in] [out] [-> <op_key>]
///   [transitions]     <net>.<name> [-> <cond_key>]
///   [arcs]            <net>.<from> -> <net>.<to>
///   [pages]           <net>.<name> -> <inner_net>
///   [fusions]         <group> : <net>.<place> <net>.<place> ...
///   [initial_marking] <net>.<place> <count>
///
/// Net names may themselves contain dots; element names may not, so a
/// qualified name always splits at its last dot. Nets come into existence
/// the first time an element mentions them. '#' starts a comment.
std::string serialize_net(const System& sys);
System parse_net(const std::string& content);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace hpn
