#include "hpn/trace.hpp"

#include <sstream>

namespace hpn {

const char* to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::fire: return "fire";
    case EventKind::op_start: return "op_start";
    case EventKind::op_done: return "op_done";
    case EventKind::buffer_write: return "buffer_write";
    case EventKind::buffer_read: return "buffer_read";
    case EventKind::time_increment: return "time_increment";
    }
    return "?";
}

std::string Trace::serialize() const
{
    std::ostringstream out;
    out << "hpntrace 1\n";
    for (const TraceEvent& e : events_) {
        out << e.seq << ' ' << e.step << ' ' << to_string(e.kind) << ' ' << e.subject;
        if (!e.detail.empty())
            out << ' ' << e.detail;
        out << '\n';
    }
    return out.str();
}

} // namespace hpn
