#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hpn {

enum class EventKind : std::uint8_t {
    fire,
    op_start,
    op_done,
    buffer_write,
    buffer_read,
    time_increment,
};

const char* to_string(EventKind kind);

/// One observable event. Timestamps are logical (the scheduler step at which
/// the event was committed) so traces replay byte-identically.
struct TraceEvent {
    std::uint64_t seq = 0;
    std::uint64_t step = 0;
    EventKind kind = EventKind::fire;
    std::string subject;
    std::string detail; // e.g. "seq=12" or "i=3", may be empty
};

class Trace {
public:
    void append(std::uint64_t step, EventKind kind, std::string subject, std::string detail = "")
    {
        events_.push_back(TraceEvent{next_seq_++, step, kind, std::move(subject), std::move(detail)});
    }

    const std::vector<TraceEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }

    /// Line-delimited records with stable field order:
    /// <seq> <step> <kind> <subject>[ <detail>]
    std::string serialize() const;

private:
    std::vector<TraceEvent> events_;
    std::uint64_t next_seq_ = 0;
};

} // namespace hpn
