#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

namespace hpn {

using Value = std::variant<bool, double, std::vector<double>>;

/// A record exchanged through buffers: named typed slots plus the freshness
/// flag and sequence number stamped by the channel machinery. Copying a
/// record is a deep snapshot.
class BufferRecord {
public:
    BufferRecord() = default;

    /// Declares a slot with its default value; reads of unset slots return
    /// the declared default.
    BufferRecord& declare(const std::string& slot, Value default_value)
    {
        slots_.emplace(slot, std::move(default_value));
        return *this;
    }

    void set(const std::string& slot, Value v) { slots_[slot] = std::move(v); }
    void set_bool(const std::string& slot, bool v) { slots_[slot] = v; }
    void set_num(const std::string& slot, double v) { slots_[slot] = v; }

    bool get_bool(const std::string& slot, bool fallback = false) const
    {
        auto it = slots_.find(slot);
        if (it == slots_.end() || !std::holds_alternative<bool>(it->second))
            return fallback;
        return std::get<bool>(it->second);
    }

    double get_num(const std::string& slot, double fallback = 0.0) const
    {
        auto it = slots_.find(slot);
        if (it == slots_.end() || !std::holds_alternative<double>(it->second))
            return fallback;
        return std::get<double>(it->second);
    }

    std::vector<double> get_vec(const std::string& slot) const
    {
        auto it = slots_.find(slot);
        if (it == slots_.end() || !std::holds_alternative<std::vector<double>>(it->second))
            return {};
        return std::get<std::vector<double>>(it->second);
    }

    const std::map<std::string, Value>& slots() const { return slots_; }

    bool fresh = false;
    std::uint64_t seq = 0;

private:
    std::map<std::string, Value> slots_;
};

/// Runtime state of one subsystem: input buffers keyed by the peer they
/// receive from, output buffers keyed by the peer they are destined to,
/// internal memory and the discrete time counter.
struct SubsystemModel {
    std::string path; // e.g. "a1.c"
    char kind = 'c';  // one of c, e, r, E, R
    std::map<std::string, BufferRecord> in;
    std::map<std::string, BufferRecord> out;
    BufferRecord memory;
    std::uint64_t time = 0;

    // Guards snapshots: operations hold this while mutating, condition
    // evaluation while reading.
    mutable std::mutex mu;
};

/// Single-slot shared-memory channel: last writer wins, the freshness flag
/// is set on write and cleared on read.
struct Channel {
    std::string id; // "<producer_behaviour>.to.<consumer_behaviour>"
    BufferRecord slot;
    std::uint64_t writes = 0;
};

} // namespace hpn
