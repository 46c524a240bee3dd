#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hpn/records.hpp"
#include "hpn/trace.hpp"

namespace hpn {

namespace sim {
class World;
}

struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Everything operations may touch at runtime. Subsystems and channels come
/// into existence the first time a binding addresses them, so a net file
/// plus the registry fully determines the runtime state.
class RuntimeEnv {
public:
    // Lazy creation is internally locked; the returned references stay
    // stable for the lifetime of the environment.
    SubsystemModel& subsystem(const std::string& path);
    SubsystemModel* find_subsystem(const std::string& path);
    Channel& channel(const std::string& id);

    /// Stable snapshot of the subsystem paths seen so far.
    std::vector<std::string> subsystem_paths() const;

    void request_stop() { stop_.store(true, std::memory_order_relaxed); }
    bool stop_requested() const { return stop_.load(std::memory_order_relaxed); }

    void attach_world(std::shared_ptr<sim::World> world) { world_ = std::move(world); }
    sim::World* world() const { return world_.get(); }

private:
    mutable std::mutex mu_;
    std::map<std::string, std::unique_ptr<SubsystemModel>> subsystems_;
    std::map<std::string, std::unique_ptr<Channel>> channels_;
    std::shared_ptr<sim::World> world_;
    std::atomic<bool> stop_{false};
};

enum class OpAffinity : std::uint8_t {
    any,   // runs on any pool worker
    world, // serialized onto the dedicated world worker
};

/// Context handed to an operation body. Events emitted here are buffered and
/// committed by the scheduler when it processes the completion, which keeps
/// traces deterministic under concurrent execution.
struct OpCall {
    RuntimeEnv& env;
    const std::string& place_path;
    std::uint64_t step;

    void emit(EventKind kind, std::string subject, std::string detail = "")
    {
        pending.push_back(TraceEvent{0, step, kind, std::move(subject), std::move(detail)});
    }

    std::vector<TraceEvent> pending;
};

struct CondCall {
    RuntimeEnv& env;
    const std::string& transition_path;
};

using OpFn = std::function<void(OpCall&)>;
using CondFn = std::function<bool(const CondCall&)>;

struct OpBinding {
    OpFn fn;
    OpAffinity affinity = OpAffinity::any;
    std::string subsystem; // locked while the operation runs; empty = none
};

struct CondBinding {
    CondFn fn;
    std::string subsystem; // locked while evaluating; empty = none
};

/// Name -> code table resolved at load time. Exact keys take precedence;
/// prefix handlers synthesize bindings for key families such as channel
/// endpoints ("chan.<id>.write") and time ticks ("core.tick.<subsystem>").
///
/// Condition keys compose: "not__<key>" negates, "any__<k1>__<k2>" is the
/// disjunction. User keys must therefore avoid the "__" separator.
class Registry {
public:
    Registry();

    void op(const std::string& key, OpFn fn, OpAffinity affinity = OpAffinity::any,
            const std::string& subsystem = "");
    void cond(const std::string& key, CondFn fn, const std::string& subsystem = "");

    using OpHandler = std::function<std::optional<OpBinding>(const std::string& key)>;
    using CondHandler = std::function<std::optional<CondBinding>(const std::string& key)>;
    void op_handler(OpHandler h) { op_handlers_.push_back(std::move(h)); }
    void cond_handler(CondHandler h) { cond_handlers_.push_back(std::move(h)); }

    bool has_op(const std::string& key) const;
    OpBinding resolve_op(const std::string& key) const;   // throws config_error
    CondBinding resolve_cond(const std::string& key) const;

private:
    std::map<std::string, OpBinding> ops_;
    std::map<std::string, CondBinding> conds_;
    std::vector<OpHandler> op_handlers_;
    std::vector<CondHandler> cond_handlers_;
};

/// Composite-condition key builders used by the layer builder.
std::string cond_any(const std::string& a, const std::string& b);
std::string cond_not(const std::string& key);

/// Channel binding keys. The id names the producer and consumer behaviours:
/// "<producer>.to.<consumer>".
std::string chan_id(const std::string& producer_behaviour, const std::string& consumer_behaviour);
std::string chan_write_key(const std::string& id);
std::string chan_read_key(const std::string& id);
std::string chan_fresh_key(const std::string& id);
std::string tick_key(const std::string& subsystem_path);

/// Subsystem path of a behaviour path ("a1.c.control" -> "a1.c").
std::string subsystem_of(const std::string& behaviour_path);

} // namespace hpn
