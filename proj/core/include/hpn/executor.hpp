#pragma once

#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "hpn/flatten.hpp"
#include "hpn/registry.hpp"
#include "hpn/trace.hpp"

namespace hpn {

enum class SchedulingPolicy : std::uint8_t {
    deterministic, // lowest declaration index among the active transitions
    seeded_random, // seeded choice for interleaving tests; still replayable
};

struct ExecOptions {
    SchedulingPolicy policy = SchedulingPolicy::deterministic;
    std::uint64_t seed = 0;
    std::size_t workers = 0; // 0: one per subsystem seen in the bindings
    bool poll_completions = false;
    double poll_interval_s = 0.0005;
    int live_trace_fd = -1; // stream committed events to this descriptor
};

struct ExecLimits {
    std::uint64_t max_firings = UINT64_MAX;
    double wall_timeout_s = 1e9;
};

enum class StepOutcome : std::uint8_t { fired, quiescent, terminated };

struct StepResult {
    StepOutcome outcome;
    std::uint32_t transition = npos32; // set when outcome == fired
};

enum class RunEnd : std::uint8_t {
    final_place,  // token reached the root output place
    stopped,      // stop signal raised
    dead,         // no active transition, no running operation
    firing_limit, // limits.max_firings exhausted
    wall_timeout,
};

const char* to_string(RunEnd end);

struct RunResult {
    RunEnd reason = RunEnd::dead;
    std::uint64_t firings = 0;
};

/// Runs a marked ground net: searches for active transitions (enabled with
/// fulfilled condition), fires one per step, and launches the operations of
/// the receiving places on worker threads. The marking is mutated only here;
/// operations report back through completion notifications whose effects are
/// committed in canonical order, which makes whole runs replayable.
class Executor {
public:
    Executor(const GroundNet& net, const Registry& registry, RuntimeEnv& env, ExecOptions options = {});
    ~Executor();

    Executor(const Executor&) = delete;
    Executor& operator=(const Executor&) = delete;

    /// Fires one active transition if any. Reports quiescent while
    /// operations are still running and terminated on stop signal or when
    /// the final place is marked.
    StepResult step();

    /// Loops step(), waiting on running operations at quiescent points.
    /// Running operations are always drained before returning.
    RunResult run(ExecLimits limits = {});

    /// Snapshot-consistent condition evaluation for transition t.
    bool evaluate_condition(std::uint32_t t);

    const Marking& marking() const { return marking_; }
    Marking& marking() { return marking_; }
    RuntimeEnv& env() { return env_; }
    Trace& trace() { return trace_; }
    std::uint64_t firings() const { return firings_; }

    /// Total tokens currently in the marking; used by conservation checks.
    std::uint64_t total_tokens() const;

private:
    struct Completion {
        std::uint32_t place;
        std::vector<TraceEvent> pending;
        std::string error;
    };

    void launch_outputs(std::uint32_t transition);
    void launch_op(std::uint32_t place);
    void wait_for_completions(); // barrier: all outstanding operations
    void commit_completions();
    void drain();
    void log_event(EventKind kind, std::string subject, std::string detail = "");
    std::vector<std::uint32_t> active_transitions();
    std::uint32_t choose(const std::vector<std::uint32_t>& active);

    // worker pool
    struct Task {
        std::uint32_t place;
        OpAffinity affinity;
        std::uint64_t step; // scheduler step at launch
    };
    void worker_loop(bool world_lane);
    void submit(Task task);

    const GroundNet& net_;
    RuntimeEnv& env_;
    ExecOptions options_;
    Marking marking_;
    Trace trace_;
    std::uint64_t step_counter_ = 0;
    std::uint64_t firings_ = 0;
    std::mt19937_64 rng_;

    std::vector<OpBinding> place_ops_;        // resolved per place (fn empty = none)
    std::vector<CondBinding> transition_conds_;

    std::mutex pool_mu_;
    std::condition_variable pool_cv_;      // wakes workers
    std::condition_variable done_cv_;      // wakes the scheduler
    std::vector<Task> queue_;
    std::vector<Task> world_queue_;
    std::vector<Completion> finished_;
    std::size_t outstanding_ = 0;
    bool shutdown_ = false;
    std::vector<std::thread> workers_;
};

} // namespace hpn
