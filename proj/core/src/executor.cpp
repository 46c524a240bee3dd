#include "hpn/executor.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include <unistd.h>

namespace hpn {

const char* to_string(RunEnd end)
{
    switch (end) {
    case RunEnd::final_place: return "final_place";
    case RunEnd::stopped: return "stopped";
    case RunEnd::dead: return "dead";
    case RunEnd::firing_limit: return "firing_limit";
    case RunEnd::wall_timeout: return "wall_timeout";
    }
    return "?";
}

void Executor::log_event(EventKind kind, std::string subject, std::string detail)
{
    if (options_.live_trace_fd >= 0) {
        std::string line = std::to_string(trace_.size()) + " " + std::to_string(step_counter_) +
                           " " + to_string(kind) + " " + subject;
        if (!detail.empty())
            line += " " + detail;
        line += "\n";
        [[maybe_unused]] ssize_t n =
            write(options_.live_trace_fd, line.data(), line.size());
    }
    trace_.append(step_counter_, kind, std::move(subject), std::move(detail));
}

Executor::Executor(const GroundNet& net, const Registry& registry, RuntimeEnv& env,
                   ExecOptions options)
    : net_(net), env_(env), options_(options), rng_(options.seed)
{
    // Resolve every binding up front; unknown keys are configuration errors
    // at load, never at runtime.
    place_ops_.resize(net_.places.size());
    std::set<std::string> subsystems;
    for (std::uint32_t p = 0; p < net_.places.size(); ++p) {
        if (net_.places[p].op.empty())
            continue;
        place_ops_[p] = registry.resolve_op(net_.places[p].op);
        if (!place_ops_[p].subsystem.empty())
            subsystems.insert(place_ops_[p].subsystem);
    }
    transition_conds_.resize(net_.transitions.size());
    for (std::uint32_t t = 0; t < net_.transitions.size(); ++t) {
        if (net_.transitions[t].cond.empty())
            continue;
        transition_conds_[t] = registry.resolve_cond(net_.transitions[t].cond);
    }

    marking_ = net_.initial_marking();

    std::size_t n = options_.workers ? options_.workers : std::max<std::size_t>(1, subsystems.size());
    for (std::size_t i = 0; i < n; ++i)
        workers_.emplace_back([this] { worker_loop(false); });
    workers_.emplace_back([this] { worker_loop(true); });

    // Operations of initially marked places start right away, mirroring what
    // t_in firing does for pages.
    for (std::uint32_t p = 0; p < net_.places.size(); ++p)
        if (marking_.tokens[p] > 0 && !net_.places[p].op.empty())
            launch_op(p);
}

Executor::~Executor()
{
    {
        std::unique_lock lock(pool_mu_);
        done_cv_.wait(lock, [this] { return outstanding_ == 0; });
        shutdown_ = true;
    }
    pool_cv_.notify_all();
    for (std::thread& w : workers_)
        w.join();
}

void Executor::worker_loop(bool world_lane)
{
    for (;;) {
        Task task;
        {
            std::unique_lock lock(pool_mu_);
            auto& queue = world_lane ? world_queue_ : queue_;
            pool_cv_.wait(lock, [&] { return shutdown_ || !queue.empty(); });
            if (shutdown_ && queue.empty())
                return;
            task = queue.front();
            queue.erase(queue.begin());
        }

        Completion completion;
        completion.place = task.place;
        OpCall call{env_, net_.places[task.place].path, task.step, {}};
        const OpBinding& binding = place_ops_[task.place];
        try {
            if (!binding.subsystem.empty()) {
                std::lock_guard guard(env_.subsystem(binding.subsystem).mu);
                binding.fn(call);
            } else {
                binding.fn(call);
            }
        } catch (const std::exception& e) {
            completion.error = e.what();
        }
        completion.pending = std::move(call.pending);

        {
            std::lock_guard lock(pool_mu_);
            finished_.push_back(std::move(completion));
            --outstanding_;
        }
        done_cv_.notify_all();
    }
}

void Executor::submit(Task task)
{
    {
        std::lock_guard lock(pool_mu_);
        ++outstanding_;
        (task.affinity == OpAffinity::world ? world_queue_ : queue_).push_back(task);
    }
    pool_cv_.notify_all();
}

void Executor::launch_op(std::uint32_t place)
{
    marking_.status[place] = OpStatus::running;
    log_event(EventKind::op_start, net_.places[place].path);
    submit(Task{place, place_ops_[place].affinity, step_counter_});
}

void Executor::launch_outputs(std::uint32_t transition)
{
    for (std::uint32_t p : net_.transitions[transition].outputs) {
        if (net_.places[p].op.empty())
            continue;
        // fire_inplace left the token idle; its operation starts now in its
        // own execution unit.
        launch_op(p);
    }
}

void Executor::commit_completions()
{
    std::vector<Completion> done;
    {
        std::lock_guard lock(pool_mu_);
        done.swap(finished_);
    }
    // Canonical order, not completion order: traces must not depend on
    // thread timing.
    std::sort(done.begin(), done.end(),
              [](const Completion& a, const Completion& b) { return a.place < b.place; });
    for (Completion& c : done) {
        if (!c.error.empty())
            throw net_error("operation at '" + net_.places[c.place].path + "' failed: " + c.error);
        if (marking_.tokens[c.place] > 0)
            marking_.status[c.place] = OpStatus::done;
        for (TraceEvent& e : c.pending)
            log_event(e.kind, std::move(e.subject), std::move(e.detail));
        log_event(EventKind::op_done, net_.places[c.place].path);
    }
}

void Executor::wait_for_completions()
{
    if (options_.poll_completions) {
        const auto interval =
            std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                std::chrono::duration<double>(options_.poll_interval_s));
        for (;;) {
            {
                std::lock_guard lock(pool_mu_);
                if (outstanding_ == 0)
                    break;
            }
            std::this_thread::sleep_for(interval);
        }
    } else {
        std::unique_lock lock(pool_mu_);
        done_cv_.wait(lock, [this] { return outstanding_ == 0; });
    }
    commit_completions();
}

void Executor::drain()
{
    wait_for_completions();
}

bool Executor::evaluate_condition(std::uint32_t t)
{
    const CondBinding& binding = transition_conds_[t];
    if (!binding.fn)
        return true; // omitted condition
    CondCall call{env_, net_.transitions[t].path};
    if (!binding.subsystem.empty()) {
        std::lock_guard guard(env_.subsystem(binding.subsystem).mu);
        return binding.fn(call);
    }
    return binding.fn(call);
}

std::vector<std::uint32_t> Executor::active_transitions()
{
    std::vector<std::uint32_t> active;
    for (std::uint32_t t = 0; t < net_.transitions.size(); ++t) {
        const GroundTransition& tr = net_.transitions[t];
        if (tr.inputs.empty())
            continue;
        bool ready = token_enabled(net_, marking_, t);
        for (std::uint32_t p : tr.inputs)
            ready = ready && marking_.status[p] == OpStatus::done;
        if (ready && evaluate_condition(t))
            active.push_back(t);
    }
    return active;
}

std::uint32_t Executor::choose(const std::vector<std::uint32_t>& active)
{
    if (options_.policy == SchedulingPolicy::deterministic || active.size() == 1)
        return active.front();
    return active[static_cast<std::size_t>(rng_() % active.size())];
}

StepResult Executor::step()
{
    if (env_.stop_requested()) {
        drain();
        return StepResult{StepOutcome::terminated, npos32};
    }
    if (net_.final_place != npos32 && marking_.tokens[net_.final_place] > 0 &&
        marking_.status[net_.final_place] == OpStatus::done) {
        drain();
        return StepResult{StepOutcome::terminated, npos32};
    }

    std::vector<std::uint32_t> active = active_transitions();
    if (active.empty())
        return StepResult{StepOutcome::quiescent, npos32};

    std::uint32_t t = choose(active);
    fire_inplace(net_, marking_, t);
    ++step_counter_;
    ++firings_;
    log_event(EventKind::fire, net_.transitions[t].path);
    launch_outputs(t);
    return StepResult{StepOutcome::fired, t};
}

RunResult Executor::run(ExecLimits limits)
{
    using Clock = std::chrono::steady_clock;
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(limits.wall_timeout_s));
    RunResult result;
    for (;;) {
        if (firings_ >= limits.max_firings) {
            drain();
            result.reason = RunEnd::firing_limit;
            break;
        }
        if (Clock::now() > deadline) {
            drain();
            result.reason = RunEnd::wall_timeout;
            break;
        }
        StepResult sr = step();
        if (sr.outcome == StepOutcome::terminated) {
            result.reason = env_.stop_requested() ? RunEnd::stopped : RunEnd::final_place;
            break;
        }
        if (sr.outcome == StepOutcome::quiescent) {
            bool idle;
            {
                std::lock_guard lock(pool_mu_);
                idle = outstanding_ == 0 && finished_.empty();
            }
            if (idle) {
                result.reason = RunEnd::dead;
                break;
            }
            wait_for_completions();
        }
    }
    result.firings = firings_;
    return result;
}

std::uint64_t Executor::total_tokens() const
{
    std::uint64_t sum = 0;
    for (std::uint32_t c : marking_.tokens)
        sum += c;
    return sum;
}

} // namespace hpn
