// hpnctl: build, verify, execute and translate hierarchical-net robot
// controllers from the command line.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <hpn/analysis.hpp>
#include <hpn/builder.hpp>
#include <hpn/codegen.hpp>
#include <hpn/dot.hpp>
#include <hpn/executor.hpp>
#include <hpn/netfile.hpp>
#include <hpn/sim.hpp>
#include <hpn/specfile.hpp>
#include <hpn/worldfile.hpp>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_validation = 2;
constexpr int exit_analysis = 3;
constexpr int exit_limit = 4;

struct CommonOpts {
    std::string spec_path;
    std::string net_path;
    std::string config_path;
    std::string trace_path;
    std::uint64_t seed = 0;
    std::uint64_t budget = 1000000;
    std::uint64_t max_firings = 1000000;
    double timeout = 1e9;
    std::string policy = "det";
    std::size_t workers = 0;
    bool skip_analysis = false;
    bool live_trace = false;
};

std::string base_dir(const std::string& path)
{
    std::size_t slash = path.find_last_of('/');
    return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

hpn::System load_system(const CommonOpts& opts)
{
    if (!opts.spec_path.empty()) {
        hpn::SystemSpec spec = hpn::parse_spec(hpn::read_file(opts.spec_path));
        hpn::Assembly built = hpn::assemble(spec);
        for (const std::string& w : built.warnings)
            std::fprintf(stderr, "warning: %s\n", w.c_str());
        return std::move(built.sys);
    }
    if (!opts.net_path.empty())
        return hpn::parse_net(hpn::read_file(opts.net_path));
    throw hpn::config_error("either --spec or --net is required");
}

hpn::sim::WorldConfig load_world(const CommonOpts& opts)
{
    std::string path = opts.config_path;
    if (path.empty())
        if (const char* env = std::getenv("HPN_CONFIG"))
            path = env;
    if (path.empty())
        throw hpn::config_error("no world config: pass --config or set HPN_CONFIG");
    return hpn::sim::parse_world(hpn::read_file(path), base_dir(path));
}

hpn::ExecOptions exec_options(const CommonOpts& opts)
{
    hpn::ExecOptions eo;
    eo.policy = opts.policy == "random" ? hpn::SchedulingPolicy::seeded_random
                                        : hpn::SchedulingPolicy::deterministic;
    eo.seed = opts.seed;
    eo.workers = opts.workers;
    if (eo.workers == 0)
        if (const char* env = std::getenv("HPN_WORKERS"))
            eo.workers = static_cast<std::size_t>(std::strtoul(env, nullptr, 10));
    if (opts.live_trace)
        eo.live_trace_fd = 1;
    return eo;
}

// shared pre-run verification: the page rule and safeness
int verify_before_run(const hpn::System& sys, const hpn::GroundNet& ground, std::uint64_t budget)
{
    auto violations = hpn::check_pages(sys);
    for (const auto& v : violations)
        std::fprintf(stderr, "page_rule %s inner=%s inputs=%u outputs=%u\n", v.page_path.c_str(),
                     v.inner_net.c_str(), v.input_places, v.output_places);
    hpn::SafetyResult safety =
        hpn::is_safe(ground, ground.initial_marking(), hpn::ExplorationBudget{budget, 30.0});
    if (safety.verdict == hpn::SafetyVerdict::unsafe) {
        std::fprintf(stderr, "unsafe: place %s reachable with two tokens\n",
                     safety.witness_place.c_str());
        return exit_analysis;
    }
    if (safety.verdict == hpn::SafetyVerdict::unknown)
        std::fprintf(stderr, "safeness unknown: budget exhausted after %llu markings\n",
                     static_cast<unsigned long long>(safety.explored));
    return violations.empty() ? exit_ok : exit_analysis;
}

int run_end_code(hpn::RunEnd end)
{
    switch (end) {
    case hpn::RunEnd::firing_limit:
    case hpn::RunEnd::wall_timeout: return exit_limit;
    default: return exit_ok;
    }
}

int cmd_build(const CommonOpts& opts, const std::string& out_path)
{
    hpn::System sys = load_system(opts);
    std::string text = hpn::serialize_net(sys);
    if (out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        hpn::write_file(out_path, text);
    return exit_ok;
}

int cmd_validate(const CommonOpts& opts)
{
    if (!opts.spec_path.empty()) {
        hpn::SystemSpec spec = hpn::parse_spec(hpn::read_file(opts.spec_path));
        for (const std::string& w : hpn::validate(spec))
            std::printf("warning: %s\n", w.c_str());
        hpn::Assembly built = hpn::assemble(spec);
        hpn::flatten(built.sys);
        std::printf("ok: spec assembles into %zu nets\n", built.sys.net_count());
        return exit_ok;
    }
    hpn::System sys = load_system(opts);
    auto violations = hpn::check_pages(sys);
    for (const auto& v : violations)
        std::printf("page_rule %s inner=%s inputs=%u outputs=%u\n", v.page_path.c_str(),
                    v.inner_net.c_str(), v.input_places, v.output_places);
    hpn::flatten(sys);
    if (!violations.empty())
        return exit_validation;
    std::printf("ok: net with %zu nets flattens\n", sys.net_count());
    return exit_ok;
}

int cmd_analyze(const CommonOpts& opts)
{
    hpn::System sys = load_system(opts);
    hpn::GroundNet ground = hpn::flatten(sys);
    hpn::AnalysisReport report =
        hpn::analyze(sys, ground, hpn::ExplorationBudget{opts.budget, 30.0});
    std::fputs(hpn::format_report(report, ground).c_str(), stdout);
    return report.clean() ? exit_ok : exit_analysis;
}

int cmd_run(const CommonOpts& opts)
{
    hpn::System sys = load_system(opts);
    hpn::GroundNet ground = hpn::flatten(sys);
    if (!opts.skip_analysis) {
        int rc = verify_before_run(sys, ground, opts.budget);
        if (rc != exit_ok)
            return rc;
    }

    hpn::Registry reg;
    hpn::sim::register_ops(reg);
    hpn::RuntimeEnv env;
    if (!opts.config_path.empty() || std::getenv("HPN_CONFIG")) {
        hpn::sim::WorldConfig config = load_world(opts);
        hpn::sim::setup_env(env, config.params, config.track);
    }

    hpn::Executor exec(ground, reg, env, exec_options(opts));
    hpn::RunResult result = exec.run(hpn::ExecLimits{opts.max_firings, opts.timeout});
    if (!opts.trace_path.empty())
        hpn::write_file(opts.trace_path, exec.trace().serialize());
    std::printf("end=%s firings=%llu tokens=%llu\n", hpn::to_string(result.reason),
                static_cast<unsigned long long>(result.firings),
                static_cast<unsigned long long>(exec.total_tokens()));
    return run_end_code(result.reason);
}

int cmd_sim(const CommonOpts& opts, const std::string& pose_path, double duration,
            const std::string& track_path)
{
    hpn::sim::WorldConfig config = load_world(opts);
    if (duration > 0)
        config.params.duration = duration;
    if (!track_path.empty())
        config.track = hpn::sim::parse_track(hpn::read_file(track_path));

    hpn::System sys;
    if (opts.net_path.empty() && opts.spec_path.empty()) {
        sys = hpn::assemble(hpn::sim::line_follower_spec()).sys; // built-in example
    } else {
        sys = load_system(opts);
    }
    hpn::GroundNet ground = hpn::flatten(sys);
    if (!opts.skip_analysis) {
        int rc = verify_before_run(sys, ground, opts.budget);
        if (rc != exit_ok)
            return rc;
    }

    hpn::Registry reg;
    hpn::sim::register_ops(reg);
    hpn::RuntimeEnv env;
    auto world = hpn::sim::setup_env(env, config.params, config.track);

    hpn::Executor exec(ground, reg, env, exec_options(opts));
    hpn::RunResult result = exec.run(hpn::ExecLimits{opts.max_firings, opts.timeout});
    if (!opts.trace_path.empty())
        hpn::write_file(opts.trace_path, exec.trace().serialize());
    if (!pose_path.empty())
        hpn::write_file(pose_path, hpn::sim::pose_log_text(world->log()));

    hpn::sim::Summary summary =
        hpn::sim::summarize(world->log(), config.params.duration, config.params.threshold);
    std::printf("end=%s firings=%llu sim_time=%.3f on_line_fraction=%.4f distance=%.3f "
                "final_pose=%.6f %.6f %.6f\n",
                hpn::to_string(result.reason), static_cast<unsigned long long>(result.firings),
                summary.covered, summary.on_line_fraction, summary.distance, summary.final_pose.x,
                summary.final_pose.y, summary.final_pose.theta);
    return run_end_code(result.reason);
}

int cmd_generate(const CommonOpts& opts, const std::string& out_dir)
{
    hpn::System sys = load_system(opts);
    hpn::gen::SourceTree tree =
        hpn::gen::generate(sys, hpn::gen::EmissionPlan::defaults(), hpn::gen::line_follower_fragments());
    tree.write(out_dir);
    std::printf("generated %zu files, %zu lines -> %s\n", tree.files.size(), tree.total_lines(),
                out_dir.c_str());
    return exit_ok;
}

int cmd_export_dot(const CommonOpts& opts, bool ground_view, const std::string& out_path)
{
    hpn::System sys = load_system(opts);
    std::string text = ground_view ? hpn::export_dot(hpn::flatten(sys)) : hpn::export_dot(sys);
    if (out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        hpn::write_file(out_path, text);
    return exit_ok;
}

int cmd_measure_size(const std::vector<std::string>& net_paths, std::size_t count,
                     std::uint64_t seed)
{
    std::vector<hpn::System> owned;
    if (net_paths.empty()) {
        owned = hpn::gen::sample_corpus(count, seed);
    } else {
        for (const std::string& path : net_paths)
            owned.push_back(hpn::parse_net(hpn::read_file(path)));
    }
    std::vector<const hpn::System*> corpus;
    for (const hpn::System& sys : owned)
        corpus.push_back(&sys);
    hpn::gen::SizeProfile profile = hpn::gen::measure_size(
        corpus, hpn::gen::EmissionPlan::defaults(), hpn::gen::line_follower_fragments());
    std::fputs(hpn::gen::format_profile(profile).c_str(), stdout);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hierarchical Petri net robot-controller toolchain"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string out_path, pose_path, track_path;
    double duration = 0;
    bool ground_view = false;
    std::vector<std::string> net_paths;
    std::size_t corpus_count = 12;

    auto add_common = [&](CLI::App* cmd, bool with_net = true) {
        if (with_net) {
            cmd->add_option("--spec", opts.spec_path, "system spec file");
            cmd->add_option("--net", opts.net_path, "net definition file");
        }
        cmd->add_option("--seed", opts.seed, "scheduler seed");
        cmd->add_option("--config", opts.config_path, "world config file");
        cmd->add_option("--trace-out", opts.trace_path, "write the execution trace here");
        cmd->add_option("--budget", opts.budget, "analysis budget in markings");
        cmd->add_option("--max-firings", opts.max_firings, "firing limit");
        cmd->add_option("--timeout", opts.timeout, "wall clock limit in seconds");
        cmd->add_option("--policy", opts.policy, "det or random")
            ->check(CLI::IsMember({"det", "random"}));
        cmd->add_option("--workers", opts.workers, "operation worker count");
        cmd->add_flag("--skip-analysis", opts.skip_analysis, "skip the pre-run safety analysis");
        cmd->add_flag("--live-trace", opts.live_trace, "stream trace events to stdout as they commit");
    };

    CLI::App* build = app.add_subcommand("build", "assemble a spec into a net file");
    add_common(build);
    build->add_option("--out", out_path, "output net file (stdout when omitted)");

    CLI::App* validate = app.add_subcommand("validate", "check a spec or net file");
    add_common(validate);

    CLI::App* analyze = app.add_subcommand("analyze", "page rule, safeness, deadlocks");
    add_common(analyze);

    CLI::App* run = app.add_subcommand("run", "execute a net");
    add_common(run);

    CLI::App* sim = app.add_subcommand("sim", "closed-loop robot simulation");
    add_common(sim);
    sim->add_option("--pose-out", pose_path, "write the pose log here");
    sim->add_option("--duration", duration, "simulated seconds (overrides the config)");
    sim->add_option("--track", track_path, "track geometry file (overrides the config)");

    CLI::App* generate = app.add_subcommand("generate", "emit a standalone controller");
    add_common(generate);
    generate->add_option("--out", out_path, "output directory")->required();

    CLI::App* export_dot = app.add_subcommand("export-dot", "graphviz view of a net");
    add_common(export_dot);
    export_dot->add_flag("--ground", ground_view, "flatten before exporting");
    export_dot->add_option("--out", out_path, "output file (stdout when omitted)");

    CLI::App* measure = app.add_subcommand("measure-size", "generated-code size profile");
    measure->add_option("nets", net_paths, "net files to measure (default: built-in corpus)");
    measure->add_option("--count", corpus_count, "corpus size when generating");
    measure->add_option("--seed", opts.seed, "corpus seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (build->parsed())
            return cmd_build(opts, out_path);
        if (validate->parsed())
            return cmd_validate(opts);
        if (analyze->parsed())
            return cmd_analyze(opts);
        if (run->parsed())
            return cmd_run(opts);
        if (sim->parsed())
            return cmd_sim(opts, pose_path, duration, track_path);
        if (generate->parsed())
            return cmd_generate(opts, out_path);
        if (export_dot->parsed())
            return cmd_export_dot(opts, ground_view, out_path);
        if (measure->parsed())
            return cmd_measure_size(net_paths, corpus_count, opts.seed);
    } catch (const hpn::parse_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_validation;
    } catch (const hpn::config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_validation;
    } catch (const hpn::net_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_validation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_usage;
    }
    return exit_usage;
}
