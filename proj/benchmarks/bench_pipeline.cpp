#include <benchmark/benchmark.h>

#include <hpn/builder.hpp>
#include <hpn/codegen.hpp>
#include <hpn/executor.hpp>
#include <hpn/netfile.hpp>
#include <hpn/sim.hpp>

namespace {

void BM_ExecutorLineFollower(benchmark::State& state)
{
    const double horizon = static_cast<double>(state.range(0)) / 100.0;
    hpn::Assembly built = hpn::assemble(hpn::sim::line_follower_spec());
    hpn::GroundNet g = hpn::flatten(built.sys);
    hpn::sim::WorldParams params;
    params.duration = horizon;
    std::uint64_t firings = 0;
    for (auto _ : state) {
        hpn::Registry reg;
        hpn::RuntimeEnv env;
        hpn::sim::register_line_follower(reg, env, params, hpn::sim::Track::oval(1.0, 0.3));
        hpn::Executor exec(g, reg, env);
        hpn::RunResult r = exec.run(hpn::ExecLimits{100000000, 300.0});
        firings += r.firings;
    }
    state.counters["firings/s"] =
        benchmark::Counter(static_cast<double>(firings), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_ExecutorLineFollower)->Arg(25)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_WorldStep(benchmark::State& state)
{
    hpn::sim::WorldParams params;
    hpn::sim::World world(params, hpn::sim::Track::oval(1.0, 0.3));
    hpn::sim::WheelSpeeds w{3.0, 3.2};
    for (auto _ : state)
        world.push_command(w);
}
BENCHMARK(BM_WorldStep);

void BM_GenerateLineFollower(benchmark::State& state)
{
    hpn::Assembly built = hpn::assemble(hpn::sim::line_follower_spec());
    for (auto _ : state)
        benchmark::DoNotOptimize(hpn::gen::generate(built.sys, hpn::gen::EmissionPlan::defaults(),
                                                    hpn::gen::line_follower_fragments()));
}
BENCHMARK(BM_GenerateLineFollower);

void BM_SerializeNet(benchmark::State& state)
{
    hpn::Assembly built = hpn::assemble(hpn::sim::line_follower_spec());
    for (auto _ : state)
        benchmark::DoNotOptimize(hpn::serialize_net(built.sys));
}
BENCHMARK(BM_SerializeNet);

} // namespace
