#include <benchmark/benchmark.h>

#include <hpn/analysis.hpp>
#include <hpn/builder.hpp>
#include <hpn/comm.hpp>
#include <hpn/flatten.hpp>
#include <hpn/safety.hpp>
#include <hpn/sim.hpp>

namespace {

hpn::System async_pair_harness()
{
    using namespace hpn;
    System sys;
    const std::string id = chan_id("a1.p.w", "a1.q.r");
    ChannelPages pages = build_async_pair(sys, "a1.p.w", "a1.q.r", chan_write_key(id),
                                          chan_read_key(id));
    NetId root = sys.add_net("root");
    NetGraph& r = sys.net(root);
    r.add_place("dp");
    r.add_place("dq");
    r.add_transition("tp_in");
    r.add_transition("tp_out");
    r.add_transition("tq_in");
    r.add_transition("tq_out");
    r.add_page("snd", pages.snd);
    r.add_page("rcv", pages.rcv);
    r.connect("dp", "tp_in");
    r.connect("tp_in", "snd");
    r.connect("snd", "tp_out");
    r.connect("tp_out", "dp");
    r.connect("dq", "tq_in");
    r.connect("tq_in", "rcv");
    r.connect("rcv", "tq_out");
    r.connect("tq_out", "dq");
    sys.set_initial(sys.place("root", "dp"), 1);
    sys.set_initial(sys.place("root", "dq"), 1);
    return sys;
}

void BM_AssembleLineFollower(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(hpn::assemble(hpn::sim::line_follower_spec()));
}
BENCHMARK(BM_AssembleLineFollower);

void BM_FlattenLineFollower(benchmark::State& state)
{
    hpn::Assembly built = hpn::assemble(hpn::sim::line_follower_spec());
    for (auto _ : state)
        benchmark::DoNotOptimize(hpn::flatten(built.sys));
}
BENCHMARK(BM_FlattenLineFollower);

void BM_TokenGameStep(benchmark::State& state)
{
    hpn::System sys = async_pair_harness();
    hpn::GroundNet g = hpn::flatten(sys);
    hpn::Marking m = g.initial_marking();
    for (auto& s : m.status)
        s = hpn::OpStatus::done;
    for (auto _ : state) {
        auto active = hpn::token_enabled(g, m);
        if (active.empty())
            break;
        hpn::fire_inplace(g, m, active.front());
        for (std::uint32_t p : g.transitions[active.front()].outputs)
            m.status[p] = hpn::OpStatus::done;
    }
}
BENCHMARK(BM_TokenGameStep);

void BM_SafenessAsyncPair(benchmark::State& state)
{
    hpn::System sys = async_pair_harness();
    hpn::GroundNet g = hpn::flatten(sys);
    for (auto _ : state)
        benchmark::DoNotOptimize(hpn::is_safe(g, g.initial_marking()));
}
BENCHMARK(BM_SafenessAsyncPair);

void BM_ExploreLineFollower(benchmark::State& state)
{
    hpn::Assembly built = hpn::assemble(hpn::sim::line_follower_spec());
    hpn::GroundNet g = hpn::flatten(built.sys);
    for (auto _ : state)
        benchmark::DoNotOptimize(hpn::explore(g, g.initial_marking()));
}
BENCHMARK(BM_ExploreLineFollower);

} // namespace
