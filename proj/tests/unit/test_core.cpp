#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include <hpn/flatten.hpp>
#include <hpn/net.hpp>
#include <hpn/safety.hpp>

#include "support/hier_interp.hpp"
#include "support/naive_explore.hpp"
#include "support/random_nets.hpp"

using namespace hpn;

namespace {

// ground-net trace language via the library path, for comparison against
// the hierarchical reference interpreter
void ground_language_walk(const GroundNet& net, const Marking& m, const std::string& prefix,
                          std::size_t depth, std::set<std::string>& out, std::size_t cap)
{
    out.insert(prefix);
    if (depth == 0 || out.size() >= cap)
        return;
    for (std::uint32_t t : token_enabled(net, m))
        ground_language_walk(net, fire(net, m, t),
                             prefix.empty() ? net.transitions[t].path
                                            : prefix + " " + net.transitions[t].path,
                             depth - 1, out, cap);
}

std::set<std::string> ground_language(const GroundNet& net, std::size_t depth)
{
    std::set<std::string> out;
    Marking m = net.initial_marking();
    for (auto& s : m.status)
        s = OpStatus::done; // token game only
    ground_language_walk(net, m, "", depth, out, 100000);
    return out;
}

System three_place_cycle()
{
    System sys;
    NetId id = sys.add_net("cycle");
    NetGraph& n = sys.net(id);
    n.add_place("p0");
    n.add_place("p1");
    n.add_place("p2");
    n.add_transition("t0");
    n.add_transition("t1");
    n.add_transition("t2");
    n.connect("p0", "t0");
    n.connect("t0", "p1");
    n.connect("p1", "t1");
    n.connect("t1", "p2");
    n.connect("p2", "t2");
    n.connect("t2", "p0");
    sys.set_initial(PlaceId{id, 0}, 1);
    return sys;
}

} // namespace

TEST_CASE("add_place assigns ids and rejects duplicates")
{
    System sys;
    NetId id = sys.add_net("n");
    CHECK(sys.net(id).add_place("p_in") == 0);
    CHECK(sys.net(id).places.size() == 1);
    CHECK_THROWS_AS(sys.net(id).add_place("p_in"), net_error);
    CHECK_THROWS_AS(sys.net(id).add_place(""), net_error);
}

TEST_CASE("connect enforces the bipartite rule")
{
    System sys;
    NetGraph& n = sys.net(sys.add_net("n"));
    n.add_place("p");
    n.add_place("q");
    n.add_transition("t");
    CHECK_NOTHROW(n.connect("p", "t"));
    CHECK_NOTHROW(n.connect("t", "q"));
    CHECK_THROWS_AS(n.connect("p", "q"), net_error);
    CHECK_THROWS_AS(n.connect("t", "t"), net_error);
    CHECK_THROWS_AS(n.connect("p", "nope"), net_error);
}

TEST_CASE("arcs into pages reach the inner input place")
{
    System sys;
    NetId inner = sys.add_net("inner");
    sys.net(inner).add_place("pi", "", true, false);
    sys.net(inner).add_place("po", "", false, true);
    sys.net(inner).add_transition("t");
    sys.net(inner).connect("pi", "t");
    sys.net(inner).connect("t", "po");

    NetId root = sys.add_net("root");
    NetGraph& r = sys.net(root);
    r.add_transition("ta");
    r.add_transition("tb");
    r.add_page("pg", inner);
    r.connect("ta", "pg");
    r.connect("pg", "tb");

    GroundNet g = flatten(sys);
    // splice arithmetic: the page dissolves into its two places
    CHECK(g.places.size() == 2);
    CHECK(g.transitions.size() == 3);
    const GroundTransition& ta = g.transitions[g.transition("root.ta")];
    REQUIRE(ta.outputs.size() == 1);
    CHECK(g.places[ta.outputs[0]].path == "root.pg.pi");
    const GroundTransition& tb = g.transitions[g.transition("root.tb")];
    REQUIRE(tb.inputs.size() == 1);
    CHECK(g.places[tb.inputs[0]].path == "root.pg.po");
}

TEST_CASE("fuse merges across nets and rejects overlap")
{
    System sys;
    NetId a = sys.add_net("a");
    NetId b = sys.add_net("b");
    NetId c = sys.add_net("c");
    for (NetId id : {a, b, c}) {
        sys.net(id).add_place("pi", "", true, false);
        sys.net(id).add_place("po", "", false, true);
        sys.net(id).add_place("m");
    }
    NetId root = sys.add_net("root");
    sys.net(root).add_page("pa", a);
    sys.net(root).add_page("pb", b);
    sys.net(root).add_page("pc", c);

    SUBCASE("self fusion is the identity")
    {
        sys.fuse("g", {PlaceId{a, 2}, PlaceId{a, 2}});
        CHECK(sys.fusions()[0].members.size() == 1);
    }
    SUBCASE("three channel places collapse to one ground place")
    {
        sys.fuse("mux", {PlaceId{a, 2}, PlaceId{b, 2}, PlaceId{c, 2}});
        sys.set_initial(PlaceId{a, 2}, 1);
        GroundNet g = flatten(sys);
        // nine inner places minus two merged away
        CHECK(g.places.size() == 7);
        CHECK(g.initial_tokens[g.place("fusion.mux")] == 1);
    }
    SUBCASE("overlapping groups are rejected")
    {
        sys.fuse("g1", {PlaceId{a, 2}, PlaceId{b, 2}});
        CHECK_THROWS_AS(sys.fuse("g2", {PlaceId{b, 2}, PlaceId{c, 2}}), net_error);
    }
}

TEST_CASE("flatten rejects malformed pages and page cycles")
{
    SUBCASE("missing output place")
    {
        System sys;
        NetId inner = sys.add_net("inner");
        sys.net(inner).add_place("pi", "", true, false);
        NetId root = sys.add_net("root");
        sys.net(root).add_page("pg", inner);
        CHECK_THROWS_AS(flatten(sys), net_error);
    }
    SUBCASE("two output places")
    {
        System sys;
        NetId inner = sys.add_net("inner");
        sys.net(inner).add_place("pi", "", true, false);
        sys.net(inner).add_place("po1", "", false, true);
        sys.net(inner).add_place("po2", "", false, true);
        NetId root = sys.add_net("root");
        sys.net(root).add_page("pg", inner);
        CHECK_THROWS_AS(flatten(sys), net_error);
    }
    SUBCASE("page cycle has no root")
    {
        System sys;
        NetId a = sys.add_net("a");
        NetId b = sys.add_net("b");
        sys.net(a).add_place("pi", "", true, true);
        sys.net(b).add_place("pi", "", true, true);
        sys.net(a).add_page("pg", b);
        sys.net(b).add_page("pg", a);
        CHECK_THROWS_AS(flatten(sys), net_error);
    }
}

TEST_CASE("enabled requires tokens, completed operations and conditions")
{
    System sys;
    NetId id = sys.add_net("n");
    NetGraph& n = sys.net(id);
    n.add_place("p", "some.op");
    n.add_place("q");
    n.add_place("r");
    n.add_transition("t", "some.cond");
    n.add_transition("join");
    n.connect("p", "t");
    n.connect("q", "join");
    n.connect("r", "join");
    sys.set_initial(PlaceId{id, 0}, 1);
    sys.set_initial(PlaceId{id, 1}, 1);

    GroundNet g = flatten(sys);
    Marking m = g.initial_marking();

    SUBCASE("operation still running blocks the transition")
    {
        CHECK(m.status[g.place("n.p")] == OpStatus::idle);
        CHECK(enabled(g, m).empty());
        m.status[g.place("n.p")] = OpStatus::done;
        auto act = enabled(g, m);
        REQUIRE(act.size() == 1);
        CHECK(g.transitions[act[0]].path == "n.t");
    }
    SUBCASE("join needs every input place marked")
    {
        m.status[g.place("n.p")] = OpStatus::done;
        auto act = enabled(g, m);
        for (std::uint32_t t : act)
            CHECK(g.transitions[t].path != "n.join");
        m.tokens[g.place("n.r")] = 1;
        m.status[g.place("n.r")] = OpStatus::done;
        act = enabled(g, m);
        bool join_active = false;
        for (std::uint32_t t : act)
            join_active = join_active || g.transitions[t].path == "n.join";
        CHECK(join_active);
    }
    SUBCASE("condition veto")
    {
        m.status[g.place("n.p")] = OpStatus::done;
        auto veto = [](const GroundTransition&) { return false; };
        CHECK(enabled(g, m, veto).empty());
    }
}

TEST_CASE("fire moves one token along the transition")
{
    System sys;
    NetId id = sys.add_net("n");
    NetGraph& n = sys.net(id);
    n.add_place("p1");
    n.add_place("p2");
    n.add_transition("t");
    n.connect("p1", "t");
    n.connect("t", "p2");
    sys.set_initial(PlaceId{id, 0}, 1);
    GroundNet g = flatten(sys);
    Marking m = g.initial_marking();

    Marking next = fire(g, m, 0);
    CHECK(next.tokens[g.place("n.p1")] == 0);
    CHECK(next.tokens[g.place("n.p2")] == 1);
    CHECK_THROWS_AS(fire(g, next, 0), net_error);
}

TEST_CASE("token conservation per firing")
{
    testsup::Rng rng(42);
    for (int iter = 0; iter < 50; ++iter) {
        System sys = testsup::random_ground_system(rng);
        GroundNet g = flatten(sys);
        Marking m = g.initial_marking();
        for (auto& s : m.status)
            s = OpStatus::done;
        for (int steps = 0; steps < 20; ++steps) {
            auto act = token_enabled(g, m);
            if (act.empty())
                break;
            std::uint32_t t = act[testsup::pick(rng, static_cast<std::uint32_t>(act.size()))];
            std::uint64_t before = 0, after = 0;
            for (std::uint32_t c : m.tokens)
                before += c;
            m = fire(g, m, t);
            for (std::uint32_t c : m.tokens)
                after += c;
            const auto& tr = g.transitions[t];
            CHECK(after == before - tr.inputs.size() + tr.outputs.size());
        }
    }
}

TEST_CASE("three-place cycle reaches exactly three markings")
{
    GroundNet g = flatten(three_place_cycle());
    auto naive = testsup::naive_explore(g);
    CHECK(naive.markings.size() == 3); // brute force confirms the frozen value
    CHECK_FALSE(naive.unsafe);

    SafetyResult safety = is_safe(g, g.initial_marking());
    CHECK(safety.verdict == SafetyVerdict::safe);
    CHECK(safety.explored == 3);
}

TEST_CASE("parallel branches feeding one place are unsafe with a two-step witness")
{
    System sys;
    NetId id = sys.add_net("n");
    NetGraph& n = sys.net(id);
    n.add_place("pa");
    n.add_place("pb");
    n.add_place("pc");
    n.add_transition("ta");
    n.add_transition("tb");
    n.connect("pa", "ta");
    n.connect("ta", "pc");
    n.connect("pb", "tb");
    n.connect("tb", "pc");
    sys.set_initial(PlaceId{id, 0}, 1);
    sys.set_initial(PlaceId{id, 1}, 1);

    GroundNet g = flatten(sys);
    SafetyResult r = is_safe(g, g.initial_marking());
    CHECK(r.verdict == SafetyVerdict::unsafe);
    CHECK(r.witness.size() == 2);
    CHECK(r.witness_place == "n.pc");
}

TEST_CASE("budget exhaustion yields an explicit unknown verdict")
{
    // many independent cycles: state space far beyond the tiny budget
    System sys;
    NetId id = sys.add_net("n");
    NetGraph& n = sys.net(id);
    for (int i = 0; i < 12; ++i) {
        std::string p0 = "p" + std::to_string(2 * i);
        std::string p1 = "p" + std::to_string(2 * i + 1);
        std::string t0 = "t" + std::to_string(2 * i);
        std::string t1 = "t" + std::to_string(2 * i + 1);
        n.add_place(p0);
        n.add_place(p1);
        n.add_transition(t0);
        n.add_transition(t1);
        n.connect(p0, t0);
        n.connect(t0, p1);
        n.connect(p1, t1);
        n.connect(t1, p0);
        sys.set_initial(PlaceId{id, static_cast<std::uint32_t>(2 * i)}, 1);
    }
    GroundNet g = flatten(sys);
    SafetyResult r = is_safe(g, g.initial_marking(), ExplorationBudget{16, 10.0});
    CHECK(r.verdict == SafetyVerdict::unknown);
    CHECK(r.truncated);
}

TEST_CASE("safeness checker agrees with the naive enumerator")
{
    testsup::Rng rng(7);
    int compared = 0;
    for (int iter = 0; iter < 120; ++iter) {
        System sys = testsup::random_ground_system(rng);
        GroundNet g = flatten(sys);
        auto naive = testsup::naive_explore(g, 50000);
        if (naive.capped)
            continue;
        SafetyResult r = is_safe(g, g.initial_marking(), ExplorationBudget{200000, 20.0});
        REQUIRE(r.verdict != SafetyVerdict::unknown);
        CHECK((r.verdict == SafetyVerdict::unsafe) == naive.unsafe);
        ++compared;
    }
    CHECK(compared > 80);
}

TEST_CASE("fusion transparency: member paths observe the same tokens")
{
    System sys;
    NetId a = sys.add_net("a");
    NetId b = sys.add_net("b");
    for (NetId id : {a, b}) {
        sys.net(id).add_place("pi", "", true, false);
        sys.net(id).add_place("po", "", false, true);
        sys.net(id).add_place("shared");
        sys.net(id).add_transition("t");
        sys.net(id).connect("pi", "t");
        sys.net(id).connect("shared", "t");
        sys.net(id).connect("t", "po");
    }
    NetId root = sys.add_net("root");
    sys.net(root).add_page("pa", a);
    sys.net(root).add_page("pb", b);
    sys.fuse("g", {PlaceId{a, 2}, PlaceId{b, 2}});
    sys.set_initial(PlaceId{a, 2}, 1);
    sys.set_initial(PlaceId{a, 0}, 1);
    sys.set_initial(PlaceId{b, 0}, 1);

    GroundNet g = flatten(sys);
    std::uint32_t shared = g.place("fusion.g");
    Marking m = g.initial_marking();
    CHECK(m.tokens[shared] == 1);

    // only one of the two competing transitions can take the shared token
    auto act = token_enabled(g, m);
    CHECK(act.size() == 2);
    m = fire(g, m, act[0]);
    CHECK(m.tokens[shared] == 0);
    CHECK(token_enabled(g, m).empty());
}

TEST_CASE("flatten-then-fire equals hierarchical simulation on random nets")
{
    testsup::Rng rng(2024);
    for (int iter = 0; iter < 60; ++iter) {
        System sys = testsup::random_hierarchical_system(rng);
        std::size_t total_places = 0;
        for (std::uint32_t n = 0; n < sys.net_count(); ++n)
            total_places += sys.net(NetId{n}).places.size();
        REQUIRE(total_places <= 12);

        GroundNet g = flatten(sys);
        testsup::HierInterp interp(sys);
        CHECK(ground_language(g, 6) == interp.language(6));
    }
}
