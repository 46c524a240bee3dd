#include "hpn/codegen.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "hpn/netfile.hpp"

namespace hpn::gen {

namespace {

std::string substitute(std::string tpl, const std::map<std::string, std::string>& slots)
{
    for (const auto& [key, value] : slots) {
        const std::string marker = "@" + key + "@";
        std::size_t pos = 0;
        while ((pos = tpl.find(marker, pos)) != std::string::npos) {
            tpl.replace(pos, marker.size(), value);
            pos += value.size();
        }
    }
    return tpl;
}

std::string sanitize(const std::string& key)
{
    std::string out;
    for (char c : key)
        out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out;
}

const char* affinity_word(OpAffinity a)
{
    return a == OpAffinity::world ? "world" : "any";
}

// children-first order over the page-reference DAG
// Composite condition keys (not__X, any__A__B) resolve through their leaf
// bindings, so the leaves are what the generated controller must register.
void collect_cond_leaves(const std::string& key, std::set<std::string>& out)
{
    if (key.rfind("not__", 0) == 0) {
        collect_cond_leaves(key.substr(5), out);
        return;
    }
    if (key.rfind("any__", 0) == 0) {
        const std::string rest = key.substr(5);
        std::size_t sep = rest.find("__");
        if (sep != std::string::npos) {
            collect_cond_leaves(rest.substr(0, sep), out);
            collect_cond_leaves(rest.substr(sep + 2), out);
            return;
        }
    }
    out.insert(key);
}

std::vector<std::uint32_t> emission_order(const System& sys)
{
    std::vector<std::uint32_t> order;
    std::vector<int> state(sys.net_count(), 0);
    auto visit = [&](auto&& self, std::uint32_t n) -> void {
        if (state[n])
            return;
        state[n] = 1;
        for (const Page& p : sys.net(NetId{n}).pages)
            self(self, p.inner.value);
        order.push_back(n);
    };
    for (std::uint32_t n = 0; n < sys.net_count(); ++n)
        visit(visit, n);
    return order;
}

} // namespace

EmissionPlan EmissionPlan::defaults()
{
    EmissionPlan p;
    p.net_line = "    n = &sys.net(sys.add_net(\"@name@\"));";
    p.place_line = "    n->add_place(\"@name@\", \"@op@\", @in@, @out@);";
    p.transition_line = "    n->add_transition(\"@name@\", \"@cond@\");";
    p.page_line = "    n->add_page(\"@name@\", sys.net_by_name(\"@inner@\"));";
    p.arc_line = "    n->connect(\"@from@\", \"@to@\");";
    p.fusion_line = "    sys.fuse(\"@name@\", {@members@});";
    p.marking_line = "    sys.set_initial(sys.place(\"@net@\", \"@place@\"), @count@);";

    p.main_header = R"(// standalone controller emitted by hpnctl generate
#include <cstdio>
#include <cstdlib>
#include <string>

#include <hpn/executor.hpp>
#include <hpn/flatten.hpp>
#include <hpn/net.hpp>
#include <hpn/netfile.hpp>
#include <hpn/registry.hpp>
#include <hpn/sim.hpp>
#include <hpn/worldfile.hpp>

void register_bindings(hpn::Registry& reg);

static hpn::System build_system()
{
    hpn::System sys;
    hpn::NetGraph* n = nullptr;
    (void)n;
)";

    p.main_footer = R"(    return sys;
}

int main(int argc, char** argv)
{
    std::string config_path;
    std::string trace_path = "trace.out";
    std::string pose_path;
    std::string policy = "det";
    std::uint64_t seed = 0;
    std::uint64_t max_firings = 1000000;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        const std::string value = i + 1 < argc ? argv[i + 1] : "";
        if (arg == "--config") config_path = value, ++i;
        else if (arg == "--trace-out") trace_path = value, ++i;
        else if (arg == "--pose-out") pose_path = value, ++i;
        else if (arg == "--policy") policy = value, ++i;
        else if (arg == "--seed") seed = std::stoull(value), ++i;
        else if (arg == "--max-firings") max_firings = std::stoull(value), ++i;
        else { std::fprintf(stderr, "unknown flag '%s'\n", arg.c_str()); return 1; }
    }
    try {
        hpn::System sys = build_system();
        hpn::GroundNet ground = hpn::flatten(sys);
        hpn::Registry reg;
        hpn::RuntimeEnv env;
        register_bindings(reg);
        if (!config_path.empty()) {
            hpn::sim::WorldConfig config = hpn::sim::parse_world(hpn::read_file(config_path));
            hpn::sim::setup_env(env, config.params, config.track);
        }
        hpn::ExecOptions options;
        options.seed = seed;
        options.policy = policy == "random" ? hpn::SchedulingPolicy::seeded_random
                                            : hpn::SchedulingPolicy::deterministic;
        hpn::RunResult result;
        {
            hpn::Executor exec(ground, reg, env, options);
            result = exec.run(hpn::ExecLimits{max_firings, 1e9});
            hpn::write_file(trace_path, exec.trace().serialize());
        }
        if (!pose_path.empty() && env.world())
            hpn::write_file(pose_path, hpn::sim::pose_log_text(env.world()->log()));
        std::printf("end=%s firings=%llu\n", hpn::to_string(result.reason),
                    static_cast<unsigned long long>(result.firings));
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
)";

    p.fragments_header = R"(// binding stubs emitted by hpnctl generate
#include <hpn/registry.hpp>
#include <hpn/sim.hpp>

namespace {
)";

    p.op_stub = R"(void @fn@(hpn::OpCall& call)
{
    @body@
}
)";
    p.cond_stub = R"(bool @fn@(const hpn::CondCall& call)
{
    @body@
}
)";
    p.op_reg_line = "    reg.op(\"@key@\", &@fn@, hpn::OpAffinity::@affinity@, \"@subsystem@\");";
    p.cond_reg_line = "    reg.cond(\"@key@\", &@fn@, \"@subsystem@\");";

    p.cmake_file = R"(cmake_minimum_required(VERSION 3.20)
project(hpn_controller LANGUAGES CXX)
set(CMAKE_CXX_STANDARD 20)
set(CMAKE_CXX_STANDARD_REQUIRED ON)
find_package(hpnkit REQUIRED)
add_executable(controller main.cpp fragments.cpp)
target_link_libraries(controller PRIVATE hpnkit::core)
)";
    return p;
}

FragmentStore line_follower_fragments()
{
    FragmentStore store;
    auto op = [&](const char* key, const char* callee, OpAffinity affinity, const char* subsystem) {
        Fragment f;
        f.body = std::string(callee) + "(call);";
        f.affinity = affinity;
        f.subsystem = subsystem;
        store.add(key, std::move(f));
    };
    auto cond = [&](const char* key, const char* callee, const char* subsystem) {
        Fragment f;
        f.body = "return " + std::string(callee) + "(call);";
        f.is_condition = true;
        f.subsystem = subsystem;
        store.add(key, std::move(f));
    };
    op("sim.tf_init", "hpn::sim::tf_init_op", OpAffinity::any, "a1.c");
    op("sim.tf_control", "hpn::sim::tf_control_op", OpAffinity::any, "a1.c");
    op("sim.tf_motor", "hpn::sim::tf_motor_op", OpAffinity::any, "a1.e_motor");
    op("sim.tf_sensor", "hpn::sim::tf_sensor_op", OpAffinity::any, "a1.r_sensor");
    op("world.push.E_motor", "hpn::sim::world_push_op", OpAffinity::world, "a1.e_motor");
    op("world.sample.R_sensor", "hpn::sim::world_sample_op", OpAffinity::world, "a1.r_sensor");
    cond("sim.c_init_done", "hpn::sim::c_init_done_cond", "a1.c");
    cond("sim.c_mission_done", "hpn::sim::c_mission_done_cond", "a1.c");
    cond("sim.c_line_lost", "hpn::sim::c_line_lost_cond", "a1.c");
    cond("sim.e_halt", "hpn::sim::e_halt_cond", "a1.e_motor");
    cond("sim.r_halt", "hpn::sim::r_halt_cond", "a1.r_sensor");
    return store;
}

std::size_t SourceTree::total_lines() const
{
    std::size_t lines = 0;
    for (const auto& [name, content] : files) {
        if (name == "manifest.txt")
            continue;
        lines += static_cast<std::size_t>(std::count(content.begin(), content.end(), '\n'));
    }
    return lines;
}

void SourceTree::write(const std::string& directory) const
{
    std::filesystem::create_directories(directory);
    for (const auto& [name, content] : files)
        write_file(directory + "/" + name, content);
}

SourceTree generate(const System& sys, const EmissionPlan& plan, const FragmentStore& fragments)
{
    // Collect the binding keys the net uses and split them into spliced
    // stubs (fragment available) and keys the registry resolves by itself.
    std::set<std::string> op_keys, cond_keys, full_cond_keys;
    for (std::uint32_t n = 0; n < sys.net_count(); ++n) {
        const NetGraph& net = sys.net(NetId{n});
        for (const Place& p : net.places)
            if (!p.op.empty())
                op_keys.insert(p.op);
        for (const Transition& t : net.transitions)
            if (!t.cond.empty()) {
                full_cond_keys.insert(t.cond);
                collect_cond_leaves(t.cond, cond_keys);
            }
    }

    Registry probe;
    for (const auto& [key, fragment] : fragments.all()) {
        if (fragment.is_condition)
            probe.cond(key, [](const CondCall&) { return false; }, fragment.subsystem);
        else
            probe.op(key, [](OpCall&) {}, fragment.affinity, fragment.subsystem);
    }
    for (const std::string& key : op_keys)
        probe.resolve_op(key); // throws config_error on unresolved bindings
    for (const std::string& key : full_cond_keys)
        probe.resolve_cond(key);

    std::ostringstream main;
    main << plan.main_header;
    for (std::uint32_t n : emission_order(sys)) {
        const NetGraph& net = sys.net(NetId{n});
        main << substitute(plan.net_line, {{"name", net.name}}) << '\n';
        for (const Place& p : net.places)
            main << substitute(plan.place_line, {{"name", p.name},
                                                 {"op", p.op},
                                                 {"in", p.is_input ? "true" : "false"},
                                                 {"out", p.is_output ? "true" : "false"}})
                 << '\n';
        for (const Transition& t : net.transitions)
            main << substitute(plan.transition_line, {{"name", t.name}, {"cond", t.cond}}) << '\n';
        for (const Page& p : net.pages)
            main << substitute(plan.page_line, {{"name", p.name}, {"inner", sys.net(p.inner).name}})
                 << '\n';
        auto name_of = [&](NodeRef r) -> const std::string& {
            switch (r.kind) {
            case NodeRef::Kind::place: return net.places[r.index].name;
            case NodeRef::Kind::transition: return net.transitions[r.index].name;
            default: return net.pages[r.index].name;
            }
        };
        for (const Arc& a : net.arcs)
            main << substitute(plan.arc_line, {{"from", name_of(a.from)}, {"to", name_of(a.to)}})
                 << '\n';
    }
    for (const FusionGroup& g : sys.fusions()) {
        std::string members;
        for (const PlaceId& m : g.members) {
            if (!members.empty())
                members += ", ";
            members += "sys.place(\"" + sys.net(m.net).name + "\", \"" +
                       sys.net(m.net).places[m.index].name + "\")";
        }
        main << substitute(plan.fusion_line, {{"name", g.name}, {"members", members}}) << '\n';
    }
    for (const auto& [id, count] : sys.initial_marking())
        main << substitute(plan.marking_line,
                           {{"net", sys.net(id.net).name},
                            {"place", sys.net(id.net).places[id.index].name},
                            {"count", std::to_string(count)}})
             << '\n';
    main << plan.main_footer;

    std::ostringstream frag;
    frag << plan.fragments_header;
    std::vector<std::pair<std::string, const Fragment*>> used;
    for (const std::string& key : op_keys)
        if (const Fragment* f = fragments.find(key))
            used.emplace_back(key, f);
    for (const std::string& key : cond_keys)
        if (const Fragment* f = fragments.find(key))
            used.emplace_back(key, f);
    std::sort(used.begin(), used.end());
    for (const auto& [key, f] : used) {
        const std::string fn = (f->is_condition ? "cond_" : "op_") + sanitize(key);
        frag << '\n'
             << substitute(f->is_condition ? plan.cond_stub : plan.op_stub,
                           {{"fn", fn}, {"body", f->body}});
    }
    frag << "\n} // namespace\n\nvoid register_bindings(hpn::Registry& reg)\n{\n";
    frag << "    (void)reg;\n";
    for (const auto& [key, f] : used) {
        const std::string fn = (f->is_condition ? "cond_" : "op_") + sanitize(key);
        if (f->is_condition)
            frag << substitute(plan.cond_reg_line,
                               {{"key", key}, {"fn", fn}, {"subsystem", f->subsystem}})
                 << '\n';
        else
            frag << substitute(plan.op_reg_line, {{"key", key},
                                                  {"fn", fn},
                                                  {"affinity", affinity_word(f->affinity)},
                                                  {"subsystem", f->subsystem}})
                 << '\n';
    }
    frag << "}\n";

    SourceTree tree;
    tree.files["main.cpp"] = main.str();
    tree.files["fragments.cpp"] = frag.str();
    tree.files["CMakeLists.txt"] = plan.cmake_file;

    std::size_t places = 0, transitions = 0, arcs = 0, pages = 0;
    for (std::uint32_t n = 0; n < sys.net_count(); ++n) {
        const NetGraph& net = sys.net(NetId{n});
        places += net.places.size();
        transitions += net.transitions.size();
        arcs += net.arcs.size();
        pages += net.pages.size();
    }
    std::ostringstream manifest;
    manifest << "hpnmanifest 1\n";
    manifest << "places " << places << '\n';
    manifest << "transitions " << transitions << '\n';
    manifest << "arcs " << arcs << '\n';
    manifest << "pages " << pages << '\n';
    manifest << "fusions " << sys.fusions().size() << '\n';
    for (const auto& [name, content] : tree.files)
        manifest << "file " << name << ' ' << std::count(content.begin(), content.end(), '\n')
                 << '\n';
    tree.files["manifest.txt"] = manifest.str();
    return tree;
}

SizeProfile measure_size(const std::vector<const System*>& corpus, const EmissionPlan& plan,
                         const FragmentStore& fragments)
{
    if (corpus.size() < 5)
        throw net_error("measure_size needs at least 5 nets");

    const std::size_t k = 5;
    std::vector<std::array<double, 5>> rows;
    std::vector<double> y;
    for (const System* sys : corpus) {
        double p = 0, t = 0, a = 0, pg = 0;
        for (std::uint32_t n = 0; n < sys->net_count(); ++n) {
            const NetGraph& net = sys->net(NetId{n});
            p += static_cast<double>(net.places.size());
            t += static_cast<double>(net.transitions.size());
            a += static_cast<double>(net.arcs.size());
            pg += static_cast<double>(net.pages.size());
        }
        rows.push_back({1.0, p, t, a, pg});
        y.push_back(static_cast<double>(generate(*sys, plan, fragments).total_lines()));
    }

    // normal equations, 5x5 gaussian elimination with partial pivoting
    double m[5][6] = {};
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j)
                m[i][j] += rows[r][i] * rows[r][j];
            m[i][k] += rows[r][i] * y[r];
        }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < k; ++r)
            if (std::abs(m[r][col]) > std::abs(m[pivot][col]))
                pivot = r;
        if (std::abs(m[pivot][col]) < 1e-9)
            throw net_error("measure_size: degenerate corpus (collinear element counts)");
        std::swap(m[col], m[pivot]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r == col)
                continue;
            const double f = m[r][col] / m[col][col];
            for (std::size_t c = col; c <= k; ++c)
                m[r][c] -= f * m[col][c];
        }
    }
    double coeff[5];
    for (std::size_t i = 0; i < k; ++i)
        coeff[i] = m[i][k] / m[i][i];

    SizeProfile profile;
    profile.constant = coeff[0];
    profile.per_place = coeff[1];
    profile.per_transition = coeff[2];
    profile.per_arc = coeff[3];
    profile.per_page = coeff[4];
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double predicted = 0;
        for (std::size_t i = 0; i < k; ++i)
            predicted += coeff[i] * rows[r][i];
        profile.residuals.push_back(y[r] - predicted);
        profile.max_residual = std::max(profile.max_residual, std::abs(y[r] - predicted));
    }
    return profile;
}

std::vector<System> sample_corpus(std::size_t count, std::uint64_t seed)
{
    std::vector<System> corpus;
    std::uint64_t state = seed * 6364136223846793005ull + 1442695040888963407ull;
    auto next = [&state](std::uint64_t n) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return (state >> 33) % n;
    };
    for (std::size_t i = 0; i < count; ++i) {
        System sys;
        const std::size_t pages = next(4);
        std::vector<NetId> inner;
        for (std::size_t k = 0; k < pages; ++k) {
            NetId id = sys.add_net("inner" + std::to_string(k));
            NetGraph& n = sys.net(id);
            n.add_place("pi", "", true, false);
            n.add_place("po", "", false, true);
            n.add_transition("t");
            n.connect("pi", "t");
            n.connect("t", "po");
            inner.push_back(id);
        }
        NetId root = sys.add_net("root");
        NetGraph& r = sys.net(root);
        const std::size_t places = 2 + next(7);
        const std::size_t transitions = 1 + next(6);
        for (std::size_t p = 0; p < places; ++p)
            r.add_place("p" + std::to_string(p));
        for (std::size_t t = 0; t < transitions; ++t)
            r.add_transition("t" + std::to_string(t));
        for (std::size_t k = 0; k < inner.size(); ++k)
            r.add_page("pg" + std::to_string(k), inner[k]);
        const std::size_t arcs = 1 + next(10);
        for (std::size_t a = 0; a < arcs; ++a) {
            const std::string p = "p" + std::to_string(next(places));
            const std::string t = "t" + std::to_string(next(transitions));
            if (next(2))
                r.connect(p, t);
            else
                r.connect(t, p);
        }
        sys.set_initial(PlaceId{root, 0}, 1);
        corpus.push_back(std::move(sys));
    }
    return corpus;
}

std::string format_profile(const SizeProfile& profile)
{
    auto snap = [](double v) { return std::abs(v) < 1e-9 ? 0.0 : v; };
    std::ostringstream out;
    out << "lines = " << snap(profile.constant) << " + " << snap(profile.per_place) << "*P + "
        << snap(profile.per_transition) << "*T + " << snap(profile.per_arc) << "*A + "
        << snap(profile.per_page) << "*Pg (max residual " << snap(profile.max_residual) << ")\n";
    out << "reference profile: 6/place 6/transition 1/arc 48/page (not enforced, template-dependent)\n";
    return out.str();
}

} // namespace hpn::gen
