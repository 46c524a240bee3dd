#include "hpn/analysis.hpp"

#include <chrono>
#include <deque>
#include <sstream>
#include <unordered_map>

namespace hpn {

namespace {

struct TokenVectorHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const
    {
        std::size_t h = 1469598103934665603ull;
        for (std::uint32_t x : v) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return h;
    }
};

} // namespace

std::vector<std::uint32_t> ReachabilityGraph::successors(std::uint32_t node) const
{
    std::vector<std::uint32_t> out;
    for (const Edge& e : edges)
        if (e.from == node)
            out.push_back(e.to);
    return out;
}

ReachabilityGraph explore(const GroundNet& net, const Marking& initial,
                          const ExplorationBudget& budget)
{
    using Clock = std::chrono::steady_clock;
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(budget.max_seconds));

    ReachabilityGraph graph;
    std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, TokenVectorHash> index;

    graph.nodes.push_back(initial.tokens);
    index.emplace(initial.tokens, 0);

    Marking scratch;
    scratch.status.assign(net.places.size(), OpStatus::done);

    std::deque<std::uint32_t> frontier{0};
    while (!frontier.empty()) {
        if (graph.nodes.size() >= budget.max_markings || Clock::now() > deadline) {
            graph.truncated = true;
            return graph;
        }
        std::uint32_t cur = frontier.front();
        frontier.pop_front();

        const auto base = graph.nodes[cur];
        scratch.tokens = base;
        Marking base_marking = scratch;
        for (std::uint32_t t = 0; t < net.transitions.size(); ++t) {
            if (!token_enabled(net, base_marking, t))
                continue;
            scratch.tokens = base;
            fire_inplace(net, scratch, t);
            auto it = index.find(scratch.tokens);
            std::uint32_t to;
            if (it == index.end()) {
                to = static_cast<std::uint32_t>(graph.nodes.size());
                graph.nodes.push_back(scratch.tokens);
                index.emplace(scratch.tokens, to);
                frontier.push_back(to);
            } else {
                to = it->second;
            }
            graph.edges.push_back(ReachabilityGraph::Edge{cur, t, to});
        }
    }
    return graph;
}

std::vector<std::uint32_t> find_deadlocks(const ReachabilityGraph& graph,
                                          const std::vector<std::uint32_t>& terminal_places)
{
    if (graph.truncated)
        throw net_error("deadlock verdict unknown: reachability graph was truncated");
    std::vector<bool> has_out(graph.nodes.size(), false);
    for (const auto& e : graph.edges)
        has_out[e.from] = true;
    std::vector<std::uint32_t> result;
    for (std::uint32_t n = 0; n < graph.nodes.size(); ++n) {
        if (has_out[n])
            continue;
        bool terminal = false;
        for (std::uint32_t p : terminal_places)
            terminal = terminal || graph.nodes[n][p] > 0;
        if (!terminal)
            result.push_back(n);
    }
    return result;
}

std::vector<PageViolation> check_pages(const System& sys)
{
    std::vector<PageViolation> out;
    for (std::uint32_t n = 0; n < sys.net_count(); ++n) {
        const NetGraph& net = sys.net(NetId{n});
        for (const Page& page : net.pages) {
            const NetGraph& inner = sys.net(page.inner);
            std::uint32_t ins = 0, outs = 0;
            for (const Place& p : inner.places) {
                ins += p.is_input ? 1 : 0;
                outs += p.is_output ? 1 : 0;
            }
            if (ins != 1 || outs != 1)
                out.push_back(PageViolation{net.name + "." + page.name, inner.name, ins, outs});
        }
    }
    return out;
}

AnalysisReport analyze(const System& sys, const GroundNet& ground, const ExplorationBudget& budget)
{
    AnalysisReport report;
    report.page_violations = check_pages(sys);
    Marking initial = ground.initial_marking();
    report.safety = is_safe(ground, initial, budget);
    ReachabilityGraph graph = explore(ground, initial, budget);
    report.reachable_markings = graph.nodes.size();
    if (!graph.truncated) {
        std::vector<std::uint32_t> terminal;
        if (ground.final_place != npos32)
            terminal.push_back(ground.final_place);
        report.deadlocks.clear();
        for (std::uint32_t n : find_deadlocks(graph, terminal))
            report.deadlocks.push_back(n);
        report.deadlocks_known = true;
    }
    return report;
}

std::string format_report(const AnalysisReport& report, const GroundNet& ground)
{
    std::ostringstream out;
    out << "pages: " << (report.page_violations.empty() ? "ok" : "violations") << '\n';
    for (const PageViolation& v : report.page_violations)
        out << "  page_rule " << v.page_path << " inner=" << v.inner_net
            << " inputs=" << v.input_places << " outputs=" << v.output_places << '\n';

    switch (report.safety.verdict) {
    case SafetyVerdict::safe:
        out << "safeness: safe (explored " << report.safety.explored << " markings)\n";
        break;
    case SafetyVerdict::unknown:
        out << "safeness: unknown (budget exhausted after " << report.safety.explored
            << " markings)\n";
        break;
    case SafetyVerdict::unsafe:
        out << "safeness: unsafe place=" << report.safety.witness_place << " witness:";
        for (std::uint32_t t : report.safety.witness)
            out << ' ' << ground.transitions[t].path;
        out << '\n';
        break;
    }

    out << "reachable_markings: " << report.reachable_markings << '\n';
    if (!report.deadlocks_known)
        out << "deadlocks: unknown (truncated exploration)\n";
    else if (report.deadlocks.empty())
        out << "deadlocks: none\n";
    else
        out << "deadlocks: " << report.deadlocks.size() << " non-terminal sink marking(s)\n";
    return out.str();
}

} // namespace hpn
