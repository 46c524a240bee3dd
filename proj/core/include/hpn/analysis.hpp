#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hpn/flatten.hpp"
#include "hpn/safety.hpp"

namespace hpn {

/// Breadth-first reachability graph over token markings. Conditions are
/// explored nondeterministically; construction order is deterministic.
struct ReachabilityGraph {
    struct Edge {
        std::uint32_t from;
        std::uint32_t transition;
        std::uint32_t to;
    };
    std::vector<std::vector<std::uint32_t>> nodes; // token vectors
    std::vector<Edge> edges;
    std::uint32_t root = 0;
    bool truncated = false;

    std::vector<std::uint32_t> successors(std::uint32_t node) const;
};

ReachabilityGraph explore(const GroundNet& net, const Marking& initial,
                          const ExplorationBudget& budget = {});

/// Markings with no successor that are not designated terminal. A marking is
/// terminal when it holds a token in any of the given places. Calling this
/// on a truncated graph throws: dead ends may be exploration artifacts.
std::vector<std::uint32_t> find_deadlocks(const ReachabilityGraph& graph,
                                          const std::vector<std::uint32_t>& terminal_places);

struct PageViolation {
    std::string page_path;  // "<net>.<page>" of the offending page
    std::string inner_net;
    std::uint32_t input_places;
    std::uint32_t output_places;
};

/// Checks every net used as a page for the one-input/one-output rule.
std::vector<PageViolation> check_pages(const System& sys);

struct AnalysisReport {
    std::vector<PageViolation> page_violations;
    SafetyResult safety;
    std::uint64_t reachable_markings = 0;
    std::vector<std::uint32_t> deadlocks;
    bool deadlocks_known = false;

    bool clean() const
    {
        return page_violations.empty() && safety.safe() && (!deadlocks_known || deadlocks.empty());
    }
};

/// Full static pass: page rule, safeness, reachability and deadlocks.
AnalysisReport analyze(const System& sys, const GroundNet& ground,
                       const ExplorationBudget& budget = {});

/// Human-readable report: violation class, hierarchical path, witness
/// firing sequence.
std::string format_report(const AnalysisReport& report, const GroundNet& ground);

} // namespace hpn
