#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hpn/flatten.hpp"

namespace hpn {

struct ExplorationBudget {
    std::uint64_t max_markings = 1000000;
    double max_seconds = 10.0;
};

enum class SafetyVerdict : std::uint8_t { safe, unsafe, unknown };

struct SafetyResult {
    SafetyVerdict verdict = SafetyVerdict::unknown;
    std::vector<std::uint32_t> witness; // firing sequence reaching a 2-token place
    std::string witness_place;          // provenance path of the overfull place
    std::uint64_t explored = 0;
    bool truncated = false;

    bool safe() const { return verdict == SafetyVerdict::safe; }
};

/// Bounded breadth-first search for a reachable marking that puts two tokens
/// in one place. Conditions are treated nondeterministically and operation
/// progress is abstracted away, so the verdict over-approximates every
/// runtime schedule. Budget exhaustion yields an explicit unknown verdict.
SafetyResult is_safe(const GroundNet& net, const Marking& initial,
                     const ExplorationBudget& budget = {});

} // namespace hpn
