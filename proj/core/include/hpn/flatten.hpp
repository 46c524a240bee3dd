#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hpn/net.hpp"

namespace hpn {

enum class OpStatus : std::uint8_t { idle, running, done };

/// Token assignment plus per-place operation progress. For safe nets each
/// count is at most one, so operation status is tracked per place.
struct Marking {
    std::vector<std::uint32_t> tokens;
    std::vector<OpStatus> status;

    friend bool operator==(const Marking& a, const Marking& b)
    {
        return a.tokens == b.tokens && a.status == b.status;
    }
};

struct GroundPlace {
    std::string path; // hierarchical provenance, e.g. "sys.a1.c.init.p_in"
    std::string op;
    std::uint32_t fusion = npos32; // group index in the source system
};

struct GroundTransition {
    std::string path;
    std::string cond;
    std::vector<std::uint32_t> inputs;
    std::vector<std::uint32_t> outputs;
};

/// The flat net obtained by recursively expanding pages and collapsing
/// fusion groups. Element paths record where each ground element came from.
struct GroundNet {
    std::vector<GroundPlace> places;
    std::vector<GroundTransition> transitions;
    std::vector<std::uint32_t> initial_tokens;
    std::uint32_t final_place = npos32; // root output place, if the root has one
    std::unordered_map<std::string, std::uint32_t> place_by_path;
    std::unordered_map<std::string, std::uint32_t> transition_by_path;

    std::uint32_t place(const std::string& path) const;
    std::uint32_t transition(const std::string& path) const;
    Marking initial_marking() const;
};

/// Expands the hierarchy rooted at sys.root() into a ground net. Page
/// endpoints are spliced: arcs targeting a page rewire to the inner input
/// place, arcs sourced from a page rewire from the inner output place.
GroundNet flatten(const System& sys);

/// Evaluates a transition's condition binding; empty bindings are true.
using ConditionEval = std::function<bool(const GroundTransition&)>;

/// Transitions whose input places all hold a completed token and whose
/// condition evaluates true. Passing no evaluator treats every condition
/// as true.
std::vector<std::uint32_t> enabled(const GroundNet& net, const Marking& m,
                                   const ConditionEval& eval = nullptr);

/// Structural enabledness: tokens only, operation progress and conditions
/// ignored. This is the nondeterministic over-approximation used by the
/// analysis passes.
std::vector<std::uint32_t> token_enabled(const GroundNet& net, const Marking& m);
bool token_enabled(const GroundNet& net, const Marking& m, std::uint32_t t);

/// Fires t: removes one token per input place, inserts one per output
/// place. New tokens are immediately done for places without operations and
/// idle otherwise. Throws if t lacks an input token.
Marking fire(const GroundNet& net, const Marking& m, std::uint32_t t);

/// In-place variant used by the hot paths.
void fire_inplace(const GroundNet& net, Marking& m, std::uint32_t t);

} // namespace hpn
