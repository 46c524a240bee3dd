#include "hpn/safety.hpp"

#include <chrono>
#include <deque>
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

SafetyResult is_safe(const GroundNet& net, const Marking& initial, const ExplorationBudget& budget)
{
    using Clock = std::chrono::steady_clock;
    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             std::chrono::duration<double>(budget.max_seconds));

    SafetyResult result;

    struct Node {
        std::vector<std::uint32_t> tokens;
        std::uint64_t parent;
        std::uint32_t via;
    };
    std::vector<Node> nodes;
    std::unordered_map<std::vector<std::uint32_t>, std::uint64_t, TokenVectorHash> seen;

    auto overfull = [&](const std::vector<std::uint32_t>& tokens) -> std::uint32_t {
        for (std::uint32_t p = 0; p < tokens.size(); ++p)
            if (tokens[p] > 1)
                return p;
        return npos32;
    };

    auto emit_witness = [&](std::uint64_t node, std::uint32_t place) {
        result.verdict = SafetyVerdict::unsafe;
        result.witness_place = net.places[place].path;
        std::vector<std::uint32_t> seq;
        for (std::uint64_t i = node; nodes[i].via != npos32; i = nodes[i].parent)
            seq.push_back(nodes[i].via);
        result.witness.assign(seq.rbegin(), seq.rend());
    };

    nodes.push_back(Node{initial.tokens, 0, npos32});
    seen.emplace(initial.tokens, 0);
    result.explored = 1;

    if (std::uint32_t p = overfull(initial.tokens); p != npos32) {
        emit_witness(0, p);
        return result;
    }

    Marking scratch;
    scratch.status.assign(net.places.size(), OpStatus::done);

    std::deque<std::uint64_t> frontier{0};
    while (!frontier.empty()) {
        if (result.explored >= budget.max_markings || Clock::now() > deadline) {
            result.truncated = true;
            result.verdict = SafetyVerdict::unknown;
            return result;
        }
        std::uint64_t cur = frontier.front();
        frontier.pop_front();

        scratch.tokens = nodes[cur].tokens;
        Marking base = scratch;
        for (std::uint32_t t = 0; t < net.transitions.size(); ++t) {
            if (!token_enabled(net, base, t))
                continue;
            scratch.tokens = base.tokens;
            fire_inplace(net, scratch, t);
            if (seen.count(scratch.tokens))
                continue;
            std::uint64_t idx = nodes.size();
            nodes.push_back(Node{scratch.tokens, cur, t});
            seen.emplace(scratch.tokens, idx);
            ++result.explored;
            if (std::uint32_t p = overfull(scratch.tokens); p != npos32) {
                emit_witness(idx, p);
                return result;
            }
            frontier.push_back(idx);
        }
    }

    result.verdict = SafetyVerdict::safe;
    return result;
}

} // namespace hpn
