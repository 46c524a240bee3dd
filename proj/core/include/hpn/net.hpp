#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpn/ids.hpp"

namespace hpn {

struct net_error : std::runtime_error {
    explicit net_error(const std::string& what) : std::runtime_error(what) {}
};

/// A place may carry an operation binding (registry key) that the executor
/// resolves at load time. A token in a place with an operation only enables
/// downstream transitions once the operation has completed.
struct Place {
    std::string name;
    std::string op;        // registry key, empty = no operation
    bool is_input = false;
    bool is_output = false;
};

/// A transition may carry a condition binding (registry key). An empty
/// binding means the condition is constant true.
struct Transition {
    std::string name;
    std::string cond;
};

/// A page substitutes a place in its parent net by a whole sub-net with a
/// single input place and a single output place.
struct Page {
    std::string name;
    NetId inner;
};

struct NodeRef {
    enum class Kind : std::uint8_t { place, transition, page };
    Kind kind = Kind::place;
    std::uint32_t index = npos32;

    friend bool operator==(const NodeRef& a, const NodeRef& b)
    {
        return a.kind == b.kind && a.index == b.index;
    }
};

// Arcs alternate between the place side (places, pages) and transitions.
struct Arc {
    NodeRef from;
    NodeRef to;
};

/// One net of the hierarchy: a bipartite graph of places/pages and
/// transitions. Names share a single namespace per net so arc declarations
/// can reference any element unambiguously.
class NetGraph {
public:
    std::string name;
    std::vector<Place> places;
    std::vector<Transition> transitions;
    std::vector<Page> pages;
    std::vector<Arc> arcs;

    NetId id() const { return id_; }

    std::uint32_t add_place(const std::string& place_name, const std::string& op = "",
                            bool is_input = false, bool is_output = false);
    std::uint32_t add_transition(const std::string& transition_name, const std::string& cond = "");
    std::uint32_t add_page(const std::string& page_name, NetId inner);

    /// Adds a directed arc between two named elements. Pages count as
    /// places for the bipartite rule.
    void connect(const std::string& from, const std::string& to);
    void connect(NodeRef from, NodeRef to);

    bool has_node(const std::string& node_name) const { return by_name_.count(node_name) != 0; }
    NodeRef node(const std::string& node_name) const;

    /// Index of the unique input (output) place, or npos32 when the net has
    /// none or several.
    std::uint32_t input_place() const;
    std::uint32_t output_place() const;

private:
    friend class System;
    NetId id_;
    std::map<std::string, NodeRef> by_name_;

    void register_name(const std::string& node_name, NodeRef ref);
};

/// Global place fusion: all listed places (and all their instances) collapse
/// into a single ground place sharing the same tokens.
struct FusionGroup {
    std::string name;
    std::vector<PlaceId> members;
};

/// A whole HPN: the collection of nets, which net is the root, the fusion
/// groups and the initial marking. Nets reference each other only through
/// pages.
class System {
public:
    NetId add_net(const std::string& net_name);
    NetGraph& net(NetId id);
    const NetGraph& net(NetId id) const;
    NetId net_by_name(const std::string& net_name) const; // invalid id if missing
    std::size_t net_count() const { return nets_.size(); }

    const std::vector<FusionGroup>& fusions() const { return fusions_; }
    /// Registers one fusion group. Places may not belong to two groups.
    std::uint32_t fuse(const std::string& group_name, const std::vector<PlaceId>& members);
    /// Group index of a place, or npos32.
    std::uint32_t fusion_of(PlaceId place) const;

    void set_initial(PlaceId place, std::uint32_t count);
    const std::map<PlaceId, std::uint32_t>& initial_marking() const { return initial_; }

    /// The unique net that no page uses as its inner net. Throws when the
    /// hierarchy has no root or several candidates.
    NetId root() const;

    PlaceId place_id(NetId id, std::uint32_t index) const { return PlaceId{id, index}; }
    /// Name-based place lookup, e.g. for generated construction code.
    PlaceId place(const std::string& net_name, const std::string& place_name) const;

private:
    std::vector<NetGraph> nets_;
    std::map<std::string, std::uint32_t> net_by_name_;
    std::vector<FusionGroup> fusions_;
    std::map<PlaceId, std::uint32_t> fusion_index_;
    std::map<PlaceId, std::uint32_t> initial_;
};

} // namespace hpn
