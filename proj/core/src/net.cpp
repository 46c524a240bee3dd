#include "hpn/net.hpp"

namespace hpn {

void NetGraph::register_name(const std::string& node_name, NodeRef ref)
{
    if (node_name.empty())
        throw net_error("net '" + name + "': element name must be non-empty");
    auto [it, inserted] = by_name_.emplace(node_name, ref);
    if (!inserted)
        throw net_error("net '" + name + "': duplicate element name '" + node_name + "'");
}

std::uint32_t NetGraph::add_place(const std::string& place_name, const std::string& op,
                                  bool is_input, bool is_output)
{
    auto index = static_cast<std::uint32_t>(places.size());
    register_name(place_name, NodeRef{NodeRef::Kind::place, index});
    places.push_back(Place{place_name, op, is_input, is_output});
    return index;
}

std::uint32_t NetGraph::add_transition(const std::string& transition_name, const std::string& cond)
{
    auto index = static_cast<std::uint32_t>(transitions.size());
    register_name(transition_name, NodeRef{NodeRef::Kind::transition, index});
    transitions.push_back(Transition{transition_name, cond});
    return index;
}

std::uint32_t NetGraph::add_page(const std::string& page_name, NetId inner)
{
    auto index = static_cast<std::uint32_t>(pages.size());
    register_name(page_name, NodeRef{NodeRef::Kind::page, index});
    pages.push_back(Page{page_name, inner});
    return index;
}

NodeRef NetGraph::node(const std::string& node_name) const
{
    auto it = by_name_.find(node_name);
    if (it == by_name_.end())
        throw net_error("net '" + name + "': unknown element '" + node_name + "'");
    return it->second;
}

void NetGraph::connect(const std::string& from, const std::string& to)
{
    connect(node(from), node(to));
}

void NetGraph::connect(NodeRef from, NodeRef to)
{
    const bool from_is_transition = from.kind == NodeRef::Kind::transition;
    const bool to_is_transition = to.kind == NodeRef::Kind::transition;
    if (from_is_transition == to_is_transition)
        throw net_error("net '" + name + "': arcs must alternate between places/pages and transitions");
    arcs.push_back(Arc{from, to});
}

std::uint32_t NetGraph::input_place() const
{
    std::uint32_t found = npos32;
    for (std::uint32_t i = 0; i < places.size(); ++i) {
        if (!places[i].is_input)
            continue;
        if (found != npos32)
            return npos32;
        found = i;
    }
    return found;
}

std::uint32_t NetGraph::output_place() const
{
    std::uint32_t found = npos32;
    for (std::uint32_t i = 0; i < places.size(); ++i) {
        if (!places[i].is_output)
            continue;
        if (found != npos32)
            return npos32;
        found = i;
    }
    return found;
}

NetId System::add_net(const std::string& net_name)
{
    if (net_name.empty())
        throw net_error("net name must be non-empty");
    if (net_by_name_.count(net_name))
        throw net_error("duplicate net name '" + net_name + "'");
    NetId id{static_cast<std::uint32_t>(nets_.size())};
    nets_.emplace_back();
    nets_.back().name = net_name;
    nets_.back().id_ = id;
    net_by_name_.emplace(net_name, id.value);
    return id;
}

NetGraph& System::net(NetId id)
{
    if (!id.valid() || id.value >= nets_.size())
        throw net_error("invalid net id");
    return nets_[id.value];
}

const NetGraph& System::net(NetId id) const
{
    if (!id.valid() || id.value >= nets_.size())
        throw net_error("invalid net id");
    return nets_[id.value];
}

NetId System::net_by_name(const std::string& net_name) const
{
    auto it = net_by_name_.find(net_name);
    return it == net_by_name_.end() ? NetId{} : NetId{it->second};
}

std::uint32_t System::fuse(const std::string& group_name, const std::vector<PlaceId>& members)
{
    if (members.empty())
        throw net_error("fusion group '" + group_name + "' has no members");
    for (PlaceId m : members) {
        const NetGraph& owner = net(m.net);
        if (m.index >= owner.places.size())
            throw net_error("fusion group '" + group_name + "': member place does not exist");
    }
    // A place may appear once in one group only; listing it twice in the
    // same group is the identity case and is collapsed.
    std::vector<PlaceId> unique;
    for (PlaceId m : members) {
        bool seen = false;
        for (PlaceId u : unique)
            seen = seen || u == m;
        if (!seen)
            unique.push_back(m);
    }
    auto group = static_cast<std::uint32_t>(fusions_.size());
    for (PlaceId m : unique) {
        if (fusion_index_.count(m))
            throw net_error("fusion group '" + group_name + "': place '" +
                            net(m.net).places[m.index].name + "' already belongs to a group");
        fusion_index_.emplace(m, group);
    }
    fusions_.push_back(FusionGroup{group_name, unique});
    return group;
}

std::uint32_t System::fusion_of(PlaceId place) const
{
    auto it = fusion_index_.find(place);
    return it == fusion_index_.end() ? npos32 : it->second;
}

void System::set_initial(PlaceId place, std::uint32_t count)
{
    const NetGraph& owner = net(place.net);
    if (place.index >= owner.places.size())
        throw net_error("initial marking: place does not exist");
    if (count == 0)
        initial_.erase(place);
    else
        initial_[place] = count;
}

PlaceId System::place(const std::string& net_name, const std::string& place_name) const
{
    NetId id = net_by_name(net_name);
    if (!id.valid())
        throw net_error("unknown net '" + net_name + "'");
    NodeRef ref = net(id).node(place_name);
    if (ref.kind != NodeRef::Kind::place)
        throw net_error("'" + net_name + "." + place_name + "' is not a place");
    return PlaceId{id, ref.index};
}

NetId System::root() const
{
    std::vector<bool> used(nets_.size(), false);
    for (const NetGraph& n : nets_)
        for (const Page& p : n.pages) {
            if (!p.inner.valid() || p.inner.value >= nets_.size())
                throw net_error("net '" + n.name + "': page '" + p.name + "' references an unknown net");
            used[p.inner.value] = true;
        }
    NetId found;
    for (std::uint32_t i = 0; i < nets_.size(); ++i) {
        if (used[i])
            continue;
        if (found.valid())
            throw net_error("hierarchy has several root candidates: '" + nets_[found.value].name +
                            "' and '" + nets_[i].name + "'");
        found = NetId{i};
    }
    if (!found.valid())
        throw net_error(nets_.empty() ? "empty system has no root net"
                                      : "hierarchy has a page cycle, no root net");
    return found;
}

} // namespace hpn
