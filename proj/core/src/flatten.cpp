#include "hpn/flatten.hpp"

#include <algorithm>

namespace hpn {

std::uint32_t GroundNet::place(const std::string& path) const
{
    auto it = place_by_path.find(path);
    if (it == place_by_path.end())
        throw net_error("ground net has no place '" + path + "'");
    return it->second;
}

std::uint32_t GroundNet::transition(const std::string& path) const
{
    auto it = transition_by_path.find(path);
    if (it == transition_by_path.end())
        throw net_error("ground net has no transition '" + path + "'");
    return it->second;
}

Marking GroundNet::initial_marking() const
{
    Marking m;
    m.tokens = initial_tokens;
    m.status.resize(places.size(), OpStatus::idle);
    for (std::uint32_t i = 0; i < places.size(); ++i)
        if (m.tokens[i] > 0)
            m.status[i] = places[i].op.empty() ? OpStatus::done : OpStatus::idle;
    return m;
}

namespace {

class Flattener {
public:
    explicit Flattener(const System& sys) : sys_(sys), group_place_(sys.fusions().size(), npos32)
    {
    }

    GroundNet run()
    {
        NetId root = sys_.root();
        on_stack_.assign(sys_.net_count(), false);
        Instance top = instantiate(root, sys_.net(root).name);

        const NetGraph& root_net = sys_.net(root);
        std::uint32_t out_local = root_net.output_place();
        if (out_local != npos32)
            out_.final_place = top.place_map[out_local];

        for (const auto& [id, count] : sys_.initial_marking()) {
            std::uint32_t group = sys_.fusion_of(id);
            if (group != npos32) {
                out_.initial_tokens[ground_fusion_place(group)] += count;
                continue;
            }
            for (std::uint32_t g : instances_of_[key(id)])
                out_.initial_tokens[g] += count;
        }
        return std::move(out_);
    }

private:
    struct Instance {
        std::vector<std::uint32_t> place_map; // local place index -> ground index
        std::uint32_t in = npos32;            // ground index of the net's input place
        std::uint32_t out = npos32;
    };

    static std::uint64_t key(PlaceId id)
    {
        return (static_cast<std::uint64_t>(id.net.value) << 32) | id.index;
    }

    std::uint32_t ground_fusion_place(std::uint32_t group)
    {
        if (group_place_[group] == npos32) {
            auto idx = static_cast<std::uint32_t>(out_.places.size());
            const FusionGroup& g = sys_.fusions()[group];
            // All members share one operation binding; mixed bindings would
            // make firing ambiguous.
            std::string op;
            for (PlaceId m : g.members) {
                const std::string& mop = sys_.net(m.net).places[m.index].op;
                if (op.empty())
                    op = mop;
                else if (!mop.empty() && mop != op)
                    throw net_error("fusion group '" + g.name + "' merges places with different operations");
            }
            out_.places.push_back(GroundPlace{"fusion." + g.name, op, group});
            out_.place_by_path.emplace(out_.places.back().path, idx);
            out_.initial_tokens.push_back(0);
            group_place_[group] = idx;
        }
        return group_place_[group];
    }

    Instance instantiate(NetId id, const std::string& path)
    {
        if (on_stack_[id.value])
            throw net_error("net '" + sys_.net(id).name + "' is a page of itself (page cycle)");
        on_stack_[id.value] = true;

        const NetGraph& n = sys_.net(id);
        Instance inst;

        inst.place_map.resize(n.places.size());
        for (std::uint32_t i = 0; i < n.places.size(); ++i) {
            std::uint32_t group = sys_.fusion_of(PlaceId{id, i});
            std::uint32_t g;
            if (group != npos32) {
                g = ground_fusion_place(group);
            } else {
                g = static_cast<std::uint32_t>(out_.places.size());
                out_.places.push_back(GroundPlace{path + "." + n.places[i].name, n.places[i].op, npos32});
                out_.place_by_path.emplace(out_.places.back().path, g);
                out_.initial_tokens.push_back(0);
            }
            inst.place_map[i] = g;
            instances_of_[key(PlaceId{id, i})].push_back(g);
            if (n.places[i].is_input)
                inst.in = inst.in == npos32 ? g : npos32;
            if (n.places[i].is_output)
                inst.out = inst.out == npos32 ? g : npos32;
        }

        std::vector<Instance> page_inst(n.pages.size());
        for (std::uint32_t i = 0; i < n.pages.size(); ++i) {
            page_inst[i] = instantiate(n.pages[i].inner, path + "." + n.pages[i].name);
            if (page_inst[i].in == npos32 || page_inst[i].out == npos32)
                throw net_error("page '" + path + "." + n.pages[i].name + "': inner net '" +
                                sys_.net(n.pages[i].inner).name +
                                "' must have exactly one input and one output place");
        }

        std::vector<std::uint32_t> transition_map(n.transitions.size());
        for (std::uint32_t i = 0; i < n.transitions.size(); ++i) {
            auto g = static_cast<std::uint32_t>(out_.transitions.size());
            out_.transitions.push_back(
                GroundTransition{path + "." + n.transitions[i].name, n.transitions[i].cond, {}, {}});
            out_.transition_by_path.emplace(out_.transitions.back().path, g);
            transition_map[i] = g;
        }

        for (const Arc& a : n.arcs) {
            if (a.to.kind == NodeRef::Kind::transition) {
                // place side -> transition: a page endpoint contributes its
                // inner output place.
                std::uint32_t src = a.from.kind == NodeRef::Kind::place
                                        ? inst.place_map[a.from.index]
                                        : page_inst[a.from.index].out;
                out_.transitions[transition_map[a.to.index]].inputs.push_back(src);
            } else {
                std::uint32_t dst = a.to.kind == NodeRef::Kind::place
                                        ? inst.place_map[a.to.index]
                                        : page_inst[a.to.index].in;
                out_.transitions[transition_map[a.from.index]].outputs.push_back(dst);
            }
        }

        on_stack_[id.value] = false;
        return inst;
    }

    const System& sys_;
    GroundNet out_;
    std::vector<std::uint32_t> group_place_;
    std::vector<bool> on_stack_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> instances_of_;
};

} // namespace

GroundNet flatten(const System& sys)
{
    return Flattener(sys).run();
}

namespace {

// Arc weights are expressed as repeated arcs; multiplicity matters when a
// transition draws twice from one place.
bool inputs_marked(const GroundTransition& tr, const Marking& m)
{
    for (std::size_t i = 0; i < tr.inputs.size(); ++i) {
        std::uint32_t p = tr.inputs[i];
        std::uint32_t needed = 0;
        for (std::uint32_t q : tr.inputs)
            needed += q == p ? 1 : 0;
        if (m.tokens[p] < needed)
            return false;
    }
    return true;
}

} // namespace

std::vector<std::uint32_t> enabled(const GroundNet& net, const Marking& m, const ConditionEval& eval)
{
    std::vector<std::uint32_t> result;
    for (std::uint32_t t = 0; t < net.transitions.size(); ++t) {
        const GroundTransition& tr = net.transitions[t];
        if (tr.inputs.empty())
            continue; // sourceless transitions never fire
        if (!inputs_marked(tr, m))
            continue;
        bool ready = true;
        for (std::uint32_t p : tr.inputs)
            ready = ready && m.status[p] == OpStatus::done;
        if (!ready)
            continue;
        if (!tr.cond.empty() && eval && !eval(tr))
            continue;
        result.push_back(t);
    }
    return result;
}

bool token_enabled(const GroundNet& net, const Marking& m, std::uint32_t t)
{
    const GroundTransition& tr = net.transitions[t];
    if (tr.inputs.empty())
        return false;
    return inputs_marked(tr, m);
}

std::vector<std::uint32_t> token_enabled(const GroundNet& net, const Marking& m)
{
    std::vector<std::uint32_t> result;
    for (std::uint32_t t = 0; t < net.transitions.size(); ++t)
        if (token_enabled(net, m, t))
            result.push_back(t);
    return result;
}

void fire_inplace(const GroundNet& net, Marking& m, std::uint32_t t)
{
    const GroundTransition& tr = net.transitions[t];
    for (std::uint32_t p : tr.inputs) {
        if (m.tokens[p] == 0)
            throw net_error("firing disabled transition '" + tr.path + "'");
        if (--m.tokens[p] == 0)
            m.status[p] = OpStatus::idle;
    }
    for (std::uint32_t p : tr.outputs) {
        ++m.tokens[p];
        m.status[p] = net.places[p].op.empty() ? OpStatus::done : OpStatus::idle;
    }
}

Marking fire(const GroundNet& net, const Marking& m, std::uint32_t t)
{
    Marking next = m;
    fire_inplace(net, next, t);
    return next;
}

} // namespace hpn
