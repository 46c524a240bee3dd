#include "hpn/builder.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "hpn/registry.hpp"

namespace hpn {

const BehaviourSpec* SubsystemSpec::find_behaviour(const std::string& leaf) const
{
    for (const BehaviourSpec& b : behaviours)
        if (b.name == leaf)
            return &b;
    return nullptr;
}

const SubsystemSpec* AgentSpec::find_subsystem(const std::string& leaf) const
{
    for (const SubsystemSpec& s : subsystems)
        if (s.name == leaf)
            return &s;
    return nullptr;
}

std::string world_push_key(const std::string& endpoint_leaf)
{
    return "world.push." + endpoint_leaf;
}

std::string world_sample_key(const std::string& endpoint_leaf)
{
    return "world.sample." + endpoint_leaf;
}

namespace {

bool is_world_endpoint(const std::string& path)
{
    return path.rfind("world.", 0) == 0;
}

bool leaf_ok(const std::string& s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

struct BehaviourRef {
    const AgentSpec* agent;
    const SubsystemSpec* subsystem;
    const BehaviourSpec* behaviour;
};

const BehaviourSpec* find_behaviour_path(const SystemSpec& spec, const std::string& path)
{
    for (const AgentSpec& a : spec.agents)
        for (const SubsystemSpec& s : a.subsystems)
            for (const BehaviourSpec& b : s.behaviours)
                if (a.name + "." + s.name + "." + b.name == path)
                    return &b;
    return nullptr;
}

} // namespace

std::vector<std::string> validate(const SystemSpec& spec)
{
    std::vector<std::string> warnings;
    if (spec.agents.empty())
        throw net_error("system spec has no agents");
    if (!leaf_ok(spec.name))
        throw net_error("invalid system name '" + spec.name + "'");

    std::set<std::string> agent_names;
    for (const AgentSpec& agent : spec.agents) {
        if (!leaf_ok(agent.name))
            throw net_error("invalid agent name '" + agent.name + "'");
        if (!agent_names.insert(agent.name).second)
            throw net_error("duplicate agent name '" + agent.name + "'");
        if (agent.subsystems.empty())
            throw net_error("agent '" + agent.name + "' has no subsystems");

        std::size_t control_count = 0;
        std::set<std::string> subsystem_names;
        for (const SubsystemSpec& sub : agent.subsystems) {
            if (!leaf_ok(sub.name))
                throw net_error("invalid subsystem name '" + sub.name + "'");
            if (!subsystem_names.insert(sub.name).second)
                throw net_error("agent '" + agent.name + "': duplicate subsystem '" + sub.name + "'");
            if (sub.kind != 'c' && sub.kind != 'e' && sub.kind != 'r')
                throw net_error("subsystem '" + agent.name + "." + sub.name +
                                "': kind must be c, e or r");
            control_count += sub.kind == 'c' ? 1 : 0;

            if (sub.behaviours.empty())
                throw net_error("subsystem '" + agent.name + "." + sub.name + "' has no behaviours");
            std::set<std::string> behaviour_names;
            for (const BehaviourSpec& b : sub.behaviours) {
                if (!leaf_ok(b.name))
                    throw net_error("invalid behaviour name '" + b.name + "'");
                if (!behaviour_names.insert(b.name).second)
                    throw net_error("subsystem '" + agent.name + "." + sub.name +
                                    "': duplicate behaviour '" + b.name + "'");
                if (b.transition_function.empty())
                    throw net_error("behaviour '" + agent.name + "." + sub.name + "." + b.name +
                                    "' has no transition function");
                for (const std::string* key : {&b.transition_function, &b.error_condition,
                                               &b.terminal_condition})
                    if (key->find("__") != std::string::npos)
                        throw net_error("binding key '" + *key + "' uses the reserved '__' separator");
            }
            if (!sub.find_behaviour(sub.initial_behaviour))
                throw net_error("subsystem '" + agent.name + "." + sub.name +
                                "': initial behaviour '" + sub.initial_behaviour + "' not found");
            if (!sub.find_behaviour(sub.terminal_behaviour))
                throw net_error("subsystem '" + agent.name + "." + sub.name +
                                "': terminal behaviour '" + sub.terminal_behaviour + "' not found");
            for (const BehaviourTransition& t : sub.transitions) {
                if (!sub.find_behaviour(t.from) || !sub.find_behaviour(t.to))
                    throw net_error("subsystem '" + agent.name + "." + sub.name +
                                    "': transition references unknown behaviour '" + t.from + "' or '" +
                                    t.to + "'");
            }

            // reachability from the initial behaviour
            std::set<std::string> reached{sub.initial_behaviour};
            bool grew = true;
            while (grew) {
                grew = false;
                for (const BehaviourTransition& t : sub.transitions)
                    if (reached.count(t.from) && reached.insert(t.to).second)
                        grew = true;
            }
            for (const BehaviourSpec& b : sub.behaviours)
                if (!reached.count(b.name))
                    warnings.push_back("behaviour '" + agent.name + "." + sub.name + "." + b.name +
                                       "' is unreachable from the initial behaviour");
        }
        if (control_count != 1)
            throw net_error("agent '" + agent.name + "' must have exactly one control subsystem");
    }

    std::set<std::pair<std::string, std::string>> seen_channels;
    std::map<std::string, Composition> send_mode;
    for (const CommSpec& comm : spec.comms) {
        if (comm.producer == comm.consumer)
            throw net_error("channel endpoints must differ: '" + comm.producer + "'");
        if (!seen_channels.emplace(comm.producer, comm.consumer).second)
            throw net_error("duplicate channel '" + comm.producer + "' -> '" + comm.consumer + "'");
        const bool world_producer = is_world_endpoint(comm.producer);
        const bool world_consumer = is_world_endpoint(comm.consumer);
        if (world_producer && world_consumer)
            throw net_error("channel cannot connect two world endpoints");
        if ((world_producer || world_consumer) && !comm.model.fully_async())
            throw net_error("world channels support only the fully asynchronous model");
        if (!world_producer && !find_behaviour_path(spec, comm.producer))
            throw net_error("channel producer '" + comm.producer + "' does not name a behaviour");
        if (!world_consumer && !find_behaviour_path(spec, comm.consumer))
            throw net_error("channel consumer '" + comm.consumer + "' does not name a behaviour");
        if (!world_producer) {
            auto [it, inserted] = send_mode.emplace(comm.producer, comm.composition);
            if (!inserted && it->second != comm.composition)
                throw net_error("behaviour '" + comm.producer +
                                "' declares both sequential and parallel send composition");
        }
    }
    return warnings;
}

NetId build_behaviour_page(System& sys, const std::string& behaviour_path,
                           const BehaviourSpec& behaviour, NetId snd_page, NetId rcv_page)
{
    if (behaviour.transition_function.empty())
        throw net_error("behaviour '" + behaviour_path + "' has no transition function");
    NetId id = sys.add_net(behaviour_path);
    NetGraph& n = sys.net(id);

    const std::string subsystem = subsystem_of(behaviour_path);
    n.add_place("p_in", behaviour.transition_function, true, false);
    n.add_place("p_2", tick_key(subsystem));
    n.add_place("p_out", "", false, true);
    n.add_page("snd", snd_page);
    n.add_page("rcv", rcv_page);

    const std::string err = behaviour.error_condition.empty() ? "core.false" : behaviour.error_condition;
    const std::string term =
        behaviour.terminal_condition.empty() ? "core.false" : behaviour.terminal_condition;
    const std::string leave = cond_any(err, term);

    n.add_transition("t_1");
    n.add_transition("t_2");
    n.add_transition("t_3");
    n.add_transition("t_loop", cond_not(leave));
    n.add_transition("t_exit", leave);

    n.connect("p_in", "t_1");
    n.connect("t_1", "snd");
    n.connect("snd", "t_2");
    n.connect("t_2", "p_2");
    n.connect("p_2", "t_3");
    n.connect("t_3", "rcv");
    n.connect("rcv", "t_loop");
    n.connect("t_loop", "p_in");
    n.connect("rcv", "t_exit");
    n.connect("t_exit", "p_out");
    return id;
}

NetId build_subsystem_layer(System& sys, const std::string& agent_name, const SubsystemSpec& subsystem,
                            const std::map<std::string, NetId>& behaviour_nets)
{
    if (!subsystem.find_behaviour(subsystem.initial_behaviour) ||
        !subsystem.find_behaviour(subsystem.terminal_behaviour))
        throw net_error("subsystem '" + agent_name + "." + subsystem.name +
                        "' lacks its initial or terminal behaviour");

    NetId id = sys.add_net(agent_name + "." + subsystem.name);
    NetGraph& n = sys.net(id);
    n.add_place("p_in", "", true, false);
    n.add_place("p_out", "", false, true);
    n.add_transition("t_in");
    n.add_transition("t_out");
    for (const BehaviourSpec& b : subsystem.behaviours)
        n.add_page(b.name, behaviour_nets.at(b.name));

    n.connect("p_in", "t_in");
    n.connect("t_in", subsystem.initial_behaviour);
    for (std::size_t i = 0; i < subsystem.transitions.size(); ++i) {
        const BehaviourTransition& t = subsystem.transitions[i];
        const std::string name = "t_s" + std::to_string(i);
        n.add_transition(name, t.initial_condition);
        n.connect(t.from, name);
        n.connect(name, t.to);
    }
    n.connect(subsystem.terminal_behaviour, "t_out");
    n.connect("t_out", "p_out");
    return id;
}

NetId build_agent_layer(System& sys, const AgentSpec& agent, const std::vector<NetId>& subsystem_nets)
{
    if (agent.subsystems.empty())
        throw net_error("agent '" + agent.name + "' has no subsystems");
    NetId id = sys.add_net(agent.name);
    NetGraph& n = sys.net(id);
    n.add_place("p_in", "", true, false);
    n.add_place("p_out", "", false, true);
    n.add_transition("t_in");
    n.add_transition("t_out");
    n.connect("p_in", "t_in");
    for (std::size_t i = 0; i < agent.subsystems.size(); ++i) {
        n.add_page(agent.subsystems[i].name, subsystem_nets[i]);
        n.connect("t_in", agent.subsystems[i].name);
        n.connect(agent.subsystems[i].name, "t_out");
    }
    n.connect("t_out", "p_out");
    return id;
}

NetId build_system_layer(System& sys, const SystemSpec& spec, const std::vector<NetId>& agent_nets)
{
    if (spec.agents.empty())
        throw net_error("system spec has no agents");
    NetId id = sys.add_net(spec.name);
    NetGraph& n = sys.net(id);
    // The implicit initial and final places give the top-level net a start
    // token and a termination observation point.
    n.add_place("p_init", "", true, false);
    n.add_place("p_final", "", false, true);
    n.add_transition("t_in");
    n.add_transition("t_out");
    n.connect("p_init", "t_in");
    for (std::size_t i = 0; i < spec.agents.size(); ++i) {
        n.add_page(spec.agents[i].name, agent_nets[i]);
        n.connect("t_in", spec.agents[i].name);
        n.connect(spec.agents[i].name, "t_out");
    }
    n.connect("t_out", "p_final");
    sys.set_initial(PlaceId{id, n.node("p_init").index}, 1);
    return id;
}

Assembly assemble(const SystemSpec& spec)
{
    Assembly out;
    out.warnings = validate(spec);
    System& sys = out.sys;

    // Channels first: their halves become the pages of the behaviours'
    // transfer nets. Declaration order fixes page order deterministically.
    std::map<std::string, std::vector<NetId>> snd_halves; // producer behaviour -> pages
    std::map<std::string, std::vector<NetId>> rcv_halves; // consumer behaviour -> pages
    std::map<std::string, Composition> send_mode;

    for (const CommSpec& comm : spec.comms) {
        const bool world_producer = is_world_endpoint(comm.producer);
        const bool world_consumer = is_world_endpoint(comm.consumer);
        if (world_consumer) {
            const std::string leaf = comm.consumer.substr(6);
            NetId half = build_world_snd_half(sys, comm.producer, comm.consumer, world_push_key(leaf));
            snd_halves[comm.producer].push_back(half);
            send_mode.emplace(comm.producer, comm.composition);
        } else if (world_producer) {
            const std::string leaf = comm.producer.substr(6);
            NetId half = build_world_rcv_half(sys, comm.consumer, comm.producer, world_sample_key(leaf));
            rcv_halves[comm.consumer].push_back(half);
        } else {
            const std::string id = chan_id(comm.producer, comm.consumer);
            ChannelPages pages = build_channel_pair(sys, comm.model, comm.producer, comm.consumer,
                                                    chan_write_key(id), chan_read_key(id));
            snd_halves[comm.producer].push_back(pages.snd);
            rcv_halves[comm.consumer].push_back(pages.rcv);
            send_mode.emplace(comm.producer, comm.composition);
        }
    }

    std::vector<NetId> agent_nets;
    for (const AgentSpec& agent : spec.agents) {
        std::vector<NetId> subsystem_nets;
        for (const SubsystemSpec& sub : agent.subsystems) {
            std::map<std::string, NetId> behaviour_nets;
            for (const BehaviourSpec& b : sub.behaviours) {
                const std::string path = agent.name + "." + sub.name + "." + b.name;

                NetId snd;
                auto snd_it = snd_halves.find(path);
                if (snd_it == snd_halves.end()) {
                    snd = build_passthrough(sys, path + ".snd");
                } else {
                    Composition mode = send_mode.count(path) ? send_mode.at(path) : b.send_composition;
                    snd = compose_peers(sys, snd_it->second, mode, path + ".snd");
                }
                NetId rcv;
                auto rcv_it = rcv_halves.find(path);
                if (rcv_it == rcv_halves.end())
                    rcv = build_passthrough(sys, path + ".rcv");
                else
                    rcv = compose_peers(sys, rcv_it->second, b.recv_composition, path + ".rcv");

                behaviour_nets[b.name] = build_behaviour_page(sys, path, b, snd, rcv);
            }
            subsystem_nets.push_back(build_subsystem_layer(sys, agent.name, sub, behaviour_nets));
        }
        agent_nets.push_back(build_agent_layer(sys, agent, subsystem_nets));
    }

    out.root = build_system_layer(sys, spec, agent_nets);
    return out;
}

} // namespace hpn
