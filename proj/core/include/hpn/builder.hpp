#pragma once

#include <map>
#include <string>
#include <vector>

#include "hpn/comm.hpp"
#include "hpn/net.hpp"

namespace hpn {

/// One behaviour of a subsystem: the transition function computed each
/// iteration, the error/terminal conditions that end the loop, and how the
/// behaviour's transfer pages compose when it talks to several peers.
struct BehaviourSpec {
    std::string name; // leaf name, no dots
    std::string transition_function;
    std::string error_condition;
    std::string terminal_condition;
    Composition send_composition = Composition::sequential;
    Composition recv_composition = Composition::sequential;
};

struct BehaviourTransition {
    std::string from;
    std::string to;
    std::string initial_condition; // registry key, empty = always
};

struct SubsystemSpec {
    std::string name; // leaf name, no dots
    char kind = 'c';  // c, e or r
    std::vector<BehaviourSpec> behaviours;
    std::string initial_behaviour;
    std::string terminal_behaviour;
    std::vector<BehaviourTransition> transitions;

    const BehaviourSpec* find_behaviour(const std::string& leaf) const;
};

struct AgentSpec {
    std::string name;
    std::vector<SubsystemSpec> subsystems;

    const SubsystemSpec* find_subsystem(const std::string& leaf) const;
};

/// One channel declaration. Endpoints are behaviour paths
/// "<agent>.<subsystem>.<behaviour>"; the "world." namespace marks the
/// half serviced by the simulated real effectors/receptors.
struct CommSpec {
    std::string producer;
    std::string consumer;
    CommModel model;
    Composition composition = Composition::sequential; // producer-side send composition
};

struct SystemSpec {
    std::string name = "sys";
    std::vector<AgentSpec> agents;
    std::vector<CommSpec> comms;
};

/// Hard errors throw net_error; soft findings (e.g. unreachable behaviours)
/// come back as warnings.
std::vector<std::string> validate(const SystemSpec& spec);

/// Root net: one page per agent between t_in and t_out, plus the implicit
/// initial place (one token) and final place.
NetId build_system_layer(System& sys, const SystemSpec& spec, const std::vector<NetId>& agent_nets);

/// Agent net: p_in -> t_in -> every subsystem page -> t_out -> p_out.
NetId build_agent_layer(System& sys, const AgentSpec& agent, const std::vector<NetId>& subsystem_nets);

/// Subsystem net: behaviour pages linked by the declared initial-condition
/// transitions, entered at the initial behaviour and left at the terminal one.
NetId build_subsystem_layer(System& sys, const std::string& agent_name, const SubsystemSpec& subsystem,
                            const std::map<std::string, NetId>& behaviour_nets);

/// Behaviour net, fixed pattern: compute f, send, increment the discrete
/// time, receive, then loop unless the error or terminal condition holds.
NetId build_behaviour_page(System& sys, const std::string& behaviour_path,
                           const BehaviourSpec& behaviour, NetId snd_page, NetId rcv_page);

struct Assembly {
    System sys;
    NetId root;
    std::vector<std::string> warnings;
};

/// Builds the full five-layer hierarchy with all channel pages and fusion
/// groups registered.
Assembly assemble(const SystemSpec& spec);

/// Key conventions for the world-serviced channel halves.
std::string world_push_key(const std::string& endpoint_leaf);
std::string world_sample_key(const std::string& endpoint_leaf);

} // namespace hpn
