#include "hpn/specfile.hpp"

#include <sstream>

#include "hpn/textfmt.hpp"

namespace hpn {

namespace {

using textfmt::Line;

struct SpecParser {
    SystemSpec spec;
    AgentSpec* agent = nullptr;
    SubsystemSpec* subsystem = nullptr;
    BehaviourSpec* behaviour = nullptr;
    bool in_comm = false;

    AgentSpec* find_agent(const std::string& name)
    {
        for (AgentSpec& a : spec.agents)
            if (a.name == name)
                return &a;
        return nullptr;
    }

    void open_section(const Line& line)
    {
        agent = nullptr;
        subsystem = nullptr;
        behaviour = nullptr;
        in_comm = false;

        auto body = std::string(textfmt::trim(line.text.substr(1, line.text.size() - 2)));
        auto toks = textfmt::tokens(body);
        if (toks.empty())
            throw parse_error(line.number, "empty section header");
        const std::string& kind = toks[0];
        if (kind == "comm") {
            if (toks.size() != 1)
                throw parse_error(line.number, "[comm] takes no name");
            in_comm = true;
            return;
        }
        if (toks.size() != 2)
            throw parse_error(line.number, "expected [" + kind + " <name>]");
        const std::string& name = toks[1];
        if (!textfmt::valid_name(name))
            throw parse_error(line.number, "invalid name '" + name + "'");

        if (kind == "system") {
            spec.name = name;
        } else if (kind == "agent") {
            if (find_agent(name))
                throw parse_error(line.number, "duplicate agent '" + name + "'");
            spec.agents.push_back(AgentSpec{name, {}});
            agent = &spec.agents.back();
        } else if (kind == "subsystem") {
            auto [agent_name, leaf] = textfmt::split_qualified(name, line.number);
            AgentSpec* a = find_agent(agent_name);
            if (!a)
                throw parse_error(line.number, "unknown agent '" + agent_name + "'");
            a->subsystems.push_back(SubsystemSpec{});
            subsystem = &a->subsystems.back();
            subsystem->name = leaf;
        } else if (kind == "behaviour") {
            auto [sub_path, leaf] = textfmt::split_qualified(name, line.number);
            auto [agent_name, sub_leaf] = textfmt::split_qualified(sub_path, line.number);
            AgentSpec* a = find_agent(agent_name);
            if (!a)
                throw parse_error(line.number, "unknown agent '" + agent_name + "'");
            SubsystemSpec* s = nullptr;
            for (SubsystemSpec& candidate : a->subsystems)
                if (candidate.name == sub_leaf)
                    s = &candidate;
            if (!s)
                throw parse_error(line.number, "unknown subsystem '" + sub_path + "'");
            s->behaviours.push_back(BehaviourSpec{});
            behaviour = &s->behaviours.back();
            behaviour->name = leaf;
        } else {
            throw parse_error(line.number, "unknown section kind '" + kind + "'");
        }
    }

    static Composition parse_composition(const std::string& word, int line_no)
    {
        if (word == "sequential")
            return Composition::sequential;
        if (word == "parallel")
            return Composition::parallel;
        throw parse_error(line_no, "expected sequential or parallel, got '" + word + "'");
    }

    void keyvalue(const Line& line)
    {
        std::size_t eq = line.text.find('=');
        if (eq == std::string::npos)
            throw parse_error(line.number, "expected <key> = <value>");
        auto key = std::string(textfmt::trim(line.text.substr(0, eq)));
        auto value = std::string(textfmt::trim(line.text.substr(eq + 1)));
        if (value.empty())
            throw parse_error(line.number, "empty value for '" + key + "'");

        if (subsystem && !behaviour) {
            if (key == "kind") {
                if (value.size() != 1)
                    throw parse_error(line.number, "kind must be one of c, e, r");
                subsystem->kind = value[0];
            } else if (key == "initial") {
                subsystem->initial_behaviour = value;
            } else if (key == "terminal") {
                subsystem->terminal_behaviour = value;
            } else {
                throw parse_error(line.number, "unknown subsystem attribute '" + key + "'");
            }
            return;
        }
        if (behaviour) {
            if (key == "f")
                behaviour->transition_function = value;
            else if (key == "error")
                behaviour->error_condition = value;
            else if (key == "terminal")
                behaviour->terminal_condition = value;
            else if (key == "send_composition")
                behaviour->send_composition = parse_composition(value, line.number);
            else if (key == "recv_composition")
                behaviour->recv_composition = parse_composition(value, line.number);
            else
                throw parse_error(line.number, "unknown behaviour attribute '" + key + "'");
            return;
        }
        throw parse_error(line.number, "attribute outside a subsystem or behaviour section");
    }

    void transition_line(const Line& line)
    {
        if (!subsystem || behaviour)
            throw parse_error(line.number, "transition declarations belong in [subsystem] sections");
        // transition <from> -> <to> : <cond_key>
        std::string rest = line.text.substr(10);
        std::size_t arrow = rest.find("->");
        if (arrow == std::string::npos)
            throw parse_error(line.number, "expected transition <from> -> <to> [: <cond>]");
        auto from = std::string(textfmt::trim(rest.substr(0, arrow)));
        std::string tail = rest.substr(arrow + 2);
        std::string cond;
        std::size_t colon = tail.find(':');
        if (colon != std::string::npos) {
            cond = std::string(textfmt::trim(tail.substr(colon + 1)));
            tail = tail.substr(0, colon);
        }
        auto to = std::string(textfmt::trim(tail));
        if (from.empty() || to.empty())
            throw parse_error(line.number, "expected transition <from> -> <to> [: <cond>]");
        subsystem->transitions.push_back(BehaviourTransition{from, to, cond});
    }

    void comm_line(const Line& line)
    {
        if (!in_comm)
            throw parse_error(line.number, "comm declarations belong in the [comm] section");
        // comm <producer> -> <consumer> : <model> [composition]
        std::string rest = line.text.substr(5);
        std::size_t arrow = rest.find("->");
        if (arrow == std::string::npos)
            throw parse_error(line.number, "expected comm <producer> -> <consumer> : <model>");
        auto producer = std::string(textfmt::trim(rest.substr(0, arrow)));
        std::string tail = rest.substr(arrow + 2);
        std::size_t colon = tail.find(':');
        if (colon == std::string::npos)
            throw parse_error(line.number, "expected ': <model>' in comm declaration");
        auto consumer = std::string(textfmt::trim(tail.substr(0, colon)));
        auto words = textfmt::tokens(tail.substr(colon + 1));
        if (words.empty() || words.size() > 2)
            throw parse_error(line.number, "expected ': <model> [sequential|parallel]'");
        if (!textfmt::valid_name(producer) || !textfmt::valid_name(consumer))
            throw parse_error(line.number, "invalid channel endpoint name");

        CommSpec comm;
        comm.producer = producer;
        comm.consumer = consumer;
        try {
            comm.model = CommModel::parse(words[0]);
        } catch (const net_error& e) {
            throw parse_error(line.number, e.what());
        }
        if (words.size() == 2)
            comm.composition = parse_composition(words[1], line.number);
        spec.comms.push_back(comm);
    }

    SystemSpec run(const std::string& content)
    {
        for (const Line& line : textfmt::read_lines(content, "hpnspec 1")) {
            if (line.text.front() == '[') {
                if (line.text.back() != ']')
                    throw parse_error(line.number, "unterminated section header");
                open_section(line);
            } else if (line.text.rfind("transition ", 0) == 0) {
                transition_line(line);
            } else if (line.text.rfind("comm ", 0) == 0) {
                comm_line(line);
            } else {
                keyvalue(line);
            }
        }
        return std::move(spec);
    }
};

const char* composition_word(Composition mode)
{
    return mode == Composition::sequential ? "sequential" : "parallel";
}

} // namespace

SystemSpec parse_spec(const std::string& content)
{
    return SpecParser().run(content);
}

std::string serialize_spec(const SystemSpec& spec)
{
    std::ostringstream out;
    out << "hpnspec 1\n";
    out << "[system " << spec.name << "]\n";
    for (const AgentSpec& agent : spec.agents) {
        out << "\n[agent " << agent.name << "]\n";
        for (const SubsystemSpec& sub : agent.subsystems) {
            out << "\n[subsystem " << agent.name << '.' << sub.name << "]\n";
            out << "kind = " << sub.kind << '\n';
            out << "initial = " << sub.initial_behaviour << '\n';
            out << "terminal = " << sub.terminal_behaviour << '\n';
            for (const BehaviourTransition& t : sub.transitions) {
                out << "transition " << t.from << " -> " << t.to;
                if (!t.initial_condition.empty())
                    out << " : " << t.initial_condition;
                out << '\n';
            }
            for (const BehaviourSpec& b : sub.behaviours) {
                out << "\n[behaviour " << agent.name << '.' << sub.name << '.' << b.name << "]\n";
                out << "f = " << b.transition_function << '\n';
                if (!b.error_condition.empty())
                    out << "error = " << b.error_condition << '\n';
                if (!b.terminal_condition.empty())
                    out << "terminal = " << b.terminal_condition << '\n';
                if (b.send_composition != Composition::sequential)
                    out << "send_composition = " << composition_word(b.send_composition) << '\n';
                if (b.recv_composition != Composition::sequential)
                    out << "recv_composition = " << composition_word(b.recv_composition) << '\n';
            }
        }
    }
    if (!spec.comms.empty()) {
        out << "\n[comm]\n";
        for (const CommSpec& comm : spec.comms)
            out << "comm " << comm.producer << " -> " << comm.consumer << " : " << comm.model.word()
                << ' ' << composition_word(comm.composition) << '\n';
    }
    return out.str();
}

} // namespace hpn
