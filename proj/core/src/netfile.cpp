#include "hpn/netfile.hpp"

#include <fstream>
#include <sstream>

#include "hpn/textfmt.hpp"

namespace hpn {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

std::string serialize_net(const System& sys)
{
    std::ostringstream out;
    out << "hpnnet 1\n";

    out << "[places]\n";
    for (std::uint32_t n = 0; n < sys.net_count(); ++n) {
        const NetGraph& net = sys.net(NetId{n});
        for (const Place& p : net.places) {
            out << net.name << '.' << p.name;
            if (p.is_input)
                out << " in";
            if (p.is_output)
                out << " out";
            if (!p.op.empty())
                out << " -> " << p.op;
            out << '\n';
        }
    }

    out << "[transitions]\n";
    for (std::uint32_t n = 0; n < sys.net_count(); ++n) {
        const NetGraph& net = sys.net(NetId{n});
        for (const Transition& t : net.transitions) {
            out << net.name << '.' << t.name;
            if (!t.cond.empty())
                out << " -> " << t.cond;
            out << '\n';
        }
    }

    out << "[arcs]\n";
    for (std::uint32_t n = 0; n < sys.net_count(); ++n) {
        const NetGraph& net = sys.net(NetId{n});
        auto name_of = [&](NodeRef r) -> const std::string& {
            switch (r.kind) {
            case NodeRef::Kind::place: return net.places[r.index].name;
            case NodeRef::Kind::transition: return net.transitions[r.index].name;
            default: return net.pages[r.index].name;
            }
        };
        for (const Arc& a : net.arcs)
            out << net.name << '.' << name_of(a.from) << " -> " << net.name << '.' << name_of(a.to)
                << '\n';
    }

    out << "[pages]\n";
    for (std::uint32_t n = 0; n < sys.net_count(); ++n) {
        const NetGraph& net = sys.net(NetId{n});
        for (const Page& p : net.pages)
            out << net.name << '.' << p.name << " -> " << sys.net(p.inner).name << '\n';
    }

    out << "[fusions]\n";
    for (const FusionGroup& g : sys.fusions()) {
        out << g.name << " :";
        for (PlaceId m : g.members)
            out << ' ' << sys.net(m.net).name << '.' << sys.net(m.net).places[m.index].name;
        out << '\n';
    }

    out << "[initial_marking]\n";
    for (const auto& [id, count] : sys.initial_marking())
        out << sys.net(id.net).name << '.' << sys.net(id.net).places[id.index].name << ' ' << count
            << '\n';

    return out.str();
}

namespace {

using textfmt::Line;

class NetParser {
public:
    System parse(const std::string& content)
    {
        auto lines = textfmt::read_lines(content, "hpnnet 1");

        // Pages may reference nets declared by later element lines, so the
        // sections are replayed in dependency order regardless of their
        // order in the file.
        std::vector<const Line*> arcs, pages, fusions, marking;
        std::string section;
        for (const Line& line : lines) {
            if (line.text.front() == '[') {
                section = line.text;
                if (section != "[places]" && section != "[transitions]" && section != "[arcs]" &&
                    section != "[pages]" && section != "[fusions]" && section != "[initial_marking]")
                    throw parse_error(line.number, "unknown section " + section);
                continue;
            }
            if (section.empty())
                throw parse_error(line.number, "declaration before any section");
            if (section == "[places]")
                parse_place(line);
            else if (section == "[transitions]")
                parse_transition(line);
            else if (section == "[arcs]")
                arcs.push_back(&line);
            else if (section == "[pages]")
                pages.push_back(&line);
            else if (section == "[fusions]")
                fusions.push_back(&line);
            else
                marking.push_back(&line);
        }
        for (const Line* line : pages)
            parse_page(*line);
        for (const Line* line : arcs)
            parse_arc(*line);
        for (const Line* line : fusions)
            parse_fusion(*line);
        for (const Line* line : marking)
            parse_marking(*line);
        return std::move(sys_);
    }

private:
    System sys_;

    NetGraph& net_for(const std::string& name, int line_no)
    {
        if (!textfmt::valid_name(name))
            throw parse_error(line_no, "invalid net name '" + name + "'");
        NetId id = sys_.net_by_name(name);
        if (!id.valid())
            id = sys_.add_net(name);
        return sys_.net(id);
    }

    // "<lhs> -> <rhs>" where rhs is optional; returns (lhs tokens, rhs).
    static std::pair<std::vector<std::string>, std::string> split_binding(const Line& line)
    {
        std::size_t arrow = line.text.find("->");
        if (arrow == std::string::npos)
            return {textfmt::tokens(line.text), ""};
        auto lhs = textfmt::tokens(line.text.substr(0, arrow));
        auto rhs = std::string(textfmt::trim(line.text.substr(arrow + 2)));
        if (rhs.empty() || !textfmt::valid_name(rhs))
            throw parse_error(line.number, "invalid binding target after '->'");
        return {lhs, rhs};
    }

    void parse_place(const Line& line)
    {
        auto [lhs, op] = split_binding(line);
        if (lhs.empty())
            throw parse_error(line.number, "expected a place name");
        auto [net_name, local] = textfmt::split_qualified(lhs[0], line.number);
        bool is_input = false, is_output = false;
        for (std::size_t i = 1; i < lhs.size(); ++i) {
            if (lhs[i] == "in")
                is_input = true;
            else if (lhs[i] == "out")
                is_output = true;
            else
                throw parse_error(line.number, "unknown place flag '" + lhs[i] + "'");
        }
        try {
            net_for(net_name, line.number).add_place(local, op, is_input, is_output);
        } catch (const net_error& e) {
            throw parse_error(line.number, e.what());
        }
    }

    void parse_transition(const Line& line)
    {
        auto [lhs, cond] = split_binding(line);
        if (lhs.size() != 1)
            throw parse_error(line.number, "expected a single transition name");
        auto [net_name, local] = textfmt::split_qualified(lhs[0], line.number);
        try {
            net_for(net_name, line.number).add_transition(local, cond);
        } catch (const net_error& e) {
            throw parse_error(line.number, e.what());
        }
    }

    void parse_page(const Line& line)
    {
        auto [lhs, inner] = split_binding(line);
        if (lhs.size() != 1 || inner.empty())
            throw parse_error(line.number, "expected <net>.<page> -> <inner_net>");
        auto [net_name, local] = textfmt::split_qualified(lhs[0], line.number);
        NetId inner_id = sys_.net_by_name(inner);
        if (!inner_id.valid())
            inner_id = net_for(inner, line.number).id();
        try {
            net_for(net_name, line.number).add_page(local, inner_id);
        } catch (const net_error& e) {
            throw parse_error(line.number, e.what());
        }
    }

    void parse_arc(const Line& line)
    {
        auto [lhs, rhs] = split_binding(line);
        if (lhs.size() != 1 || rhs.empty())
            throw parse_error(line.number, "expected <net>.<from> -> <net>.<to>");
        auto [from_net, from_local] = textfmt::split_qualified(lhs[0], line.number);
        auto [to_net, to_local] = textfmt::split_qualified(rhs, line.number);
        if (from_net != to_net)
            throw parse_error(line.number, "arc endpoints belong to different nets");
        NetId id = sys_.net_by_name(from_net);
        if (!id.valid())
            throw parse_error(line.number, "unknown net '" + from_net + "'");
        try {
            sys_.net(id).connect(from_local, to_local);
        } catch (const net_error& e) {
            throw parse_error(line.number, e.what());
        }
    }

    PlaceId place_ref(const std::string& qualified, int line_no)
    {
        auto [net_name, local] = textfmt::split_qualified(qualified, line_no);
        NetId id = sys_.net_by_name(net_name);
        if (!id.valid())
            throw parse_error(line_no, "unknown net '" + net_name + "'");
        const NetGraph& net = sys_.net(id);
        if (!net.has_node(local))
            throw parse_error(line_no, "unknown place '" + qualified + "'");
        NodeRef ref = net.node(local);
        if (ref.kind != NodeRef::Kind::place)
            throw parse_error(line_no, "'" + qualified + "' is not a place");
        return PlaceId{id, ref.index};
    }

    void parse_fusion(const Line& line)
    {
        std::size_t colon = line.text.find(':');
        if (colon == std::string::npos)
            throw parse_error(line.number, "expected <group> : <members...>");
        auto name = std::string(textfmt::trim(line.text.substr(0, colon)));
        if (!textfmt::valid_name(name))
            throw parse_error(line.number, "invalid fusion group name");
        std::vector<PlaceId> members;
        for (const std::string& tok : textfmt::tokens(line.text.substr(colon + 1)))
            members.push_back(place_ref(tok, line.number));
        try {
            sys_.fuse(name, members);
        } catch (const net_error& e) {
            throw parse_error(line.number, e.what());
        }
    }

    void parse_marking(const Line& line)
    {
        auto toks = textfmt::tokens(line.text);
        if (toks.size() != 2)
            throw parse_error(line.number, "expected <net>.<place> <count>");
        PlaceId id = place_ref(toks[0], line.number);
        std::uint32_t count = 0;
        try {
            count = static_cast<std::uint32_t>(std::stoul(toks[1]));
        } catch (...) {
            throw parse_error(line.number, "invalid token count '" + toks[1] + "'");
        }
        sys_.set_initial(id, count);
    }
};

} // namespace

System parse_net(const std::string& content)
{
    return NetParser().parse(content);
}

} // namespace hpn
