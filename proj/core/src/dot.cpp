#include "hpn/dot.hpp"

#include <sstream>

namespace hpn {

namespace {

std::string quoted(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string transition_label(const std::string& name, const std::string& cond)
{
    return cond.empty() ? name : name + "\\n[" + cond + "]";
}

} // namespace

std::string export_dot(const System& sys)
{
    std::ostringstream out;
    out << "digraph hpn {\n";
    out << "  rankdir=LR;\n";
    for (std::uint32_t n = 0; n < sys.net_count(); ++n) {
        const NetGraph& net = sys.net(NetId{n});
        out << "  subgraph " << quoted("cluster_" + net.name) << " {\n";
        out << "    label=" << quoted(net.name) << ";\n";
        for (std::uint32_t i = 0; i < net.places.size(); ++i) {
            const Place& p = net.places[i];
            std::uint32_t group = sys.fusion_of(PlaceId{NetId{n}, i});
            out << "    " << quoted(net.name + "." + p.name) << " [shape=circle,label="
                << quoted(group == npos32 ? p.name : p.name + "\\n(" + sys.fusions()[group].name + ")");
            if (group != npos32)
                out << ",style=dashed";
            out << "];\n";
        }
        for (const Page& p : net.pages)
            out << "    " << quoted(net.name + "." + p.name)
                << " [shape=doublecircle,label=" << quoted(p.name) << "];\n";
        for (const Transition& t : net.transitions)
            out << "    " << quoted(net.name + "." + t.name)
                << " [shape=box,label=" << quoted(transition_label(t.name, t.cond)) << "];\n";
        auto name_of = [&](NodeRef r) -> const std::string& {
            switch (r.kind) {
            case NodeRef::Kind::place: return net.places[r.index].name;
            case NodeRef::Kind::transition: return net.transitions[r.index].name;
            default: return net.pages[r.index].name;
            }
        };
        for (const Arc& a : net.arcs)
            out << "    " << quoted(net.name + "." + name_of(a.from)) << " -> "
                << quoted(net.name + "." + name_of(a.to)) << ";\n";
        out << "  }\n";
    }
    out << "}\n";
    return out.str();
}

std::string export_dot(const GroundNet& ground)
{
    std::ostringstream out;
    out << "digraph hpn_ground {\n";
    out << "  rankdir=LR;\n";
    for (const GroundPlace& p : ground.places) {
        out << "  " << quoted(p.path) << " [shape=circle,label=" << quoted(p.path);
        if (p.fusion != npos32)
            out << ",style=dashed";
        out << "];\n";
    }
    for (const GroundTransition& t : ground.transitions) {
        out << "  " << quoted(t.path)
            << " [shape=box,label=" << quoted(transition_label(t.path, t.cond)) << "];\n";
        for (std::uint32_t p : t.inputs)
            out << "  " << quoted(ground.places[p].path) << " -> " << quoted(t.path) << ";\n";
        for (std::uint32_t p : t.outputs)
            out << "  " << quoted(t.path) << " -> " << quoted(ground.places[p].path) << ";\n";
    }
    out << "}\n";
    return out.str();
}

} // namespace hpn
