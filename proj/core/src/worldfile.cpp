#include "hpn/worldfile.hpp"

#include <sstream>

#include "hpn/netfile.hpp"
#include "hpn/textfmt.hpp"

namespace hpn::sim {

namespace {

double to_num(const std::string& s, int line_no)
{
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (...) {
        throw parse_error(line_no, "invalid number '" + s + "'");
    }
}

} // namespace

Track parse_track(const std::string& content)
{
    Track track;
    for (const auto& line : textfmt::read_lines(content, "hpntrack 1")) {
        auto toks = textfmt::tokens(line.text);
        if (toks[0] == "segment" && toks.size() == 5) {
            track.elements.push_back(TrackSegment{to_num(toks[1], line.number),
                                                  to_num(toks[2], line.number),
                                                  to_num(toks[3], line.number),
                                                  to_num(toks[4], line.number)});
        } else if (toks[0] == "arc" && toks.size() == 6) {
            track.elements.push_back(TrackArc{to_num(toks[1], line.number),
                                              to_num(toks[2], line.number),
                                              to_num(toks[3], line.number),
                                              to_num(toks[4], line.number),
                                              to_num(toks[5], line.number)});
        } else {
            throw parse_error(line.number, "expected 'segment x1 y1 x2 y2' or 'arc cx cy r a0 a1'");
        }
    }
    if (track.elements.empty())
        throw parse_error(1, "track file declares no elements");
    return track;
}

std::string serialize_track(const Track& track)
{
    std::ostringstream out;
    out << "hpntrack 1\n";
    for (const Track::Element& e : track.elements) {
        if (std::holds_alternative<TrackSegment>(e)) {
            const TrackSegment& s = std::get<TrackSegment>(e);
            out << "segment " << s.x1 << ' ' << s.y1 << ' ' << s.x2 << ' ' << s.y2 << '\n';
        } else {
            const TrackArc& a = std::get<TrackArc>(e);
            out << "arc " << a.cx << ' ' << a.cy << ' ' << a.radius << ' ' << a.a0 << ' ' << a.a1
                << '\n';
        }
    }
    return out.str();
}

WorldConfig parse_world(const std::string& content, const std::string& base_dir)
{
    WorldConfig config;
    config.track = Track::oval(1.0, 0.3);
    bool track_seen = false;

    for (const auto& line : textfmt::read_lines(content, "hpnworld 1")) {
        std::size_t eq = line.text.find('=');
        if (eq == std::string::npos)
            throw parse_error(line.number, "expected <key> = <value>");
        auto key = std::string(textfmt::trim(line.text.substr(0, eq)));
        auto toks = textfmt::tokens(line.text.substr(eq + 1));
        if (toks.empty())
            throw parse_error(line.number, "empty value for '" + key + "'");

        WorldParams& p = config.params;
        auto num = [&](std::size_t i = 0) { return to_num(toks[i], line.number); };
        if (key == "v")
            p.v = num();
        else if (key == "omega")
            p.omega = num();
        else if (key == "wheel_radius")
            p.wheel_radius = num();
        else if (key == "axle_track")
            p.axle_track = num();
        else if (key == "line_width")
            p.line_width = num();
        else if (key == "dt")
            p.dt = num();
        else if (key == "threshold")
            p.threshold = num();
        else if (key == "sensor_forward")
            p.sensor_forward = num();
        else if (key == "duration")
            p.duration = num();
        else if (key == "line_lost_timeout")
            p.line_lost_timeout = num();
        else if (key == "mission_laps")
            p.mission_laps = num();
        else if (key == "sensor_lateral") {
            if (toks.size() != 3)
                throw parse_error(line.number, "sensor_lateral needs three values (left middle right)");
            p.sensor_lateral = {num(0), num(1), num(2)};
        } else if (key == "start") {
            if (toks.size() != 3)
                throw parse_error(line.number, "start needs x y theta");
            p.start = Pose{num(0), num(1), num(2)};
        } else if (key == "track") {
            track_seen = true;
            if (toks[0] == "oval" && toks.size() == 3)
                config.track = Track::oval(num(1), num(2));
            else if (toks[0] == "file" && toks.size() == 2)
                config.track = parse_track(
                    read_file(base_dir.empty() ? toks[1] : base_dir + "/" + toks[1]));
            else
                throw parse_error(line.number, "expected 'oval <straight> <radius>' or 'file <path>'");
            config.track_decl = toks[0];
            for (std::size_t i = 1; i < toks.size(); ++i)
                config.track_decl += " " + toks[i];
        } else {
            throw parse_error(line.number, "unknown world parameter '" + key + "'");
        }
    }
    if (!track_seen)
        throw parse_error(1, "world config declares no track");
    config.params.check();
    return config;
}

std::string serialize_world(const WorldConfig& config)
{
    const WorldParams& p = config.params;
    std::ostringstream out;
    out << "hpnworld 1\n";
    out << "v = " << p.v << '\n';
    out << "omega = " << p.omega << '\n';
    out << "wheel_radius = " << p.wheel_radius << '\n';
    out << "axle_track = " << p.axle_track << '\n';
    out << "line_width = " << p.line_width << '\n';
    out << "dt = " << p.dt << '\n';
    out << "threshold = " << p.threshold << '\n';
    out << "sensor_forward = " << p.sensor_forward << '\n';
    out << "sensor_lateral = " << p.sensor_lateral[0] << ' ' << p.sensor_lateral[1] << ' '
        << p.sensor_lateral[2] << '\n';
    out << "start = " << p.start.x << ' ' << p.start.y << ' ' << p.start.theta << '\n';
    out << "duration = " << p.duration << '\n';
    out << "line_lost_timeout = " << p.line_lost_timeout << '\n';
    out << "mission_laps = " << p.mission_laps << '\n';
    out << "track = " << config.track_decl << '\n';
    return out.str();
}

} // namespace hpn::sim
