#include "hpn/sim.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hpn/net.hpp"

namespace hpn::sim {

namespace {

constexpr double tau = 6.283185307179586476925286766559;

double segment_distance(const TrackSegment& s, double x, double y)
{
    const double dx = s.x2 - s.x1, dy = s.y2 - s.y1;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((x - s.x1) * dx + (y - s.y1) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double px = s.x1 + t * dx, py = s.y1 + t * dy;
    return std::hypot(x - px, y - py);
}

double arc_distance(const TrackArc& a, double x, double y)
{
    const double dx = x - a.cx, dy = y - a.cy;
    const double rho = std::hypot(dx, dy);
    double ang = std::atan2(dy, dx);
    // normalize into [a0, a0 + span)
    double span = a.a1 - a.a0;
    while (span < 0)
        span += tau;
    double rel = ang - a.a0;
    while (rel < 0)
        rel += tau;
    while (rel >= tau)
        rel -= tau;
    if (rel <= span)
        return std::abs(rho - a.radius);
    const double e0x = a.cx + a.radius * std::cos(a.a0), e0y = a.cy + a.radius * std::sin(a.a0);
    const double e1x = a.cx + a.radius * std::cos(a.a1), e1y = a.cy + a.radius * std::sin(a.a1);
    return std::min(std::hypot(x - e0x, y - e0y), std::hypot(x - e1x, y - e1y));
}

} // namespace

double Track::distance_to(double x, double y) const
{
    double best = 1e300;
    for (const Element& e : elements) {
        double d = std::holds_alternative<TrackSegment>(e)
                       ? segment_distance(std::get<TrackSegment>(e), x, y)
                       : arc_distance(std::get<TrackArc>(e), x, y);
        best = std::min(best, d);
    }
    return best;
}

double Track::length() const
{
    double sum = 0;
    for (const Element& e : elements) {
        if (std::holds_alternative<TrackSegment>(e)) {
            const TrackSegment& s = std::get<TrackSegment>(e);
            sum += std::hypot(s.x2 - s.x1, s.y2 - s.y1);
        } else {
            const TrackArc& a = std::get<TrackArc>(e);
            double span = a.a1 - a.a0;
            while (span < 0)
                span += tau;
            sum += a.radius * span;
        }
    }
    return sum;
}

Track Track::oval(double straight, double radius)
{
    const double h = straight / 2;
    Track t;
    t.elements.push_back(TrackSegment{-h, -radius, h, -radius});             // bottom, heading +x
    t.elements.push_back(TrackArc{h, 0, radius, -tau / 4, tau / 4});         // right cap
    t.elements.push_back(TrackSegment{h, radius, -h, radius});               // top, heading -x
    t.elements.push_back(TrackArc{-h, 0, radius, tau / 4, 3 * tau / 4});     // left cap
    return t;
}

void WorldParams::check() const
{
    if (wheel_radius <= 0)
        throw net_error("world config: wheel_radius must be positive");
    if (axle_track <= 0)
        throw net_error("world config: axle_track must be positive");
    if (dt <= 0)
        throw net_error("world config: dt must be positive");
    if (line_width <= 0)
        throw net_error("world config: line_width must be positive");
}

MotorCmd tf_control(const SensorBits& s, double v, double omega)
{
    const bool L = s.left, M = s.middle, R = s.right;
    if (L && M && R)
        return MotorCmd{v, 0.0};
    if (L && M && !R)
        return MotorCmd{v, -omega / 15.0};
    if (L && !M && !R)
        return MotorCmd{v, -omega};
    if (!L && M && R)
        return MotorCmd{v, omega / 15.0};
    if (!L && !M && R)
        return MotorCmd{v, omega};
    return MotorCmd{-v, -omega / 2.0}; // otherwise: back out of the dead zone
}

WheelSpeeds tf_motor(const MotorCmd& cmd, double wheel_radius, double axle_track)
{
    return WheelSpeeds{(cmd.v_lin - cmd.v_ang * axle_track / 2.0) / wheel_radius,
                       (cmd.v_lin + cmd.v_ang * axle_track / 2.0) / wheel_radius};
}

SensorBits tf_sensor(const std::array<double, 3>& intensities, double threshold)
{
    return SensorBits{intensities[0] < threshold, intensities[1] < threshold,
                      intensities[2] < threshold};
}

Pose integrate_unicycle(const Pose& pose, const WheelSpeeds& w, double wheel_radius,
                        double axle_track, double dt)
{
    const double v = (w.left + w.right) * wheel_radius / 2.0;
    const double wz = (w.right - w.left) * wheel_radius / axle_track;
    Pose next = pose;
    if (std::abs(wz) < 1e-12) {
        next.x += v * std::cos(pose.theta) * dt;
        next.y += v * std::sin(pose.theta) * dt;
    } else {
        next.theta = pose.theta + wz * dt;
        next.x += v / wz * (std::sin(next.theta) - std::sin(pose.theta));
        next.y -= v / wz * (std::cos(next.theta) - std::cos(pose.theta));
    }
    return next;
}

BufferRecord make_sensor_record()
{
    BufferRecord r;
    r.declare("left", false).declare("middle", false).declare("right", false);
    r.declare("world_time", 0.0).declare("laps", 0.0);
    return r;
}

BufferRecord make_command_record()
{
    BufferRecord r;
    r.declare("v_lin", 0.0).declare("v_ang", 0.0).declare("halt", false);
    return r;
}

BufferRecord make_wheel_record()
{
    BufferRecord r;
    r.declare("w_left", 0.0).declare("w_right", 0.0);
    return r;
}

BufferRecord make_halt_record()
{
    BufferRecord r;
    r.declare("halt", false);
    return r;
}

BufferRecord make_sense_record()
{
    BufferRecord r;
    r.declare("i_left", 1.0).declare("i_middle", 1.0).declare("i_right", 1.0);
    r.declare("world_time", 0.0).declare("laps", 0.0);
    return r;
}

World::World(WorldParams p, Track t) : params(std::move(p)), track(std::move(t))
{
    params.check();
    real_effector.path = "world.E_motor";
    real_effector.kind = 'E';
    real_receptor.path = "world.R_sensor";
    real_receptor.kind = 'R';
    pose_ = params.start;
    publish();
    log_.push_back(Sample{time_, pose_, intensities_at(pose_), WheelSpeeds{}});
}

std::array<double, 3> World::intensities_at(const Pose& pose) const
{
    std::array<double, 3> out;
    for (int i = 0; i < 3; ++i) {
        const double fx = params.sensor_forward, fy = params.sensor_lateral[i];
        const double sx = pose.x + fx * std::cos(pose.theta) - fy * std::sin(pose.theta);
        const double sy = pose.y + fx * std::sin(pose.theta) + fy * std::cos(pose.theta);
        // dark line on a light floor; strictly inside the half width
        out[i] = track.distance_to(sx, sy) < params.line_width / 2.0 ? 0.0 : 1.0;
    }
    return out;
}

void World::publish()
{
    BufferRecord r = make_sense_record();
    const auto intens = intensities_at(pose_);
    r.set_num("i_left", intens[0]);
    r.set_num("i_middle", intens[1]);
    r.set_num("i_right", intens[2]);
    r.set_num("world_time", time_);
    r.set_num("laps", track.length() > 0 ? distance_ / track.length() : 0.0);
    r.fresh = true;
    r.seq = ++sense_seq_;
    sense_ = r;
    real_receptor.out["a1.r_sensor"] = r;
}

void World::push_command(const WheelSpeeds& w)
{
    const double v = (w.left + w.right) * params.wheel_radius / 2.0;
    pose_ = integrate_unicycle(pose_, w, params.wheel_radius, params.axle_track, params.dt);
    time_ += params.dt;
    distance_ += std::abs(v) * params.dt;
    ++real_effector.time;
    publish();
    ++real_receptor.time;
    log_.push_back(Sample{time_, pose_, intensities_at(pose_), w});
}

SystemSpec line_follower_spec()
{
    SystemSpec spec;
    spec.name = "sys";

    AgentSpec a1;
    a1.name = "a1";

    SubsystemSpec c;
    c.name = "c";
    c.kind = 'c';
    c.initial_behaviour = "init";
    c.terminal_behaviour = "control";
    c.transitions.push_back(BehaviourTransition{"init", "control", ""});
    BehaviourSpec c_init;
    c_init.name = "init";
    c_init.transition_function = "sim.tf_init";
    c_init.terminal_condition = "sim.c_init_done";
    BehaviourSpec c_control;
    c_control.name = "control";
    c_control.transition_function = "sim.tf_control";
    c_control.error_condition = "sim.c_line_lost";
    c_control.terminal_condition = "sim.c_mission_done";
    c.behaviours = {c_init, c_control};

    SubsystemSpec e;
    e.name = "e_motor";
    e.kind = 'e';
    e.initial_behaviour = "cycle";
    e.terminal_behaviour = "cycle";
    BehaviourSpec e_cycle;
    e_cycle.name = "cycle";
    e_cycle.transition_function = "sim.tf_motor";
    e_cycle.terminal_condition = "sim.e_halt";
    e.behaviours = {e_cycle};

    SubsystemSpec r;
    r.name = "r_sensor";
    r.kind = 'r';
    r.initial_behaviour = "cycle";
    r.terminal_behaviour = "cycle";
    BehaviourSpec r_cycle;
    r_cycle.name = "cycle";
    r_cycle.transition_function = "sim.tf_sensor";
    r_cycle.terminal_condition = "sim.r_halt";
    r.behaviours = {r_cycle};

    a1.subsystems = {c, e, r};
    spec.agents = {a1};

    auto comm = [](const char* producer, const char* consumer) {
        CommSpec cs;
        cs.producer = producer;
        cs.consumer = consumer;
        cs.model = CommModel{};
        cs.composition = Composition::sequential;
        return cs;
    };
    spec.comms = {
        comm("a1.r_sensor.cycle", "a1.c.control"),
        comm("a1.c.control", "a1.e_motor.cycle"),
        comm("a1.c.control", "a1.r_sensor.cycle"),
        comm("a1.e_motor.cycle", "world.E_motor"),
        comm("world.R_sensor", "a1.r_sensor.cycle"),
    };
    return spec;
}

namespace {

World& world_of(RuntimeEnv& env)
{
    World* w = env.world();
    if (!w)
        throw net_error("no world attached to the runtime environment");
    return *w;
}

bool memory_flag(const CondCall& call, const char* subsystem, const char* slot)
{
    SubsystemModel* m = call.env.find_subsystem(subsystem);
    return m && m->memory.get_bool(slot);
}

} // namespace

void tf_init_op(OpCall& call)
{
    world_of(call.env); // connection check
    SubsystemModel& m = call.env.subsystem("a1.c");
    m.memory.set_bool("init_done", true);
}

void tf_control_op(OpCall& call)
{
    const WorldParams& p = world_of(call.env).params;
    SubsystemModel& m = call.env.subsystem("a1.c");
    const BufferRecord& x = m.in["a1.r_sensor"];
    SensorBits bits{x.get_bool("left"), x.get_bool("middle"), x.get_bool("right")};
    const double world_time = x.get_num("world_time");
    const double lap_count = x.get_num("laps");

    if (bits.left || bits.middle || bits.right)
        m.memory.set_num("last_seen_time", world_time);
    const bool lost = world_time - m.memory.get_num("last_seen_time") > p.line_lost_timeout;
    const bool done = world_time >= p.duration || (p.mission_laps > 0 && lap_count >= p.mission_laps);
    m.memory.set_bool("line_lost", lost);
    m.memory.set_bool("mission_done", done);

    MotorCmd cmd = tf_control(bits, p.v, p.omega);
    BufferRecord& y = m.out["a1.e_motor"];
    y.set_num("v_lin", cmd.v_lin);
    y.set_num("v_ang", cmd.v_ang);
    y.set_bool("halt", lost || done);
    m.out["a1.r_sensor"].set_bool("halt", lost || done);
}

void tf_motor_op(OpCall& call)
{
    const WorldParams& p = world_of(call.env).params;
    SubsystemModel& m = call.env.subsystem("a1.e_motor");
    const BufferRecord& x = m.in["a1.c"];
    const bool halt = x.get_bool("halt");
    MotorCmd cmd{halt ? 0.0 : x.get_num("v_lin"), halt ? 0.0 : x.get_num("v_ang")};
    WheelSpeeds w = tf_motor(cmd, p.wheel_radius, p.axle_track);
    BufferRecord& y = m.out["world.E_motor"];
    y.set_num("w_left", w.left);
    y.set_num("w_right", w.right);
    m.memory.set_bool("halt", halt);
}

void tf_sensor_op(OpCall& call)
{
    const WorldParams& p = world_of(call.env).params;
    SubsystemModel& m = call.env.subsystem("a1.r_sensor");
    const BufferRecord& x = m.in["world.R_sensor"];
    SensorBits bits = tf_sensor(
        {x.get_num("i_left", 1.0), x.get_num("i_middle", 1.0), x.get_num("i_right", 1.0)},
        p.threshold);
    BufferRecord& y = m.out["a1.c"];
    y.set_bool("left", bits.left);
    y.set_bool("middle", bits.middle);
    y.set_bool("right", bits.right);
    y.set_num("world_time", x.get_num("world_time"));
    y.set_num("laps", x.get_num("laps"));
    m.memory.set_bool("halt", m.in["a1.c"].get_bool("halt"));
}

void world_push_op(OpCall& call)
{
    World& world = world_of(call.env);
    SubsystemModel& m = call.env.subsystem("a1.e_motor");
    const BufferRecord& y = m.out["world.E_motor"];
    WheelSpeeds w{y.get_num("w_left"), y.get_num("w_right")};
    world.real_effector.in["a1.e_motor"] = y;
    world.push_command(w);
    call.emit(EventKind::buffer_write, "chan.a1.e_motor.cycle.to.world.E_motor",
              "seq=" + std::to_string(world.log().size() - 1));
}

void world_sample_op(OpCall& call)
{
    World& world = world_of(call.env);
    SubsystemModel& m = call.env.subsystem("a1.r_sensor");
    BufferRecord snapshot = world.sampled();
    m.in["world.R_sensor"] = snapshot;
    call.emit(EventKind::buffer_read, "chan.world.R_sensor.to.a1.r_sensor.cycle",
              "seq=" + std::to_string(snapshot.seq));
}

bool c_init_done_cond(const CondCall& call)
{
    return memory_flag(call, "a1.c", "init_done");
}

bool c_mission_done_cond(const CondCall& call)
{
    return memory_flag(call, "a1.c", "mission_done");
}

bool c_line_lost_cond(const CondCall& call)
{
    return memory_flag(call, "a1.c", "line_lost");
}

bool e_halt_cond(const CondCall& call)
{
    return memory_flag(call, "a1.e_motor", "halt");
}

bool r_halt_cond(const CondCall& call)
{
    return memory_flag(call, "a1.r_sensor", "halt");
}

void register_ops(Registry& reg)
{
    reg.op("sim.tf_init", &tf_init_op, OpAffinity::any, "a1.c");
    reg.op("sim.tf_control", &tf_control_op, OpAffinity::any, "a1.c");
    reg.op("sim.tf_motor", &tf_motor_op, OpAffinity::any, "a1.e_motor");
    reg.op("sim.tf_sensor", &tf_sensor_op, OpAffinity::any, "a1.r_sensor");
    reg.op("world.push.E_motor", &world_push_op, OpAffinity::world, "a1.e_motor");
    reg.op("world.sample.R_sensor", &world_sample_op, OpAffinity::world, "a1.r_sensor");
    reg.cond("sim.c_init_done", &c_init_done_cond, "a1.c");
    reg.cond("sim.c_mission_done", &c_mission_done_cond, "a1.c");
    reg.cond("sim.c_line_lost", &c_line_lost_cond, "a1.c");
    reg.cond("sim.e_halt", &e_halt_cond, "a1.e_motor");
    reg.cond("sim.r_halt", &r_halt_cond, "a1.r_sensor");
}

std::shared_ptr<World> setup_env(RuntimeEnv& env, const WorldParams& params, const Track& track)
{
    auto world = std::make_shared<World>(params, track);
    env.attach_world(world);

    // Buffers start from their declared defaults so the free-running e/r
    // subsystems compute sensibly before the first messages arrive.
    SubsystemModel& c = env.subsystem("a1.c");
    c.kind = 'c';
    c.in["a1.r_sensor"] = make_sensor_record();
    c.out["a1.e_motor"] = make_command_record();
    c.out["a1.r_sensor"] = make_halt_record();
    SubsystemModel& e = env.subsystem("a1.e_motor");
    e.kind = 'e';
    e.in["a1.c"] = make_command_record();
    e.out["world.E_motor"] = make_wheel_record();
    SubsystemModel& r = env.subsystem("a1.r_sensor");
    r.kind = 'r';
    r.in["world.R_sensor"] = world->sampled();
    r.in["a1.c"] = make_halt_record();
    r.out["a1.c"] = make_sensor_record();
    return world;
}

std::shared_ptr<World> register_line_follower(Registry& reg, RuntimeEnv& env,
                                              const WorldParams& params, const Track& track)
{
    register_ops(reg);
    return setup_env(env, params, track);
}

Summary summarize(const std::vector<World::Sample>& log, double horizon, double threshold)
{
    Summary s;
    std::size_t n = 0, on = 0;
    const World::Sample* prev = nullptr;
    for (const World::Sample& sample : log) {
        if (sample.t > horizon + 1e-9)
            break;
        ++n;
        on += sample.intensities[1] < threshold ? 1 : 0;
        if (prev)
            s.distance += std::hypot(sample.pose.x - prev->pose.x, sample.pose.y - prev->pose.y);
        s.final_pose = sample.pose;
        s.covered = sample.t;
        prev = &sample;
    }
    s.on_line_fraction = n ? static_cast<double>(on) / static_cast<double>(n) : 0.0;
    return s;
}

std::string pose_log_text(const std::vector<World::Sample>& log)
{
    std::ostringstream out;
    out.precision(std::numeric_limits<double>::max_digits10);
    out << "hpnpose 1\n";
    for (const World::Sample& s : log)
        out << s.t << ' ' << s.pose.x << ' ' << s.pose.y << ' ' << s.pose.theta << ' '
            << s.intensities[0] << ' ' << s.intensities[1] << ' ' << s.intensities[2] << ' '
            << s.cmd.left << ' ' << s.cmd.right << '\n';
    return out.str();
}

} // namespace hpn::sim
