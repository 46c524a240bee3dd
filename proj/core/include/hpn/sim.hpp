#pragma once

#include <array>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "hpn/builder.hpp"
#include "hpn/records.hpp"
#include "hpn/registry.hpp"

namespace hpn::sim {

struct Pose {
    double x = 0;
    double y = 0;
    double theta = 0;
};

struct WheelSpeeds {
    double left = 0; // [rad/s]
    double right = 0;
};

struct MotorCmd {
    double v_lin = 0; // [m/s]
    double v_ang = 0; // [rad/s]
};

struct SensorBits {
    bool left = false;
    bool middle = false;
    bool right = false;
};

/// Line geometry: a chain of straight segments and circular arcs. A sensor
/// point is on the line iff its distance to the nearest element is strictly
/// below half the line width.
struct TrackSegment {
    double x1, y1, x2, y2;
};

struct TrackArc {
    double cx, cy, radius;
    double a0, a1; // counter-clockwise from a0 to a1, radians
};

class Track {
public:
    using Element = std::variant<TrackSegment, TrackArc>;
    std::vector<Element> elements;

    double distance_to(double x, double y) const;
    double length() const;

    /// Stadium-shaped closed loop: two straights of the given length joined
    /// by two semicircles of the given radius, centred on the origin.
    static Track oval(double straight, double radius);
};

// Defaults tuned so the three-sensor case table holds the default oval: the
// tape is wider than the sensor span, so dead centre reads (1,1,1) and the
// reversing recovery branch only fires when the line is lost entirely.
struct WorldParams {
    double v = 0.1;              // commanded linear speed [m/s]
    double omega = 2.0;          // commanded turn rate magnitude [rad/s]
    double wheel_radius = 0.03;  // r [m]
    double axle_track = 0.12;    // b [m]
    double line_width = 0.06;    // w [m]
    double dt = 0.01;            // world integration step [s]
    double threshold = 0.5;      // light intensity below this reads as line
    double sensor_forward = 0.05;
    std::array<double, 3> sensor_lateral = {-0.02, 0.0, 0.02}; // left, middle, right
    Pose start{-0.35, -0.3, 0.0};
    double duration = 60.0;          // mission horizon [s]
    double line_lost_timeout = 2.0;  // error condition threshold [s]
    double mission_laps = 0.0;       // 0 disables lap-based termination

    void check() const; // rejects non-positive geometry
};

/// Exact case table of the three-sensor steering function. The unlisted
/// input combinations all take the reversing recovery branch.
MotorCmd tf_control(const SensorBits& s, double v, double omega);

/// Differential-drive inverse kinematics.
WheelSpeeds tf_motor(const MotorCmd& cmd, double wheel_radius, double axle_track);

/// Thresholding of raw light intensities, strict inequality.
SensorBits tf_sensor(const std::array<double, 3>& intensities, double threshold);

/// Unicycle integration over dt: exact arc when turning, straight line
/// otherwise.
Pose integrate_unicycle(const Pose& pose, const WheelSpeeds& w, double wheel_radius,
                        double axle_track, double dt);

/// The simulated plant standing in for the real effectors and receptors:
/// it owns the robot pose, integrates wheel commands and publishes sensor
/// intensities. E/R are world-side subsystem stubs exchanging records with
/// the virtual effector/receptor over the channel slots.
class World {
public:
    World(WorldParams params, Track track);

    /// One control-period step: apply the wheel command, integrate dt and
    /// publish the intensities sampled at the new pose.
    void push_command(const WheelSpeeds& w);

    /// The last published sensing record (intensities, world time, laps).
    BufferRecord sampled() const { return sense_; }

    std::array<double, 3> intensities_at(const Pose& pose) const;

    struct Sample {
        double t;
        Pose pose;
        std::array<double, 3> intensities;
        WheelSpeeds cmd;
    };

    const std::vector<Sample>& log() const { return log_; }
    const Pose& pose() const { return pose_; }
    double time() const { return time_; }
    double distance_traveled() const { return distance_; }

    const WorldParams params;
    const Track track;

    // world-side stubs (kinds E and R)
    SubsystemModel real_effector;
    SubsystemModel real_receptor;

private:
    void publish();

    Pose pose_;
    double time_ = 0;
    double distance_ = 0;
    BufferRecord sense_;
    std::uint64_t sense_seq_ = 0;
    std::vector<Sample> log_;
};

/// Record schemas exchanged by the line-follower subsystems.
BufferRecord make_sensor_record();  // left, middle, right, world_time, laps
BufferRecord make_command_record(); // v_lin, v_ang, halt
BufferRecord make_wheel_record();   // w_left, w_right
BufferRecord make_halt_record();    // halt
BufferRecord make_sense_record();   // i_left, i_middle, i_right, world_time, laps

/// The example system: agent a1 with control subsystem c, virtual effector
/// e_motor and virtual receptor r_sensor, all channels fully asynchronous.
SystemSpec line_follower_spec();

// Operation and condition bodies behind the "sim.*" and "world.*" binding
// keys. They read their parameters from the attached world, so generated
// controllers can splice plain call-throughs.
void tf_init_op(OpCall& call);
void tf_control_op(OpCall& call);
void tf_motor_op(OpCall& call);
void tf_sensor_op(OpCall& call);
void world_push_op(OpCall& call);
void world_sample_op(OpCall& call);
bool c_init_done_cond(const CondCall& call);
bool c_mission_done_cond(const CondCall& call);
bool c_line_lost_cond(const CondCall& call);
bool e_halt_cond(const CondCall& call);
bool r_halt_cond(const CondCall& call);

/// Registers the bindings above under their keys.
void register_ops(Registry& reg);

/// Creates the world, attaches it to the environment and initializes the
/// subsystem buffers to their declared defaults.
std::shared_ptr<World> setup_env(RuntimeEnv& env, const WorldParams& params, const Track& track);

/// register_ops + setup_env in one call.
std::shared_ptr<World> register_line_follower(Registry& reg, RuntimeEnv& env,
                                              const WorldParams& params, const Track& track);

/// Mission summary computed from a world log, cut at the given horizon.
struct Summary {
    double on_line_fraction = 0; // middle sensor on the line
    double distance = 0;
    Pose final_pose;
    double covered = 0; // seconds of log actually present within the horizon
};
Summary summarize(const std::vector<World::Sample>& log, double horizon, double threshold);

/// Line-delimited pose log for plotting, header "hpnpose 1":
/// t x y theta i_left i_middle i_right w_left w_right
std::string pose_log_text(const std::vector<World::Sample>& log);

} // namespace hpn::sim
