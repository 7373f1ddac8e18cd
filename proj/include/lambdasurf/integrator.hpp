#pragma once

#include <array>
#include <functional>
#include <vector>

#include "lambdasurf/model.hpp"

namespace lambdasurf {

struct IntegratorConfig {
    double rel_tol = 1e-10;   // relative local error target
    double abs_tol = 1e-12;   // absolute local error target
    double max_step = 0.1;    // arclength cap per step
    double event_tol = 1e-12; // event localization width in t
    double t_max = 100.0;     // arclength budget
    double y_stop = 1e-6;     // horizontal-axis guard height
    double x_stop = 1e-6;     // vertical-axis guard offset
    double s_arm = 1e-8;      // displacement that arms the line-return event
};

void validate(const IntegratorConfig& c);

// Declaration order is the tie-break priority for simultaneous terminal events.
enum class EventKind {
    LineCross,      // s = 0, falling; armed once s >= s_arm
    AngleCeiling,   // phi = 0, rising
    AngleFloor,     // phi = -pi, falling
    CriticalAngle,  // phi = -pi/2 marker (critical point of s over r)
    ThetaZero,      // sin theta = 0 marker (horizontal tangency)
    XAxisGuard,     // y = y_stop, falling
    YAxisGuard,     // x = x_stop, falling
    StepLimit,      // t = t_max
};

const char* to_string(EventKind k);

enum class Chart { Profile, Diagonal };

using Vec3 = std::array<double, 3>;

struct EventSpec {
    enum class Direction { Rising, Falling, Either };

    EventKind kind = EventKind::StepLimit;
    std::function<double(double, const Vec3&)> predicate;  // root marks the event
    Direction direction = Direction::Either;
    bool terminal = false;
    std::function<bool(double, const Vec3&)> arm;  // inactive until first satisfied
};

struct EventRecord {
    double t = 0;
    EventKind kind = EventKind::StepLimit;
    Vec3 state{};            // chart-native
    bool simultaneous = false;  // terminal that tied with an earlier-enumerated one
};

// Continuous extension of one accepted step (quartic in the scaled offset).
struct DenseStep {
    double t0 = 0;
    double h = 0;
    std::array<Vec3, 5> rcont{};
    Vec3 eval(double t) const;
};

struct Trajectory {
    Params params;
    Chart chart = Chart::Diagonal;
    std::vector<TrajectorySample> samples;  // profile coordinates, strictly increasing t
    std::vector<EventRecord> events;        // non-decreasing t; terminal recorded last
    std::vector<DenseStep> steps;

    double t_end() const { return samples.empty() ? 0.0 : samples.back().t; }
    Vec3 dense_eval(double t) const;             // chart-native; throws std::out_of_range
    ProfileState dense_profile(double t) const;  // converted when chart is Diagonal
};

// Step size underflowed below 1e-14 before reaching any terminal condition.
struct NoProgress : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The state left the admissible region between accepted steps despite the guards.
struct DomainCollapse : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive embedded 5(4) pair with a free continuous extension. Runs until the
// first terminal event or t_max (recorded as StepLimit). Axis guards are always
// enforced: XAxisGuard/YAxisGuard specs are appended when the caller omits them.
Trajectory integrate(const ProfileState& init, const Params& p,
                     const IntegratorConfig& cfg, const std::vector<EventSpec>& events);
Trajectory integrate(const DiagonalState& init, const Params& p,
                     const IntegratorConfig& cfg, const std::vector<EventSpec>& events);

// Ready-made event specs for the chart they will run in.
EventSpec make_line_cross(Chart chart, const IntegratorConfig& cfg);
EventSpec make_angle_ceiling(Chart chart);
EventSpec make_angle_floor(Chart chart);
EventSpec make_critical_angle(Chart chart);
EventSpec make_theta_zero(Chart chart);
EventSpec make_x_axis_guard(Chart chart, const IntegratorConfig& cfg);
EventSpec make_y_axis_guard(Chart chart, const IntegratorConfig& cfg);

}  // namespace lambdasurf
