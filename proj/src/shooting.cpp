#include "lambdasurf/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace lambdasurf {

const char* to_string(ShotOutcome o) {
    switch (o) {
        case ShotOutcome::ReturnsToLine: return "ReturnsToLine";
        case ShotOutcome::AngleFloor: return "AngleFloor";
        case ShotOutcome::AngleCeiling: return "AngleCeiling";
        case ShotOutcome::HitsXAxis: return "HitsXAxis";
        case ShotOutcome::StepLimit: return "StepLimit";
    }
    return "?";
}

namespace {

constexpr double kDoublingCap = 1e6;       // in units of the circle radius
constexpr double kResampleStep = 1e-3;     // spacing for finite-difference residuals

ShotOutcome classify(EventKind k) {
    switch (k) {
        case EventKind::LineCross: return ShotOutcome::ReturnsToLine;
        case EventKind::AngleCeiling: return ShotOutcome::AngleCeiling;
        case EventKind::AngleFloor: return ShotOutcome::AngleFloor;
        case EventKind::XAxisGuard: return ShotOutcome::HitsXAxis;
        case EventKind::StepLimit: return ShotOutcome::StepLimit;
        default:
            throw DomainCollapse(std::string("shot terminated by unexpected event: ") +
                                 to_string(k));
    }
}

// Worst turning-equation defect over a uniform resampling of the forward arc.
// The mirrored half satisfies the same equation exactly, so the forward arc decides.
double max_fd_residual(const Trajectory& traj, const Params& p) {
    const double T = traj.t_end();
    const int cells = std::max(2, static_cast<int>(std::ceil(T / kResampleStep)));
    const double h = T / cells;
    double worst = 0;
    TrajectorySample prev2, prev1;
    for (int i = 0; i <= cells; ++i) {
        const double t = i == cells ? T : i * h;
        const ProfileState st = traj.dense_profile(t);
        const TrajectorySample cur{t, st, rhs_xy(st, p).dtheta};
        if (i >= 2) worst = std::max(worst, std::abs(fd_residual(prev2, prev1, cur, p)));
        prev2 = prev1;
        prev1 = cur;
    }
    return worst;
}

}  // namespace

ShotResult shoot(const ShotSpec& spec) {
    validate(spec.params);
    validate(spec.config);
    if (spec.params.m != spec.params.n) {
        throw std::invalid_argument("shooting requires m == n");
    }
    if (!(spec.R > 0)) throw std::invalid_argument("R must be positive");

    const DiagonalState start{spec.R, 0.0, 0.0};
    ShotResult result;
    const double dphi0 = rhs_diagonal(start, spec.params).dphi;
    if (dphi0 >= 0) {
        // The shot would cross phi = 0 upward immediately; classified without integrating.
        result.outcome = ShotOutcome::AngleCeiling;
        result.T = 0;
        result.terminal = start;
        result.trajectory.params = spec.params;
        result.trajectory.chart = Chart::Diagonal;
        result.trajectory.samples.push_back({0.0, from_diagonal(start), dphi0});
        result.trajectory.events.push_back(
            {0.0, EventKind::AngleCeiling, {start.r, start.s, start.phi}, false});
        return result;
    }

    const Chart chart = Chart::Diagonal;
    std::vector<EventSpec> events{
        make_line_cross(chart, spec.config), make_angle_ceiling(chart),
        make_angle_floor(chart), make_critical_angle(chart),
        make_x_axis_guard(chart, spec.config)};
    result.trajectory = integrate(start, spec.params, spec.config, events);

    const EventRecord* terminal = nullptr;
    for (const EventRecord& ev : result.trajectory.events) {
        if (ev.simultaneous) continue;
        if (ev.kind == EventKind::CriticalAngle) {
            if (!result.s_max) {
                result.s_max = ev.state[1];
                result.r_at_smax = ev.state[0];
            }
            continue;
        }
        if (ev.kind == EventKind::ThetaZero) continue;
        terminal = &ev;
    }
    if (!terminal) throw DomainCollapse("shot ended without a terminal event");
    result.outcome = classify(terminal->kind);
    result.T = terminal->t;
    result.terminal = {terminal->state[0], terminal->state[1], terminal->state[2]};
    return result;
}

ClosedCurve reflect_and_close(const ShotResult& shot) {
    if (shot.outcome != ShotOutcome::ReturnsToLine) {
        throw std::invalid_argument("only a returning shot closes into a loop");
    }
    const std::vector<TrajectorySample>& fwd = shot.trajectory.samples;
    if (fwd.size() < 2) throw std::invalid_argument("shot trajectory has too few samples");

    const double T = fwd.back().t;
    ClosedCurve curve;
    curve.r_star = shot.trajectory.samples.front().state.x * kSqrt2;
    curve.points = fwd;
    // Mirror across the line, reversed so the loop keeps one orientation. The tangent
    // angle continues downward through -pi at the junction: theta -> -5*pi/2 - theta.
    for (size_t k = fwd.size() - 1; k-- > 1;) {
        const TrajectorySample& src = fwd[k];
        TrajectorySample mirrored;
        mirrored.t = 2 * T - src.t;
        mirrored.state = {src.state.y, src.state.x, -5 * kPi / 2 - src.state.theta};
        mirrored.theta_dot = src.theta_dot;
        curve.points.push_back(mirrored);
    }

    const DiagonalState end_diag = to_diagonal(fwd.back().state);
    const DiagonalState start_diag = to_diagonal(fwd.front().state);
    curve.closure_gap = std::max(2 * std::abs(end_diag.s), 2 * std::abs(start_diag.s));
    curve.perp_residual = std::abs(end_diag.phi + kPi);
    curve.max_eq_residual = max_fd_residual(shot.trajectory, shot.trajectory.params);
    curve.bracket = {curve.r_star, curve.r_star};
    curve.iterations = 0;
    return curve;
}

ClosedCurve find_rstar(const Params& p, const IntegratorConfig& cfg, double r_tol,
                       int max_iter) {
    validate(p);
    validate(cfg);
    if (p.m != p.n) throw std::invalid_argument("shooting requires m == n");
    if (!(p.lambda < 0)) throw std::invalid_argument("shooting requires lambda < 0");
    if (!(r_tol > 0)) throw std::invalid_argument("r_tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be positive");

    const double rho = explicit_solutions(p).circle_radius;
    ShotSpec spec{0, p, cfg};

    // The circle radius itself never returns; double upward until a shot does.
    double lo = rho;
    double hi = 2 * rho;
    std::optional<ShotResult> best;
    while (hi <= kDoublingCap * rho) {
        spec.R = hi;
        ShotResult shot = shoot(spec);
        if (shot.outcome == ShotOutcome::ReturnsToLine) {
            best = std::move(shot);
            break;
        }
        lo = hi;
        hi *= 2;
    }
    if (!best) {
        throw BracketFailure("no returning shot up to R = " + std::to_string(kDoublingCap) +
                             " * circle_radius");
    }

    int iterations = 0;
    while (hi - lo > r_tol && iterations < max_iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // double-precision floor on the bracket
        spec.R = mid;
        ShotResult shot = shoot(spec);
        ++iterations;
        if (shot.outcome == ShotOutcome::ReturnsToLine) {
            hi = mid;
            best = std::move(shot);
        } else {
            lo = mid;
        }
    }

    ClosedCurve curve = reflect_and_close(*best);
    curve.r_star = hi;
    curve.bracket = {lo, hi};
    curve.iterations = iterations;
    if (hi - lo > r_tol) {
        char msg[96];
        std::snprintf(msg, sizeof(msg), "bracket stalled at width %.3e above r_tol %.3e",
                      hi - lo, r_tol);
        throw ToleranceNotMet(msg, std::move(curve));
    }
    return curve;
}

std::vector<SweepRow> sweep(const Params& p, const IntegratorConfig& cfg,
                            const std::vector<double>& R_values) {
    std::vector<SweepRow> rows;
    rows.reserve(R_values.size());
    for (double R : R_values) {
        SweepRow row;
        row.R = R;
        try {
            ShotResult shot = shoot({R, p, cfg});
            row.outcome = shot.outcome;
            row.phi_end = shot.terminal.phi;
            row.s_max = shot.s_max;
            row.T = shot.T;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace lambdasurf
