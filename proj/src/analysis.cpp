#include "lambdasurf/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <stdexcept>

namespace lambdasurf {

namespace {

constexpr double kThresholdBand = 1e-6;   // exclusion band around invariant heights
constexpr double kResampleH = 1e-3;       // uniform resampling step for FD checks
constexpr double kDegenerateRate = 1e-10; // |theta_dot| below this at a tangency is inconclusive

std::string strf(const char* fmt, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, ap);
    va_end(ap);
    return std::string(buf);
}

void merge_into(LemmaReport& dst, const LemmaReport& src) {
    dst.cases += src.cases;
    dst.violations.insert(dst.violations.end(), src.violations.begin(), src.violations.end());
    if (!src.note.empty()) {
        if (!dst.note.empty()) dst.note += "; ";
        dst.note += src.note;
    }
    dst.passed = dst.violations.empty();
}

void finish(LemmaReport& rep) { rep.passed = rep.violations.empty(); }

LemmaReport skipped_report(CheckId id, std::string note) {
    LemmaReport rep;
    rep.id = id;
    rep.skipped = true;
    rep.note = std::move(note);
    return rep;
}

// Uniform resampling of a trajectory through its dense output, spacing ~h.
std::vector<TrajectorySample> resample_uniform(const Trajectory& traj, const Params& p, double h) {
    std::vector<TrajectorySample> out;
    if (traj.samples.size() < 2 || traj.steps.empty()) return out;
    const double t0 = traj.samples.front().t;
    const double span = traj.t_end() - t0;
    if (!(span > 0)) return out;
    const auto cells = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(span / h)));
    out.reserve(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j) {
        const double t = t0 + span * static_cast<double>(j) / static_cast<double>(cells);
        const ProfileState st = traj.dense_profile(t);
        out.push_back({t, st, rhs_xy(st, p).dtheta});
    }
    return out;
}

// Bisects g(theta(t)) for a sign change of g over [tl, tr] on the dense output.
template <typename G>
double refine_tangency(const Trajectory& traj, double tl, double tr, G g) {
    double gl = g(traj.dense_profile(tl).theta);
    for (int i = 0; i < 200 && tr - tl > 1e-14 * std::max(1.0, std::abs(tr)); ++i) {
        const double tm = 0.5 * (tl + tr);
        const double gm = g(traj.dense_profile(tm).theta);
        if ((gl > 0) == (gm > 0) && gm != 0) {
            tl = tm;
            gl = gm;
        } else {
            tr = tm;
        }
    }
    return 0.5 * (tl + tr);
}

struct FitLine {
    double slope = 0;
    double intercept = 0;
};

FitLine least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    FitLine fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

}  // namespace

const char* to_string(CheckId id) {
    switch (id) {
        case CheckId::ExtremaHeights: return "extrema_heights";
        case CheckId::AxisPerpendicular: return "axis_perpendicular";
        case CheckId::NoOriginLines: return "no_origin_lines";
        case CheckId::CurlMonotonic: return "curl_monotonic";
        case CheckId::SinglePeak: return "single_peak";
        case CheckId::RadiusScaling: return "radius_scaling";
        case CheckId::ModelDecay: return "model_decay";
        case CheckId::OdeResidual: return "ode_residual";
        case CheckId::TurningAccel: return "turning_accel";
    }
    return "unknown";
}

LemmaReport check_critical_heights(const Trajectory& traj, const Params& p) {
    LemmaReport rep;
    rep.id = CheckId::ExtremaHeights;
    if (traj.samples.size() < 2 || traj.steps.empty()) {
        rep.note = "no interior span";
        return rep;
    }
    const ExplicitSolutions sol = explicit_solutions(p);
    const double t0 = traj.samples.front().t;
    const double tend = traj.t_end();

    // A tangency is an extremum iff its height clears the matching invariant height;
    // both facts come from the sign of theta_dot, so the two classifications must agree.
    auto examine = [&](double tstar, bool horizontal) {
        if (tstar < t0 + 1e-9 || tstar > tend - 1e-9) return;  // endpoint touch, not interior
        const ProfileState st = traj.dense_profile(tstar);
        const double td = rhs_xy(st, p).dtheta;
        if (std::abs(td) < kDegenerateRate) {
            rep.cases += 1;
            return;  // inconclusive second derivative
        }
        double height, threshold;
        bool is_max;
        if (horizontal) {
            const double eps = std::cos(st.theta) > 0 ? 1.0 : -1.0;
            is_max = td * eps < 0;
            height = st.y;
            threshold = eps > 0 ? sol.line_y : line_y_reversed(p);
        } else {
            const double eps = std::sin(st.theta) > 0 ? 1.0 : -1.0;
            is_max = td * eps > 0;
            height = st.x;
            threshold = eps < 0 ? sol.line_x : line_x_reversed(p);
        }
        rep.cases += 1;
        if (std::abs(height - threshold) <= kThresholdBand) return;  // too close to call
        const bool above = height > threshold;
        if (above != is_max) {
            Violation v;
            v.input = strf("t=%.12g %s tangency: %s at height %.12g vs invariant %.12g",
                           tstar, horizontal ? "horizontal" : "vertical",
                           is_max ? "max" : "min", height, threshold);
            v.measured = height;
            v.threshold = threshold;
            rep.violations.push_back(v);
        }
    };

    const auto& samples = traj.samples;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const double tl = samples[i].t;
        const double tr = samples[i + 1].t;
        if (!(tr > tl)) continue;
        const double thl = samples[i].state.theta;
        const double thr = samples[i + 1].state.theta;
        if ((std::sin(thl) > 0) != (std::sin(thr) > 0)) {
            examine(refine_tangency(traj, tl, tr, [](double th) { return std::sin(th); }), true);
        }
        if ((std::cos(thl) > 0) != (std::cos(thr) > 0)) {
            examine(refine_tangency(traj, tl, tr, [](double th) { return std::cos(th); }), false);
        }
    }
    if (rep.cases == 0) rep.note = "no interior tangencies";
    finish(rep);
    return rep;
}

LemmaReport check_perpendicular_approach(const Params& p, const IntegratorConfig& cfg) {
    LemmaReport rep;
    rep.id = CheckId::AxisPerpendicular;
    const double rho = explicit_solutions(p).circle_radius;
    const ProfileState start{rho * std::cos(kPi / 4), rho * std::sin(kPi / 4), -kPi / 4};
    const double levels[] = {1e-2, 1e-3, 1e-4, 1e-5};

    double prev = 0;
    bool have_prev = false;
    for (const double level : levels) {
        IntegratorConfig run_cfg = cfg;
        run_cfg.y_stop = level;
        const Trajectory traj = integrate(start, p, run_cfg, {});
        rep.cases += 1;

        const EventRecord* hit = nullptr;
        for (const auto& ev : traj.events) {
            if (ev.kind == EventKind::XAxisGuard && !ev.simultaneous) hit = &ev;
        }
        if (hit == nullptr) {
            rep.violations.push_back({strf("y_stop=%.0e: no axis-guard stop", level), 0.0, 0.0});
            continue;
        }
        const double gap = std::abs(hit->state[2] + kPi / 2);
        if (have_prev && !(gap < prev)) {
            rep.violations.push_back(
                {strf("y_stop=%.0e: gap %.6e did not drop below %.6e", level, gap, prev), gap, prev});
        }
        prev = gap;
        have_prev = true;
    }
    if (have_prev && !(prev < 0.1)) {
        rep.violations.push_back({strf("final gap %.6e not below 0.1", prev), prev, 0.1});
    }
    finish(rep);
    return rep;
}

LemmaReport check_no_origin_line(const Params& p) {
    LemmaReport rep;
    rep.id = CheckId::NoOriginLines;
    const double xs[] = {0.5, 1.0, 2.0, 4.0};
    // Slope where the through-origin residual is constant in x (it equals lambda there).
    const double k_balance = std::sqrt((p.n - 1.0) / (p.m - 1.0));

    for (int i = 1; i <= 100; ++i) {
        const double k = 0.1 * i;
        const double theta = std::atan(k);
        double lo = 0, hi = 0, amax = 0;
        bool first = true;
        for (const double x : xs) {
            const double res = rhs_xy({x, k * x, theta}, p).dtheta;
            amax = std::max(amax, std::abs(res));
            lo = first ? res : std::min(lo, res);
            hi = first ? res : std::max(hi, res);
            first = false;
        }
        rep.cases += 1;
        if (amax <= 1e-6) {
            rep.violations.push_back(
                {strf("k=%.1f: residual vanishes, line solves the system", k), amax, 1e-6});
        }
        if (std::abs(k - k_balance) > 0.05 && hi - lo <= 0.1) {
            rep.violations.push_back(
                {strf("k=%.1f: residual spread %.6e too flat", k, hi - lo), hi - lo, 0.1});
        }
    }

    // The two axis-parallel invariant lines must have zero residual, in contrast.
    const ExplicitSolutions sol = explicit_solutions(p);
    double horiz = 0, vert = 0;
    for (const double x : xs) horiz = std::max(horiz, std::abs(rhs_xy({x, sol.line_y, 0.0}, p).dtheta));
    for (const double y : xs) vert = std::max(vert, std::abs(rhs_xy({sol.line_x, y, -kPi / 2}, p).dtheta));
    rep.cases += 2;
    if (horiz > 1e-12) {
        rep.violations.push_back({strf("horizontal invariant line residual %.3e", horiz), horiz, 1e-12});
    }
    if (vert > 1e-12) {
        rep.violations.push_back({strf("vertical invariant line residual %.3e", vert), vert, 1e-12});
    }
    finish(rep);
    return rep;
}

LemmaReport check_theta_ddot(const Trajectory& traj, const Params& p) {
    LemmaReport rep;
    rep.id = CheckId::TurningAccel;
    const auto nodes = resample_uniform(traj, p, kResampleH);
    if (nodes.size() < 3) {
        rep.note = "trajectory too short to difference";
        return rep;
    }
    const double h = nodes[1].t - nodes[0].t;
    for (std::size_t j = 1; j + 1 < nodes.size(); ++j) {
        const double fd = (nodes[j - 1].state.theta - 2.0 * nodes[j].state.theta +
                           nodes[j + 1].state.theta) /
                          (h * h);
        const double an = theta_ddot(nodes[j].state, nodes[j].theta_dot, p);
        rep.cases += 1;
        if (std::abs(fd - an) > 1e-4) {
            rep.violations.push_back(
                {strf("t=%.6f: d2theta FD %.8e vs analytic %.8e", nodes[j].t, fd, an),
                 std::abs(fd - an), 1e-4});
        }
        // At a critical angle inside the curl region the turning must be decelerating.
        if (std::abs(nodes[j].theta_dot) < 1e-8 && in_curl_region(nodes[j].state, p)) {
            rep.cases += 1;
            if (!(an < 0)) {
                rep.violations.push_back(
                    {strf("t=%.6f: non-negative turning acceleration %.3e at critical angle",
                          nodes[j].t, an),
                     an, 0.0});
            }
        }
    }
    finish(rep);
    return rep;
}

LemmaReport check_model_identity(double eps) {
    LemmaReport rep;
    rep.id = CheckId::ModelDecay;
    if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
    const double rate = 0.5 * (1.0 - eps);
    const int grid = 1000;

    std::vector<double> taus, logs;
    for (int i = 0; i < grid; ++i) {
        const double tau = 40.0 * i / (grid - 1);
        const double u = rate * tau / 2.0;
        const double th = std::tanh(u);
        const double phi = -2.0 * std::atan(th);
        const double dphi = -2.0 * (rate / 2.0) * (1.0 - th * th) / (1.0 + th * th);
        const double residual = dphi - (-rate * std::cos(phi));
        rep.cases += 1;
        if (std::abs(residual) > 1e-10) {
            rep.violations.push_back(
                {strf("eps=%.3g tau=%.4f: equation residual %.3e", eps, tau, residual),
                 std::abs(residual), 1e-10});
        }
        if (tau >= 5.0) {
            const double gap = std::abs(phi + kPi / 2);
            if (gap > 0) {
                taus.push_back(tau);
                logs.push_back(std::log(gap));
            }
        }
    }

    const FitLine fit = least_squares(taus, logs);
    const double fitted = -fit.slope;
    rep.cases += 1;
    if (std::abs(fitted - rate) > 0.05 * rate) {
        rep.violations.push_back(
            {strf("eps=%.3g: fitted decay rate %.6f vs expected %.6f", eps, fitted, rate),
             fitted, rate});
    }
    finish(rep);
    return rep;
}

LemmaReport check_ode_residual(const Trajectory& traj, const Params& p) {
    LemmaReport rep;
    rep.id = CheckId::OdeResidual;
    const ExplicitSolutions sol = explicit_solutions(p);

    // Exact circle, analytic samples: the defect is pure truncation.
    {
        const double rho = sol.circle_radius;
        const double h = 1e-4;
        const double alpha0 = kPi / 2 - 0.1;
        double worst = 0;
        std::vector<TrajectorySample> tri(3);
        for (int j = 0; j < 2000; ++j) {
            for (int c = 0; c < 3; ++c) {
                const double t = (j + c) * h;
                const double alpha = alpha0 - t / rho;
                tri[c] = {t,
                          {rho * std::cos(alpha), rho * std::sin(alpha), alpha - kPi / 2},
                          -1.0 / rho};
            }
            worst = std::max(worst, std::abs(fd_residual(tri[0], tri[1], tri[2], p)));
        }
        rep.cases += 1;
        if (worst > 1e-6) {
            rep.violations.push_back({strf("exact circle FD defect %.3e", worst), worst, 1e-6});
        }
    }

    // Exact horizontal line: theta is constant, the defect is roundoff only.
    {
        const double h = 1e-4;
        double worst = 0;
        std::vector<TrajectorySample> tri(3);
        for (int j = 0; j < 2000; ++j) {
            for (int c = 0; c < 3; ++c) {
                const double t = (j + c) * h;
                tri[c] = {t, {1.0 + t, sol.line_y, 0.0}, 0.0};
            }
            worst = std::max(worst, std::abs(fd_residual(tri[0], tri[1], tri[2], p)));
        }
        rep.cases += 1;
        if (worst > 1e-13) {
            rep.violations.push_back({strf("exact line FD defect %.3e", worst), worst, 1e-13});
        }
    }

    // The integrated trajectory, resampled uniformly through the dense output.
    // The bound is truncation-limited: h^2/12 times the fourth theta derivative,
    // which grows with the turning rate at steep starts.
    const auto nodes = resample_uniform(traj, p, kResampleH);
    if (nodes.size() >= 3) {
        double worst = 0;
        for (std::size_t j = 1; j + 1 < nodes.size(); ++j) {
            worst = std::max(worst, std::abs(fd_residual(nodes[j - 1], nodes[j], nodes[j + 1], p)));
        }
        rep.cases += 1;
        if (worst > 1e-4) {
            rep.violations.push_back({strf("trajectory FD defect %.3e", worst), worst, 1e-4});
        }
    }
    finish(rep);
    return rep;
}

LemmaReport check_curl_monotonic(const ShotResult& shot, const Params& p) {
    LemmaReport rep;
    rep.id = CheckId::CurlMonotonic;
    double t_mark = 0;
    bool have_mark = false;
    for (const auto& ev : shot.trajectory.events) {
        if (ev.kind == EventKind::CriticalAngle) {
            t_mark = ev.t;
            have_mark = true;
            break;
        }
    }
    if (!have_mark) {
        rep.note = "no critical angle reached";
        return rep;
    }
    bool entered = false;
    for (const auto& s : shot.trajectory.samples) {
        if (s.t <= t_mark) continue;
        const bool inside = in_curl_region(s.state, p);
        if (!entered && !inside) continue;
        if (entered && !inside) break;
        entered = true;
        rep.cases += 1;
        if (!(s.theta_dot < 0)) {
            rep.violations.push_back(
                {strf("t=%.6f: theta_dot %.3e not negative inside curl region", s.t, s.theta_dot),
                 s.theta_dot, 0.0});
        }
    }
    if (rep.cases == 0) rep.note = "curl region never entered";
    finish(rep);
    return rep;
}

LemmaReport check_single_peak(const std::vector<ShotResult>& shots, const Params& p) {
    LemmaReport rep;
    rep.id = CheckId::SinglePeak;
    for (const auto& shot : shots) {
        rep.cases += 1;
        int markers = 0;
        for (const auto& ev : shot.trajectory.events) {
            if (ev.kind != EventKind::CriticalAngle) continue;
            markers += 1;
            rep.cases += 1;
            const DiagonalState st{ev.state[0], ev.state[1], ev.state[2]};
            const double dphi = rhs_diagonal(st, p).dphi;
            if (!(dphi < 0)) {
                rep.violations.push_back(
                    {strf("R=%.6f t=%.6f: dphi %.3e not falling at critical angle",
                          shot.trajectory.samples.front().state.x * kSqrt2, ev.t, dphi),
                     dphi, 0.0});
            }
        }
        if (markers > 1) {
            rep.violations.push_back(
                {strf("R=%.6f: %d critical-angle passes",
                      shot.trajectory.samples.front().state.x * kSqrt2, markers),
                 static_cast<double>(markers), 1.0});
        }
    }
    finish(rep);
    return rep;
}

LemmaReport check_radius_scaling(const Params& p, const IntegratorConfig& cfg) {
    LemmaReport rep;
    rep.id = CheckId::RadiusScaling;
    const double rho = explicit_solutions(p).circle_radius;
    const double factors[] = {8.0, 16.0, 32.0};

    double base_peak = 0, base_offset = 0;
    bool have_base = false;
    for (const double f : factors) {
        const double R = f * rho;
        const ShotResult shot = shoot({R, p, cfg});
        rep.cases += 1;
        if (shot.outcome != ShotOutcome::ReturnsToLine || !shot.s_max || !shot.r_at_smax) {
            rep.violations.push_back(
                {strf("R=%.3f: outcome %s without peak data", R, to_string(shot.outcome)), 0.0, 0.0});
            continue;
        }
        const double peak = *shot.s_max * R;
        const double offset = (R - *shot.r_at_smax) * R;
        if (!have_base) {
            base_peak = peak;
            base_offset = offset;
            have_base = true;
            continue;
        }
        rep.cases += 2;
        const double ratio_peak = peak / base_peak;
        const double ratio_offset = offset / base_offset;
        if (!(ratio_peak > 0.25 && ratio_peak < 4.0)) {
            rep.violations.push_back(
                {strf("R=%.3f: scaled peak ratio %.4f outside factor 4", R, ratio_peak),
                 ratio_peak, 4.0});
        }
        if (!(ratio_offset > 0.25 && ratio_offset < 4.0)) {
            rep.violations.push_back(
                {strf("R=%.3f: scaled peak-position ratio %.4f outside factor 4", R, ratio_offset),
                 ratio_offset, 4.0});
        }
    }
    finish(rep);
    return rep;
}

std::vector<LemmaReport> run_all(const Params& p, const IntegratorConfig& cfg) {
    validate(p);
    validate(cfg);
    if (p.lambda == 0.0) {
        throw std::invalid_argument("lemma guarantees require lambda < 0");
    }

    std::vector<LemmaReport> out;
    out.reserve(9);
    const bool diagonal = p.m == p.n;

    LemmaReport extrema;
    extrema.id = CheckId::ExtremaHeights;
    LemmaReport ode;
    ode.id = CheckId::OdeResidual;
    LemmaReport accel;
    accel.id = CheckId::TurningAccel;
    LemmaReport curl;
    LemmaReport peak;
    LemmaReport scaling;

    if (diagonal) {
        const double rho = explicit_solutions(p).circle_radius;

        std::vector<ShotResult> sweep_shots;
        sweep_shots.reserve(20);
        for (int i = 0; i < 20; ++i) {
            const double R = 1.1 * rho + (4.0 * rho - 1.1 * rho) * i / 19.0;
            sweep_shots.push_back(shoot({R, p, cfg}));
        }

        ClosedCurve curve;
        std::string rstar_note;
        try {
            curve = find_rstar(p, cfg);
        } catch (const ToleranceNotMet& ex) {
            curve = ex.best;
            rstar_note = "critical radius bracket did not reach tolerance";
        }
        const ShotResult rshot = shoot({curve.r_star, p, cfg});

        extrema = check_critical_heights(rshot.trajectory, p);
        for (const auto& s : sweep_shots) merge_into(extrema, check_critical_heights(s.trajectory, p));
        if (!rstar_note.empty()) {
            extrema.note = extrema.note.empty() ? rstar_note : extrema.note + "; " + rstar_note;
        }

        curl = check_curl_monotonic(rshot, p);
        peak = check_single_peak(sweep_shots, p);
        scaling = check_radius_scaling(p, cfg);
        ode = check_ode_residual(rshot.trajectory, p);
        accel = check_theta_ddot(rshot.trajectory, p);
    } else {
        const double rho = explicit_solutions(p).circle_radius;
        const ProfileState circle_start{rho * std::cos(kPi / 4), rho * std::sin(kPi / 4), -kPi / 4};
        const Trajectory circle_traj = integrate(circle_start, p, cfg, {});

        IntegratorConfig gen_cfg = cfg;
        gen_cfg.t_max = std::min(cfg.t_max, 10.0);
        const ExplicitSolutions sol = explicit_solutions(p);
        const ProfileState generic_start{1.5 * sol.line_x, 0.8 * sol.line_y, -0.3};
        const Trajectory generic_traj = integrate(generic_start, p, gen_cfg, {});

        extrema = check_critical_heights(circle_traj, p);
        merge_into(extrema, check_critical_heights(generic_traj, p));

        curl = skipped_report(CheckId::CurlMonotonic, "diagonal shooting requires m == n");
        peak = skipped_report(CheckId::SinglePeak, "diagonal shooting requires m == n");
        scaling = skipped_report(CheckId::RadiusScaling, "diagonal shooting requires m == n");
        ode = check_ode_residual(circle_traj, p);
        accel = check_theta_ddot(generic_traj, p);
    }

    LemmaReport model;
    model.id = CheckId::ModelDecay;
    for (const double eps : {0.01, 0.1, 0.5}) merge_into(model, check_model_identity(eps));

    out.push_back(std::move(extrema));
    out.push_back(check_perpendicular_approach(p, cfg));
    out.push_back(check_no_origin_line(p));
    out.push_back(std::move(curl));
    out.push_back(std::move(peak));
    out.push_back(std::move(scaling));
    out.push_back(std::move(model));
    out.push_back(std::move(ode));
    out.push_back(std::move(accel));
    return out;
}

}  // namespace lambdasurf
