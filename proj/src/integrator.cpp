#include "lambdasurf/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lambdasurf {

void validate(const IntegratorConfig& c) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0)) throw std::invalid_argument(std::string(name) + " must be positive");
    };
    positive(c.rel_tol, "rel_tol");
    positive(c.abs_tol, "abs_tol");
    positive(c.max_step, "max_step");
    positive(c.event_tol, "event_tol");
    positive(c.t_max, "t_max");
    positive(c.s_arm, "s_arm");
    if (!(c.y_stop >= kDomainEps)) throw std::invalid_argument("y_stop must be >= domain floor");
    if (!(c.x_stop >= kDomainEps)) throw std::invalid_argument("x_stop must be >= domain floor");
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::LineCross: return "LineCross";
        case EventKind::AngleCeiling: return "AngleCeiling";
        case EventKind::AngleFloor: return "AngleFloor";
        case EventKind::CriticalAngle: return "CriticalAngle";
        case EventKind::ThetaZero: return "ThetaZero";
        case EventKind::XAxisGuard: return "XAxisGuard";
        case EventKind::YAxisGuard: return "YAxisGuard";
        case EventKind::StepLimit: return "StepLimit";
    }
    return "?";
}

Vec3 DenseStep::eval(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        out[i] = rcont[0][i] +
                 s * (rcont[1][i] + s1 * (rcont[2][i] + s * (rcont[3][i] + s1 * rcont[4][i])));
    }
    return out;
}

Vec3 Trajectory::dense_eval(double t) const {
    if (steps.empty() || t < steps.front().t0 - 1e-12 || t > t_end() + 1e-12) {
        throw std::out_of_range("t outside the integrated span");
    }
    // Last step whose start does not exceed t.
    auto it = std::upper_bound(steps.begin(), steps.end(), t,
                               [](double v, const DenseStep& d) { return v < d.t0; });
    if (it != steps.begin()) --it;
    return it->eval(std::clamp(t, it->t0, it->t0 + it->h));
}

ProfileState Trajectory::dense_profile(double t) const {
    const Vec3 v = dense_eval(t);
    if (chart == Chart::Profile) return {v[0], v[1], v[2]};
    return from_diagonal({v[0], v[1], v[2]});
}

namespace {

// Dormand-Prince 5(4) tableau with the quartic continuous extension.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;
constexpr double kD1 = -12715105075.0 / 11282082432.0;
constexpr double kD3 = 87487479700.0 / 32700410799.0;
constexpr double kD4 = -10690763975.0 / 1880347072.0;
constexpr double kD5 = 701980252875.0 / 199316789632.0;
constexpr double kD6 = -1453857185.0 / 822651844.0;
constexpr double kD7 = 69997945.0 / 29380423.0;

// Chord/arclength agreement budget: a step turning through angle kappa*h shortens the
// chord by ~(kappa*h)^2/24, so kappa*h <= 4.4e-3 keeps the deficit under 1e-6.
constexpr double kTurnSoft = 3.2e-3;  // proactive cap from the turning rate at the step start
constexpr double kTurnHard = 4.4e-3;  // reject when the stage maximum exceeds this
constexpr double kMinStep = 1e-14;

Vec3 eval_rhs(Chart chart, const Vec3& y, const Params& p) {
    if (chart == Chart::Profile) {
        const ProfileRates r = rhs_xy({y[0], y[1], y[2]}, p);
        return {r.dx, r.dy, r.dtheta};
    }
    const DiagonalRates r = rhs_diagonal({y[0], y[1], y[2]}, p);
    return {r.dr, r.ds, r.dphi};
}

double min_xy(Chart chart, const Vec3& y) {
    if (chart == Chart::Profile) return std::min(y[0], y[1]);
    return (y[0] - std::abs(y[1])) / kSqrt2;
}

TrajectorySample make_sample(Chart chart, double t, const Vec3& y, const Params& p) {
    const Vec3 rate = eval_rhs(chart, y, p);
    if (chart == Chart::Profile) return {t, {y[0], y[1], y[2]}, rate[2]};
    return {t, from_diagonal({y[0], y[1], y[2]}), rate[2]};
}

bool crossed_falling(double ga, double gb) { return ga > 0 && gb <= 0; }
bool crossed_rising(double ga, double gb) { return ga < 0 && gb >= 0; }

bool crossed(double ga, double gb, EventSpec::Direction dir) {
    switch (dir) {
        case EventSpec::Direction::Falling: return crossed_falling(ga, gb);
        case EventSpec::Direction::Rising: return crossed_rising(ga, gb);
        case EventSpec::Direction::Either:
            return crossed_falling(ga, gb) || crossed_rising(ga, gb);
    }
    return false;
}

struct Hit {
    double t = 0;
    int spec = -1;
    bool terminal = false;
};

// Sign-bracketed bisection on the continuous extension down to event_tol.
double localize(const DenseStep& dense, const EventSpec& ev, double ta, double tb,
                double ga, double gb, double event_tol) {
    EventSpec::Direction dir = ev.direction;
    if (dir == EventSpec::Direction::Either) {
        dir = crossed_falling(ga, gb) ? EventSpec::Direction::Falling
                                      : EventSpec::Direction::Rising;
    }
    for (int i = 0; i < 200 && tb - ta > event_tol; ++i) {
        const double tm = 0.5 * (ta + tb);
        const double gm = ev.predicate(tm, dense.eval(tm));
        if (crossed(ga, gm, dir)) {
            tb = tm;
            gb = gm;
        } else {
            ta = tm;
            ga = gm;
        }
    }
    return tb;
}

struct Engine {
    Chart chart;
    Params params;
    IntegratorConfig cfg;
    std::vector<EventSpec> specs;
    std::vector<bool> armed;
    std::vector<double> arm_t;
    Trajectory out;

    Engine(Chart c, const Params& p, const IntegratorConfig& conf, std::vector<EventSpec> evs)
        : chart(c), params(p), cfg(conf), specs(std::move(evs)) {
        auto has_kind = [&](EventKind k) {
            return std::any_of(specs.begin(), specs.end(),
                               [k](const EventSpec& e) { return e.kind == k; });
        };
        if (!has_kind(EventKind::XAxisGuard)) specs.push_back(make_x_axis_guard(chart, cfg));
        if (!has_kind(EventKind::YAxisGuard)) specs.push_back(make_y_axis_guard(chart, cfg));
        armed.assign(specs.size(), false);
        arm_t.assign(specs.size(), 0.0);
        for (size_t i = 0; i < specs.size(); ++i) {
            if (!specs[i].arm) armed[i] = true, arm_t[i] = -1.0;
        }
        out.params = p;
        out.chart = c;
    }

    Vec3 rhs(const Vec3& y) const { return eval_rhs(chart, y, params); }

    Vec3 rhs_stage(const Vec3& y) const {
        try {
            return rhs(y);
        } catch (const DomainError& e) {
            throw DomainCollapse(std::string("stage evaluation left the domain: ") + e.what());
        }
    }

    void record_event(double t, int spec, const Vec3& state, bool simultaneous) {
        out.events.push_back({t, specs[spec].kind, state, simultaneous});
    }

    void push_sample(double t, const Vec3& y) {
        if (!out.samples.empty() && t - out.samples.back().t < 1e-15) return;
        out.samples.push_back(make_sample(chart, t, y, params));
    }

    // Scans one accepted step for events. Returns true (and truncates) on a terminal hit.
    bool scan_events(const DenseStep& dense, const Vec3& y0, const Vec3& y1) {
        constexpr int kNodes = 5;
        double tn[kNodes];
        Vec3 yn[kNodes];
        for (int j = 0; j < kNodes; ++j) {
            tn[j] = dense.t0 + dense.h * j / (kNodes - 1);
            yn[j] = j == 0 ? y0 : (j == kNodes - 1 ? y1 : dense.eval(tn[j]));
        }
        std::vector<Hit> hits;
        for (size_t i = 0; i < specs.size(); ++i) {
            const EventSpec& ev = specs[i];
            double g[kNodes];
            for (int j = 0; j < kNodes; ++j) g[j] = ev.predicate(tn[j], yn[j]);
            if (!armed[i] && ev.arm) {
                for (int j = 0; j < kNodes; ++j) {
                    if (ev.arm(tn[j], yn[j])) {
                        armed[i] = true;
                        arm_t[i] = tn[j];
                        break;
                    }
                }
            }
            if (!armed[i]) continue;
            for (int j = 0; j + 1 < kNodes; ++j) {
                if (tn[j] < arm_t[i]) continue;
                if (!crossed(g[j], g[j + 1], ev.direction)) continue;
                const double te = localize(dense, ev, tn[j], tn[j + 1], g[j], g[j + 1],
                                           cfg.event_tol);
                hits.push_back({te, static_cast<int>(i), ev.terminal});
            }
        }
        if (hits.empty()) return false;
        std::sort(hits.begin(), hits.end(), [this](const Hit& a, const Hit& b) {
            if (a.t != b.t) return a.t < b.t;
            return specs[a.spec].kind < specs[b.spec].kind;
        });
        const Hit* chosen = nullptr;
        double t_first_terminal = std::numeric_limits<double>::infinity();
        for (const Hit& h : hits) {
            if (h.terminal) {
                t_first_terminal = std::min(t_first_terminal, h.t);
            }
        }
        if (std::isfinite(t_first_terminal)) {
            for (const Hit& h : hits) {
                if (!h.terminal || h.t > t_first_terminal + cfg.event_tol) continue;
                if (!chosen || specs[h.spec].kind < specs[chosen->spec].kind) chosen = &h;
            }
        }
        const double t_cut = chosen ? chosen->t : std::numeric_limits<double>::infinity();
        for (const Hit& h : hits) {
            if (h.terminal || h.t > t_cut) continue;
            record_event(h.t, h.spec, dense.eval(h.t), false);
        }
        if (!chosen) return false;
        const Vec3 terminal_state = dense.eval(chosen->t);
        record_event(chosen->t, chosen->spec, terminal_state, false);
        for (const Hit& h : hits) {
            if (!h.terminal || h.spec == chosen->spec ||
                h.t > t_first_terminal + cfg.event_tol) {
                continue;
            }
            record_event(chosen->t, h.spec, terminal_state, true);
        }
        push_sample(chosen->t, terminal_state);
        return true;
    }

    Trajectory run(Vec3 y) {
        double t = 0;
        Vec3 k1 = rhs(y);  // initial-state domain errors propagate to the caller
        push_sample(t, y);
        // Arm checks see the initial point too.
        for (size_t i = 0; i < specs.size(); ++i) {
            if (!armed[i] && specs[i].arm && specs[i].arm(t, y)) {
                armed[i] = true;
                arm_t[i] = t;
            }
        }
        double h = std::min({cfg.max_step, 1e-2, min_xy(chart, y) / 4,
                             kTurnSoft / std::max(std::abs(k1[2]), 1e-3)});
        bool rejected_last = false;
        while (true) {
            if (t >= cfg.t_max - 1e-15) {
                const int slot = find_or_add_step_limit();
                record_event(cfg.t_max, slot, y, false);
                return std::move(out);
            }
            h = std::min({h, cfg.max_step, min_xy(chart, y) / 4,
                          kTurnSoft / std::max(std::abs(k1[2]), 1e-3)});
            bool capped_to_end = false;
            if (t + h >= cfg.t_max) {
                h = cfg.t_max - t;
                capped_to_end = true;
            }
            if (h < kMinStep) throw NoProgress("step size underflow at t=" + std::to_string(t));

            Vec3 k2, k3, k4, k5, k6, k7, y1;
            Vec3 tmp;
            for (int i = 0; i < 3; ++i) tmp[i] = y[i] + h * kA21 * k1[i];
            k2 = rhs_stage(tmp);
            for (int i = 0; i < 3; ++i) tmp[i] = y[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
            k3 = rhs_stage(tmp);
            for (int i = 0; i < 3; ++i)
                tmp[i] = y[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
            k4 = rhs_stage(tmp);
            for (int i = 0; i < 3; ++i)
                tmp[i] = y[i] + h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] + kA54 * k4[i]);
            k5 = rhs_stage(tmp);
            for (int i = 0; i < 3; ++i)
                tmp[i] = y[i] + h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] +
                                     kA64 * k4[i] + kA65 * k5[i]);
            k6 = rhs_stage(tmp);
            for (int i = 0; i < 3; ++i)
                y1[i] = y[i] + h * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] + kB5 * k5[i] +
                                    kB6 * k6[i]);
            k7 = rhs_stage(y1);

            double err = 0;
            for (int i = 0; i < 3; ++i) {
                const double ei = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] +
                                       kE5 * k5[i] + kE6 * k6[i] + kE7 * k7[i]);
                const double sc = cfg.abs_tol +
                                  cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
                err += (ei / sc) * (ei / sc);
            }
            err = std::sqrt(err / 3);

            const double turn = std::max({std::abs(k1[2]), std::abs(k2[2]), std::abs(k3[2]),
                                          std::abs(k4[2]), std::abs(k5[2]), std::abs(k6[2]),
                                          std::abs(k7[2])});
            if (turn * h > kTurnHard) {
                h = kTurnSoft / turn;
                rejected_last = true;
                continue;
            }
            if (err > 1.0) {
                h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
                rejected_last = true;
                continue;
            }

            DenseStep dense;
            dense.t0 = t;
            dense.h = h;
            for (int i = 0; i < 3; ++i) {
                const double ydiff = y1[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                dense.rcont[0][i] = y[i];
                dense.rcont[1][i] = ydiff;
                dense.rcont[2][i] = bspl;
                dense.rcont[3][i] = ydiff - h * k7[i] - bspl;
                dense.rcont[4][i] = h * (kD1 * k1[i] + kD3 * k3[i] + kD4 * k4[i] +
                                         kD5 * k5[i] + kD6 * k6[i] + kD7 * k7[i]);
            }
            out.steps.push_back(dense);
            if (scan_events(dense, y, y1)) return std::move(out);

            t = capped_to_end ? cfg.t_max : t + h;
            y = y1;
            k1 = k7;
            push_sample(t, y);
            double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.2);
            fac = std::clamp(fac, 0.2, 5.0);
            if (rejected_last) fac = std::min(fac, 1.0);
            rejected_last = false;
            h *= fac;
        }
    }

    // StepLimit has no user spec; give it a synthetic slot so record_event works.
    int find_or_add_step_limit() {
        for (size_t i = 0; i < specs.size(); ++i) {
            if (specs[i].kind == EventKind::StepLimit) return static_cast<int>(i);
        }
        EventSpec ev;
        ev.kind = EventKind::StepLimit;
        specs.push_back(ev);
        armed.push_back(true);
        arm_t.push_back(-1.0);
        return static_cast<int>(specs.size()) - 1;
    }
};

}  // namespace

Trajectory integrate(const ProfileState& init, const Params& p, const IntegratorConfig& cfg,
                     const std::vector<EventSpec>& events) {
    validate(p);
    validate(cfg);
    Engine engine(Chart::Profile, p, cfg, events);
    return engine.run({init.x, init.y, init.theta});
}

Trajectory integrate(const DiagonalState& init, const Params& p, const IntegratorConfig& cfg,
                     const std::vector<EventSpec>& events) {
    validate(p);
    validate(cfg);
    Engine engine(Chart::Diagonal, p, cfg, events);
    return engine.run({init.r, init.s, init.phi});
}

namespace {

double s_coord(Chart chart, const Vec3& y) {
    return chart == Chart::Diagonal ? y[1] : (y[0] - y[1]) / kSqrt2;
}

double phi_coord(Chart chart, const Vec3& y) {
    return chart == Chart::Diagonal ? y[2] : y[2] + kPi / 4;
}

double x_coord(Chart chart, const Vec3& y) {
    return chart == Chart::Profile ? y[0] : (y[0] + y[1]) / kSqrt2;
}

double y_coord(Chart chart, const Vec3& y) {
    return chart == Chart::Profile ? y[1] : (y[0] - y[1]) / kSqrt2;
}

}  // namespace

EventSpec make_line_cross(Chart chart, const IntegratorConfig& cfg) {
    EventSpec ev;
    ev.kind = EventKind::LineCross;
    ev.predicate = [chart](double, const Vec3& y) { return s_coord(chart, y); };
    ev.direction = EventSpec::Direction::Falling;
    ev.terminal = true;
    const double s_arm = cfg.s_arm;
    ev.arm = [chart, s_arm](double, const Vec3& y) { return s_coord(chart, y) >= s_arm; };
    return ev;
}

EventSpec make_angle_ceiling(Chart chart) {
    EventSpec ev;
    ev.kind = EventKind::AngleCeiling;
    ev.predicate = [chart](double, const Vec3& y) { return phi_coord(chart, y); };
    ev.direction = EventSpec::Direction::Rising;
    ev.terminal = true;
    return ev;
}

EventSpec make_angle_floor(Chart chart) {
    EventSpec ev;
    ev.kind = EventKind::AngleFloor;
    ev.predicate = [chart](double, const Vec3& y) { return phi_coord(chart, y) + kPi; };
    ev.direction = EventSpec::Direction::Falling;
    ev.terminal = true;
    return ev;
}

EventSpec make_critical_angle(Chart chart) {
    EventSpec ev;
    ev.kind = EventKind::CriticalAngle;
    ev.predicate = [chart](double, const Vec3& y) { return phi_coord(chart, y) + kPi / 2; };
    ev.direction = EventSpec::Direction::Either;
    ev.terminal = false;
    return ev;
}

EventSpec make_theta_zero(Chart chart) {
    EventSpec ev;
    ev.kind = EventKind::ThetaZero;
    ev.predicate = [chart](double, const Vec3& y) {
        return std::sin(phi_coord(chart, y) - kPi / 4);
    };
    ev.direction = EventSpec::Direction::Either;
    ev.terminal = false;
    return ev;
}

EventSpec make_x_axis_guard(Chart chart, const IntegratorConfig& cfg) {
    EventSpec ev;
    ev.kind = EventKind::XAxisGuard;
    const double y_stop = cfg.y_stop;
    ev.predicate = [chart, y_stop](double, const Vec3& y) {
        return y_coord(chart, y) - y_stop;
    };
    ev.direction = EventSpec::Direction::Falling;
    ev.terminal = true;
    return ev;
}

EventSpec make_y_axis_guard(Chart chart, const IntegratorConfig& cfg) {
    EventSpec ev;
    ev.kind = EventKind::YAxisGuard;
    const double x_stop = cfg.x_stop;
    ev.predicate = [chart, x_stop](double, const Vec3& y) {
        return x_coord(chart, y) - x_stop;
    };
    ev.direction = EventSpec::Direction::Falling;
    ev.terminal = true;
    return ev;
}

}  // namespace lambdasurf
