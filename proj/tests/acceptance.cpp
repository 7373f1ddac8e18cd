// Acceptance gate: one line per criterion, exit 0 iff every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>

#include "lambdasurf/analysis.hpp"
#include "lambdasurf/integrator.hpp"
#include "lambdasurf/io.hpp"
#include "lambdasurf/model.hpp"
#include "lambdasurf/shooting.hpp"

namespace fs = std::filesystem;
using namespace lambdasurf;
using Clock = std::chrono::steady_clock;

namespace {

bool g_all_ok = true;

void report(int number, bool ok, double seconds, double limit, const std::string& details) {
    const bool in_time = seconds < limit;
    g_all_ok = g_all_ok && ok && in_time;
    std::printf("criterion %d: %s (%s; %.2fs of %.0fs budget)\n", number,
                ok && in_time ? "PASS" : "FAIL", details.c_str(), seconds, limit);
}

double elapsed(const Clock::time_point& t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return std::string(buf);
}

void criterion_1_explicit_solutions() {
    const auto t0 = Clock::now();
    const Params p{2, 2, -0.5};
    const ExplicitSolutions sol = explicit_solutions(p);
    bool ok = sol.line_x == 1.0 && sol.line_y == 1.0 && sol.circle_radius == 2.0;

    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const double u = 0.5 + 7.5 * i / 999.0;
        worst = std::max(worst, std::abs(rhs_xy({u, sol.line_y, 0.0}, p).dtheta));
        worst = std::max(worst, std::abs(rhs_xy({sol.line_x, u, -kPi / 2}, p).dtheta));
        const double alpha = (i + 0.5) * (kPi / 2) / 1000.0;
        const ProfileState c{2.0 * std::cos(alpha), 2.0 * std::sin(alpha), alpha - kPi / 2};
        worst = std::max(worst, std::abs(rhs_xy(c, p).dtheta + 0.5));
    }
    ok = ok && worst < 1e-12;
    report(1, ok, elapsed(t0), 1.0,
           fmt("line_x=%g line_y=%g circle=%g, max residual %.2e", sol.line_x, sol.line_y,
               sol.circle_radius, worst));
}

void criterion_2_circle_oracle() {
    const auto t0 = Clock::now();
    const Params p{2, 2, -0.5};
    const Trajectory traj = integrate(DiagonalState{2.0, 0.0, 0.0}, p, IntegratorConfig{}, {});

    double drift = 0;
    for (const auto& s : traj.samples) {
        drift = std::max(drift, std::abs(std::hypot(s.state.x, s.state.y) - 2.0));
    }
    const ProfileState end = traj.samples.back().state;
    const double angle_gap = std::abs(end.theta + kPi / 2);
    const bool guard = traj.events.back().kind == EventKind::XAxisGuard &&
                       std::abs(end.y - 1e-6) < 1e-9;
    const bool ok = drift < 1e-8 && angle_gap < 1e-2 && guard;
    report(2, ok, elapsed(t0), 1.0,
           fmt("radial drift %.2e, terminal angle gap %.2e", drift, angle_gap));
}

bool construction_succeeds(const Params& p, std::string& details) {
    const ClosedCurve curve = find_rstar(p, IntegratorConfig{});
    IntegratorConfig tight;
    tight.rel_tol /= 2;
    tight.abs_tol /= 2;
    tight.event_tol /= 2;
    const ClosedCurve fine = find_rstar(p, tight, 0.5e-10);
    const double shift = std::abs(curve.r_star - fine.r_star);

    const bool ok = curve.perp_residual < 1e-6 && curve.closure_gap < 1e-6 &&
                    curve.max_eq_residual < 1e-4 && shift < 1e-8;
    details = fmt("m=n=%d lambda=%g: r*=%.9f perp %.1e gap %.1e eq %.1e shift %.1e", p.m,
                  p.lambda, curve.r_star, curve.perp_residual, curve.closure_gap,
                  curve.max_eq_residual, shift);
    return ok;
}

void criterion_3_main_construction() {
    const auto t0 = Clock::now();
    std::string details;
    bool ok = false;
    try {
        ok = construction_succeeds(Params{2, 2, -0.5}, details);
    } catch (const std::exception& e) {
        details = e.what();
    }
    report(3, ok, elapsed(t0), 30.0, details);
}

void criterion_4_parameter_grid() {
    const auto t0 = Clock::now();
    bool ok = true;
    int done = 0;
    std::string details;
    for (const int n : {2, 3, 5}) {
        for (const double lambda : {-0.25, -0.5, -1.0}) {
            std::string row;
            try {
                if (construction_succeeds(Params{n, n, lambda}, row)) {
                    ++done;
                } else {
                    ok = false;
                    details = row;
                }
            } catch (const std::exception& e) {
                ok = false;
                details = e.what();
            }
        }
    }
    if (ok) details = fmt("%d of 9 parameter pairs succeeded", done);
    report(4, ok, elapsed(t0), 300.0, details);
}

void criterion_5_lemma_suite() {
    const auto t0 = Clock::now();
    bool ok = true;
    std::size_t violations = 0;
    std::string details;
    try {
        const auto reports = run_all(Params{2, 2, -0.5}, IntegratorConfig{});
        for (const auto& rep : reports) {
            violations += rep.violations.size();
            if (!rep.passed || rep.skipped) ok = false;
        }
        details = fmt("%zu checks, %zu violations", reports.size(), violations);
    } catch (const std::exception& e) {
        ok = false;
        details = e.what();
    }
    report(5, ok && violations == 0, elapsed(t0), 60.0, details);
}

void criterion_6_model_identity() {
    const auto t0 = Clock::now();
    bool ok = true;
    for (const double eps : {0.01, 0.1, 0.5}) {
        const LemmaReport rep = check_model_identity(eps);
        ok = ok && rep.passed;
    }
    report(6, ok, elapsed(t0), 1.0, ok ? "residual and decay rate within bounds"
                                       : "model identity violated");
}

void criterion_7_scaling() {
    const auto t0 = Clock::now();
    const Params p{2, 2, -0.5};
    double peak_lo = 1e300, peak_hi = 0, off_lo = 1e300, off_hi = 0;
    bool ok = true;
    for (const double R : {16.0, 32.0, 64.0}) {
        const ShotResult shot = shoot({R, p, IntegratorConfig{}});
        if (shot.outcome != ShotOutcome::ReturnsToLine || !shot.s_max || !shot.r_at_smax) {
            ok = false;
            continue;
        }
        const double peak = *shot.s_max * R;
        const double off = (R - *shot.r_at_smax) * R;
        peak_lo = std::min(peak_lo, peak);
        peak_hi = std::max(peak_hi, peak);
        off_lo = std::min(off_lo, off);
        off_hi = std::max(off_hi, off);
    }
    ok = ok && peak_hi / peak_lo < 4.0 && off_hi / off_lo < 4.0;
    report(7, ok, elapsed(t0), 10.0,
           fmt("s_max*R in [%.3f, %.3f], (R-r_peak)*R in [%.3f, %.3f]", peak_lo, peak_hi,
               off_lo, off_hi));
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LAMBDASURF_CLI_PATH) + " " + args;
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "<unreadable:" + path.string() + ">";
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_8_determinism() {
    const auto t0 = Clock::now();
    const fs::path dir = fs::temp_directory_path() / "lambdasurf_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string d = dir.string() + "/";
    const std::string null = " > " + d + "log.txt 2>&1";

    bool ok = true;
    std::string details = "all commands byte-identical on rerun";
    int checked = 0;

    // Seed curve input for export.
    ok = ok && run_cli("find-rstar --out " + d + "seed.json" + null) == 0;

    const std::vector<std::pair<std::string, std::vector<std::string>>> cases = {
        {"explicit --out {}", {"{}"}},
        {"shoot --R 3.5 --out {}", {"{}"}},
        {"sweep --r-from 2.2 --r-to 8 --count 6 --out {}", {"{}"}},
        {"find-rstar --out {}.json", {"{}.json", "{}.curve.csv"}},
        {"verify --out {}.csv", {"{}.csv"}},
        {"verify --format json --out {}.json", {"{}.json"}},
        {"export " + d + "seed.curve.csv --mode plot --out {}", {"{}"}},
        {"export " + d + "seed.curve.csv --mode ambient --samples 2 --out {}", {"{}"}},
    };

    auto fill = [](std::string text, const std::string& value) {
        for (std::size_t at = text.find("{}"); at != std::string::npos;
             at = text.find("{}", at + value.size())) {
            text.replace(at, 2, value);
        }
        return text;
    };

    for (std::size_t i = 0; i < cases.size() && ok; ++i) {
        const std::string stem_a = d + "c" + std::to_string(i) + "a";
        const std::string stem_b = d + "c" + std::to_string(i) + "b";
        if (run_cli(fill(cases[i].first, stem_a) + null) != 0 ||
            run_cli(fill(cases[i].first, stem_b) + null) != 0) {
            ok = false;
            details = "command failed: " + cases[i].first;
            break;
        }
        for (const auto& artifact : cases[i].second) {
            if (slurp(fill(artifact, stem_a)) != slurp(fill(artifact, stem_b))) {
                ok = false;
                details = "byte mismatch: " + cases[i].first;
                break;
            }
            ++checked;
        }
    }
    if (ok) details = fmt("%d artifacts byte-identical across reruns", checked);
    report(8, ok, elapsed(t0), 120.0, details);
}

}  // namespace

int main() {
    criterion_1_explicit_solutions();
    criterion_2_circle_oracle();
    criterion_3_main_construction();
    criterion_4_parameter_grid();
    criterion_5_lemma_suite();
    criterion_6_model_identity();
    criterion_7_scaling();
    criterion_8_determinism();
    return g_all_ok ? 0 : 1;
}
