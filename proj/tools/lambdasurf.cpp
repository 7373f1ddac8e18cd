#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lambdasurf/analysis.hpp"
#include "lambdasurf/integrator.hpp"
#include "lambdasurf/io.hpp"
#include "lambdasurf/model.hpp"
#include "lambdasurf/shooting.hpp"

namespace {

using namespace lambdasurf;

struct Options {
    Params params;
    IntegratorConfig cfg;
    std::string out;
    std::string format = "csv";

    double R = 0;
    double r_from = 0;
    double r_to = 0;
    int count = 20;
    double r_tol = 1e-10;
    int max_iter = 200;
    std::string input;
    std::string mode = "plot";
    int samples = 10;
    std::uint64_t seed = kAmbientSeedDefault;
};

std::string curve_csv_path(const std::string& json_path) {
    const auto slash = json_path.find_last_of('/');
    const auto dot = json_path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return json_path + ".curve.csv";
    }
    return json_path.substr(0, dot) + ".curve.csv";
}

int cmd_explicit(const Options& o) {
    validate(o.params);
    const ExplicitSolutions sol = explicit_solutions(o.params);

    double res_line_y = 0, res_line_x = 0, res_circle = 0;
    for (int i = 0; i < 1000; ++i) {
        const double u = 0.5 + 7.5 * i / 999.0;
        res_line_y = std::max(res_line_y, std::abs(rhs_xy({u, sol.line_y, 0.0}, o.params).dtheta));
        res_line_x =
            std::max(res_line_x, std::abs(rhs_xy({sol.line_x, u, -kPi / 2}, o.params).dtheta));
        const double alpha = (i + 0.5) * (kPi / 2) / 1000.0;
        const ProfileState on_circle{sol.circle_radius * std::cos(alpha),
                                     sol.circle_radius * std::sin(alpha), alpha - kPi / 2};
        res_circle = std::max(
            res_circle, std::abs(rhs_xy(on_circle, o.params).dtheta + 1.0 / sol.circle_radius));
    }

    std::string text;
    text += "line_x=" + fmt17(sol.line_x) + "\n";
    text += "line_y=" + fmt17(sol.line_y) + "\n";
    text += "circle_radius=" + fmt17(sol.circle_radius) + "\n";
    text += "max_residual_line_x=" + fmt17(res_line_x) + "\n";
    text += "max_residual_line_y=" + fmt17(res_line_y) + "\n";
    text += "max_residual_circle=" + fmt17(res_circle) + "\n";
    std::fputs(text.c_str(), stdout);

    if (!o.out.empty()) {
        if (o.format == "json") {
            nlohmann::json j;
            j["line_x"] = sol.line_x;
            j["line_y"] = sol.line_y;
            j["circle_radius"] = sol.circle_radius;
            j["max_residual_line_x"] = res_line_x;
            j["max_residual_line_y"] = res_line_y;
            j["max_residual_circle"] = res_circle;
            write_text_file(o.out, j.dump(2) + "\n");
        } else {
            write_text_file(o.out, text);
        }
    }
    const bool ok = res_line_x < 1e-10 && res_line_y < 1e-10 && res_circle < 1e-10;
    return ok ? 0 : 2;
}

int cmd_shoot(const Options& o) {
    validate(o.params);
    validate(o.cfg);
    const ShotResult shot = shoot({o.R, o.params, o.cfg});
    if (!o.out.empty()) {
        write_text_file(o.out, samples_csv(shot.trajectory.samples));
    }
    const ProfileState term = from_diagonal(shot.terminal);
    std::printf("outcome=%s T=%.17g r=%.17g s=%.17g phi=%.17g x=%.17g y=%.17g theta=%.17g\n",
                to_string(shot.outcome), shot.T, shot.terminal.r, shot.terminal.s,
                shot.terminal.phi, term.x, term.y, term.theta);
    return 0;
}

int cmd_sweep(const Options& o) {
    validate(o.params);
    validate(o.cfg);
    if (o.count < 0) throw std::invalid_argument("count must be >= 0");
    if (o.count > 0 && (!(o.r_from > 0) || !(o.r_to > 0))) {
        throw std::invalid_argument("sweep radii must be positive");
    }

    std::vector<double> radii;
    radii.reserve(static_cast<std::size_t>(o.count));
    for (int i = 0; i < o.count; ++i) {
        radii.push_back(o.count == 1
                            ? o.r_from
                            : o.r_from + (o.r_to - o.r_from) * i / (o.count - 1.0));
    }
    const auto rows = sweep(o.params, o.cfg, radii);
    const std::string csv = sweep_csv(rows);
    if (!o.out.empty()) {
        write_text_file(o.out, csv);
    } else {
        std::fputs(csv.c_str(), stdout);
    }

    if (o.count == 0) return 0;
    for (const auto& row : rows) {
        if (row.error.empty()) return 0;
    }
    return 2;
}

int cmd_find_rstar(const Options& o) {
    validate(o.params);
    validate(o.cfg);
    bool tol_ok = true;
    ClosedCurve curve;
    try {
        curve = find_rstar(o.params, o.cfg, o.r_tol, o.max_iter);
    } catch (const ToleranceNotMet& ex) {
        curve = ex.best;
        tol_ok = false;
        std::fprintf(stderr, "%s\n", ex.what());
    }

    const std::string json = curve_json_text(curve, o.params);
    if (!o.out.empty()) {
        write_text_file(o.out, json);
        write_text_file(curve_csv_path(o.out), samples_csv(curve.points));
        std::printf("r_star=%.17g perp_residual=%.3g closure_gap=%.3g max_eq_residual=%.3g "
                    "n_samples=%zu\n",
                    curve.r_star, curve.perp_residual, curve.closure_gap, curve.max_eq_residual,
                    curve.points.size());
    } else {
        std::fputs(json.c_str(), stdout);
    }
    return tol_ok ? 0 : 3;
}

int cmd_verify(const Options& o) {
    validate(o.params);
    validate(o.cfg);
    const auto reports = run_all(o.params, o.cfg);
    std::fputs(report_table(reports).c_str(), stdout);
    if (!o.out.empty()) {
        write_text_file(o.out, o.format == "json" ? report_json_text(reports)
                                                  : report_csv(reports));
    }
    for (const auto& rep : reports) {
        if (!rep.skipped && !rep.passed) return 2;
    }
    return 0;
}

int cmd_export(const Options& o) {
    const auto pts = read_curve_csv(o.input);
    const std::string csv = o.mode == "plot"
                                ? plot_csv(pts)
                                : ambient_csv(pts, o.params, o.samples, o.seed);
    if (!o.out.empty()) {
        write_text_file(o.out, csv);
    } else {
        std::fputs(csv.c_str(), stdout);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotationally symmetric lambda-hypersurface generating curves: "
                 "closed-form solutions, shooting, closed-curve construction, verification"};
    app.require_subcommand(1);

    Options o;
    app.add_option("--m", o.params.m, "multiplicity of the first sphere factor")
        ->capture_default_str();
    app.add_option("--n", o.params.n, "multiplicity of the second sphere factor")
        ->capture_default_str();
    app.add_option("--lambda", o.params.lambda, "curvature offset constant, must be <= 0")
        ->capture_default_str();
    app.add_option("--rel-tol", o.cfg.rel_tol, "relative integration tolerance")
        ->capture_default_str();
    app.add_option("--abs-tol", o.cfg.abs_tol, "absolute integration tolerance")
        ->capture_default_str();
    app.add_option("--y-stop", o.cfg.y_stop, "horizontal-axis guard height")
        ->capture_default_str();
    app.add_option("--t-max", o.cfg.t_max, "arclength budget per trajectory")
        ->capture_default_str();
    app.add_option("--out", o.out, "write results to this path")->capture_default_str();
    app.add_option("--format", o.format, "report file format for verify: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.set_config("--config", "", "key=value config file; command-line flags override it");

    auto* c_explicit =
        app.add_subcommand("explicit", "closed-form solutions and their equation residuals");
    c_explicit->fallthrough();

    auto* c_shoot = app.add_subcommand("shoot", "integrate one shot from the diagonal line");
    c_shoot->fallthrough();
    c_shoot->add_option("--R", o.R, "initial radius on the diagonal line")->required();

    auto* c_sweep = app.add_subcommand("sweep", "classify shots across a range of radii");
    c_sweep->fallthrough();
    c_sweep->add_option("--r-from", o.r_from, "first radius")->required();
    c_sweep->add_option("--r-to", o.r_to, "last radius")->required();
    c_sweep->add_option("--count", o.count, "number of radii")->capture_default_str();

    auto* c_find = app.add_subcommand(
        "find-rstar", "bisect for the critical radius and assemble the closed curve");
    c_find->fallthrough();
    c_find->add_option("--r-tol", o.r_tol, "bracket width target")->capture_default_str();
    c_find->add_option("--max-iter", o.max_iter, "bisection iteration cap")
        ->capture_default_str();

    auto* c_verify = app.add_subcommand("verify", "run the full property-check suite");
    c_verify->fallthrough();

    auto* c_export =
        app.add_subcommand("export", "turn a curve file into plot or ambient point data");
    c_export->fallthrough();
    c_export->add_option("input", o.input, "curve CSV produced by find-rstar or shoot")
        ->required();
    c_export->add_option("--mode", o.mode, "plot (mirrored polygon) or ambient (sphere samples)")
        ->check(CLI::IsMember({"plot", "ambient"}))
        ->capture_default_str();
    c_export->add_option("--samples", o.samples, "ambient points per curve point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_export->add_option("--seed", o.seed, "ambient sampling seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    }

    try {
        if (app.got_subcommand(c_explicit)) return cmd_explicit(o);
        if (app.got_subcommand(c_shoot)) return cmd_shoot(o);
        if (app.got_subcommand(c_sweep)) return cmd_sweep(o);
        if (app.got_subcommand(c_find)) return cmd_find_rstar(o);
        if (app.got_subcommand(c_verify)) return cmd_verify(o);
        if (app.got_subcommand(c_export)) return cmd_export(o);
    } catch (const BracketFailure& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const NoProgress& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const DomainCollapse& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
    return 1;
}
