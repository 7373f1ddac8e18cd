#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lambdasurf/integrator.hpp"
#include "lambdasurf/model.hpp"

namespace lambdasurf {

struct ShotSpec {
    double R = 0;  // initial position on the diagonal line
    Params params; // m == n required
    IntegratorConfig config;
};

enum class ShotOutcome { ReturnsToLine, AngleFloor, AngleCeiling, HitsXAxis, StepLimit };

const char* to_string(ShotOutcome o);

struct ShotResult {
    ShotOutcome outcome = ShotOutcome::StepLimit;
    double T = 0;            // terminal arclength
    DiagonalState terminal;
    std::optional<double> s_max;      // displacement at the first critical-angle marker
    std::optional<double> r_at_smax;  // position along the line at that marker
    Trajectory trajectory;
};

// Closed loop assembled from a returning shot and its mirror image across the line.
struct ClosedCurve {
    double r_star = 0;
    std::vector<TrajectorySample> points;  // closed loop; last point joins back to first
    double closure_gap = 0;      // worst endpoint mismatch at the two line junctions
    double perp_residual = 0;    // |phi + pi| at the return crossing
    double max_eq_residual = 0;  // worst finite-difference defect of the turning equation
    std::array<double, 2> bracket{0, 0};
    int iterations = 0;
};

// Doubling reached the radius cap without finding a returning shot.
struct BracketFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bisection stalled before reaching r_tol; carries the best curve found.
struct ToleranceNotMet : std::runtime_error {
    ClosedCurve best;
    ToleranceNotMet(const std::string& what, ClosedCurve curve)
        : std::runtime_error(what), best(std::move(curve)) {}
};

// Integrates one shot from (r=R, s=0, phi=0) and classifies its fate.
// A start with dphi(0) >= 0 reports AngleCeiling at T=0 without integrating.
ShotResult shoot(const ShotSpec& spec);

// Mirrors a returning shot across the line, traversed in reverse, and closes the loop.
ClosedCurve reflect_and_close(const ShotResult& shot);

// Brackets the critical radius between the circle radius and a doubled returning
// radius, bisects on the returning/non-returning outcome, and assembles the curve
// from the last returning shot.
ClosedCurve find_rstar(const Params& p, const IntegratorConfig& cfg, double r_tol = 1e-10,
                       int max_iter = 200);

struct SweepRow {
    double R = 0;
    ShotOutcome outcome = ShotOutcome::StepLimit;
    double phi_end = 0;
    std::optional<double> s_max;
    double T = 0;
    std::string error;  // nonempty when the shot failed; other fields then unset
};

// One classified shot per radius, input order preserved; failures are captured per row.
std::vector<SweepRow> sweep(const Params& p, const IntegratorConfig& cfg,
                            const std::vector<double>& R_values);

}  // namespace lambdasurf
