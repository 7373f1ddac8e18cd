#pragma once

#include <string>
#include <vector>

#include "lambdasurf/integrator.hpp"
#include "lambdasurf/model.hpp"
#include "lambdasurf/shooting.hpp"

namespace lambdasurf {

enum class CheckId {
    ExtremaHeights,     // tangency extrema sit on the correct side of the invariant heights
    AxisPerpendicular,  // circle-start shots meet the axis ever closer to perpendicular
    NoOriginLines,      // no line through the origin solves the system
    CurlMonotonic,      // turning rate stays negative past the critical angle
    SinglePeak,         // at most one critical angle per shot, always a maximum
    RadiusScaling,      // peak displacement scales like 1/R for large R
    ModelDecay,         // closed-form comparison angle obeys its equation and decay rate
    OdeResidual,        // finite-difference turning defect stays at truncation level
    TurningAccel,       // analytic second derivative of theta matches finite differences
};

const char* to_string(CheckId id);

struct Violation {
    std::string input;
    double measured = 0;
    double threshold = 0;
};

struct LemmaReport {
    CheckId id = CheckId::ExtremaHeights;
    int cases = 0;
    std::vector<Violation> violations;
    bool passed = true;  // passed <=> violations empty
    bool skipped = false;
    std::string note;
};

// Locates every interior tangency (horizontal and vertical) on the trajectory and
// asserts each extremum lies on the correct side of its orientation's invariant
// height, excluding a 1e-6 band around the exact threshold.
LemmaReport check_critical_heights(const Trajectory& traj, const Params& p);

// Integrates the circle-start trajectory with guard heights 1e-2..1e-5 and asserts
// the terminal angle approaches perpendicular monotonically.
LemmaReport check_perpendicular_approach(const Params& p, const IntegratorConfig& cfg);

// Samples the turning residual along y = k*x for 100 slopes: no slope yields a
// solution; away from the balance slope the residual visibly varies with x, and the
// two axis-parallel invariant lines give zero residual.
LemmaReport check_no_origin_line(const Params& p);

// Compares a finite-difference second derivative of theta against the analytic
// expression on a uniform resampling, and checks the sign condition at near-critical
// points inside the curl region.
LemmaReport check_theta_ddot(const Trajectory& traj, const Params& p);

// Verifies the comparison angle phi(tau) = -2*atan(tanh((1-eps)*tau/4)) satisfies
// phi' = -((1-eps)/2) cos phi on a grid and decays at rate (1-eps)/2.
LemmaReport check_model_identity(double eps);

// Finite-difference turning-equation defect on exact solutions and on a trajectory.
LemmaReport check_ode_residual(const Trajectory& traj, const Params& p);

// Turning rate stays negative on the curl region entered after the critical angle.
LemmaReport check_curl_monotonic(const ShotResult& shot, const Params& p);

// Every shot carries at most one critical-angle marker and the angle is falling there.
LemmaReport check_single_peak(const std::vector<ShotResult>& shots, const Params& p);

// Peak displacement and its position obey the large-radius scaling within factor 4.
LemmaReport check_radius_scaling(const Params& p, const IntegratorConfig& cfg);

// Runs every check; reports come back in CheckId order, one per id. Checks that
// need the diagonal shooting problem are skipped (not failed) when m != n.
// Throws std::invalid_argument when lambda == 0: the guarantees need lambda < 0.
std::vector<LemmaReport> run_all(const Params& p, const IntegratorConfig& cfg);

}  // namespace lambdasurf
