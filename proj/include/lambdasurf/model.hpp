#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace lambdasurf {

// Hard floor for x and y inside RHS evaluation; below it the ODE is treated as singular.
inline constexpr double kDomainEps = 1e-9;
inline constexpr double kSqrt2 = 1.4142135623730951;
inline constexpr double kPi = 3.14159265358979323846;

// The state reached a coordinate singularity (x or y at the axis floor).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rotational multiplicities and the curvature offset constant.
// lambda < 0 is required for every verified property; lambda == 0 is the
// self-shrinker comparison case and runs outside those guarantees.
struct Params {
    int m = 2;
    int n = 2;
    double lambda = -0.5;
};

void validate(const Params& p);
inline bool self_shrinker_mode(const Params& p) { return p.lambda == 0.0; }

// Generating-curve phase point in first-quadrant profile coordinates.
// theta is the tangent angle (x' = cos theta, y' = sin theta), kept unwrapped.
struct ProfileState {
    double x = 0;
    double y = 0;
    double theta = 0;
};

// Phase point in coordinates adapted to the diagonal line y = x:
// r along the line, s across it, phi = theta + pi/4. Valid iff r > |s|.
struct DiagonalState {
    double r = 0;
    double s = 0;
    double phi = 0;
};

DiagonalState to_diagonal(const ProfileState& ps);
ProfileState from_diagonal(const DiagonalState& ds);

struct ProfileRates {
    double dx = 0;
    double dy = 0;
    double dtheta = 0;
};

struct DiagonalRates {
    double dr = 0;
    double ds = 0;
    double dphi = 0;
};

// Unit-speed generating-curve system in profile coordinates.
ProfileRates rhs_xy(const ProfileState& st, const Params& p);

// Same dynamics in diagonal coordinates; defined for m == n only.
DiagonalRates rhs_diagonal(const DiagonalState& st, const Params& p);

// The three closed-form solutions: horizontal line, vertical line, circle about the origin.
// Each is invariant only in its stated orientation (theta = 0, theta = -pi/2, clockwise).
struct ExplicitSolutions {
    double line_y = 0;
    double line_x = 0;
    double circle_radius = 0;
};

ExplicitSolutions explicit_solutions(const Params& p);

// Invariant heights for the reversed orientations (theta = pi and theta = +pi/2).
double line_y_reversed(const Params& p);
double line_x_reversed(const Params& p);

// One integration sample: arclength, state, and the turning rate at the state.
struct TrajectorySample {
    double t = 0;
    ProfileState state;
    double theta_dot = 0;
};

// Principal curvature values of the rotational hypersurface at a sample:
// kappa_m with multiplicity m-1, kappa_n with multiplicity n-1, and the
// planar curvature of the generating curve itself.
struct CurvatureData {
    double kappa_m = 0;
    double kappa_n = 0;
    double kappa_profile = 0;
};

CurvatureData curvatures(const TrajectorySample& sample, const Params& p);

// Sign convention in the support term (x sin theta - y cos theta)/2, calibrated once
// against the closed-form solutions. The calibration asserts exactly one sign works.
double orientation_sign();

// Weighted curvature sum minus support term minus lambda; zero on exact solutions.
double curvature_identity_residual(const TrajectorySample& sample, const Params& p);

// Central-difference estimate of theta' at sample b minus the analytic turning rate.
// Requires near-equal spacing: throws std::invalid_argument if steps differ by >10%.
double fd_residual(const TrajectorySample& a, const TrajectorySample& b,
                   const TrajectorySample& c, const Params& p);

// Analytic second derivative of theta along a unit-speed solution.
double theta_ddot(const ProfileState& st, double theta_dot, const Params& p);

// The open region where a vanishing turning rate must be a strict maximum of theta:
// x' < 0, y' < 0, and (m-1) y^2 < (n-1) x^2.
bool in_curl_region(const ProfileState& st, const Params& p);

}  // namespace lambdasurf
