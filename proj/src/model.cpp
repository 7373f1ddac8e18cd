#include "lambdasurf/model.hpp"

#include <cmath>

namespace lambdasurf {

void validate(const Params& p) {
    if (p.m < 2) throw std::invalid_argument("m must be >= 2");
    if (p.n < 2) throw std::invalid_argument("n must be >= 2");
    if (p.lambda > 0) throw std::invalid_argument("lambda must be <= 0");
}

namespace {

void require_domain(double x, double y) {
    if (!(x >= kDomainEps) || !(y >= kDomainEps)) {
        throw DomainError("state at coordinate axis: x=" + std::to_string(x) +
                          " y=" + std::to_string(y));
    }
}

}  // namespace

DiagonalState to_diagonal(const ProfileState& ps) {
    require_domain(ps.x, ps.y);
    return {(ps.x + ps.y) / kSqrt2, (ps.x - ps.y) / kSqrt2, ps.theta + kPi / 4};
}

ProfileState from_diagonal(const DiagonalState& ds) {
    ProfileState ps{(ds.r + ds.s) / kSqrt2, (ds.r - ds.s) / kSqrt2, ds.phi - kPi / 4};
    if (ps.x <= 0 || ps.y <= 0) {
        throw DomainError("diagonal state outside the first quadrant: r=" +
                          std::to_string(ds.r) + " s=" + std::to_string(ds.s));
    }
    return ps;
}

ProfileRates rhs_xy(const ProfileState& st, const Params& p) {
    require_domain(st.x, st.y);
    const double c = std::cos(st.theta);
    const double s = std::sin(st.theta);
    const double dtheta = (st.x / 2 - (p.m - 1) / st.x) * s +
                          ((p.n - 1) / st.y - st.y / 2) * c + p.lambda;
    return {c, s, dtheta};
}

DiagonalRates rhs_diagonal(const DiagonalState& st, const Params& p) {
    if (p.m != p.n) throw std::invalid_argument("diagonal coordinates require m == n");
    require_domain((st.r + st.s) / kSqrt2, (st.r - st.s) / kSqrt2);
    const double c = std::cos(st.phi);
    const double s = std::sin(st.phi);
    const double rr = st.r * st.r - st.s * st.s;
    const double dphi = (-st.r / 2 + 2 * (p.n - 1) * st.r / rr) * c +
                        (st.s / 2 + 2 * (p.n - 1) * st.s / rr) * s + p.lambda;
    return {s, c, dphi};
}

ExplicitSolutions explicit_solutions(const Params& p) {
    const double l = p.lambda;
    return {l + std::sqrt(l * l + 2 * (p.n - 1)),
            l + std::sqrt(l * l + 2 * (p.m - 1)),
            l + std::sqrt(l * l + 2 * (p.m + p.n - 1))};
}

double line_y_reversed(const Params& p) {
    return -p.lambda + std::sqrt(p.lambda * p.lambda + 2 * (p.n - 1));
}

double line_x_reversed(const Params& p) {
    return -p.lambda + std::sqrt(p.lambda * p.lambda + 2 * (p.m - 1));
}

CurvatureData curvatures(const TrajectorySample& sample, const Params& p) {
    (void)p;
    const ProfileState& st = sample.state;
    require_domain(st.x, st.y);
    return {std::sin(st.theta) / st.x, -std::cos(st.theta) / st.y, sample.theta_dot};
}

namespace {

double identity_residual_with_sign(const TrajectorySample& sample, const Params& p,
                                   double sigma) {
    const CurvatureData k = curvatures(sample, p);
    const ProfileState& st = sample.state;
    const double support = (st.x * std::sin(st.theta) - st.y * std::cos(st.theta)) / 2;
    return (p.m - 1) * k.kappa_m + (p.n - 1) * k.kappa_n + k.kappa_profile -
           sigma * support - p.lambda;
}

double max_identity_residual_on_explicit(const Params& p, double sigma) {
    const ExplicitSolutions sol = explicit_solutions(p);
    double worst = 0;
    for (double x : {0.5, 1.0, 2.0, 4.0}) {
        TrajectorySample s{0, {x, sol.line_y, 0.0}, 0.0};
        worst = std::max(worst, std::abs(identity_residual_with_sign(s, p, sigma)));
    }
    for (double y : {0.5, 1.0, 2.0, 4.0}) {
        TrajectorySample s{0, {sol.line_x, y, -kPi / 2}, 0.0};
        worst = std::max(worst, std::abs(identity_residual_with_sign(s, p, sigma)));
    }
    const double rho = sol.circle_radius;
    for (double a : {kPi / 6, kPi / 4, kPi / 3}) {
        TrajectorySample s{0, {rho * std::cos(a), rho * std::sin(a), a - kPi / 2},
                           -1.0 / rho};
        worst = std::max(worst, std::abs(identity_residual_with_sign(s, p, sigma)));
    }
    return worst;
}

double calibrate_orientation_sign() {
    const Params cases[] = {{2, 2, -0.5}, {3, 2, -1.0}, {5, 5, -0.25}};
    double chosen = 0;
    for (double sigma : {1.0, -1.0}) {
        double worst = 0;
        for (const Params& p : cases) {
            worst = std::max(worst, max_identity_residual_on_explicit(p, sigma));
        }
        if (worst < 1e-9) {
            if (chosen != 0) throw std::logic_error("orientation sign is not unique");
            chosen = sigma;
        }
    }
    if (chosen == 0) throw std::logic_error("no orientation sign satisfies the identity");
    return chosen;
}

}  // namespace

double orientation_sign() {
    static const double sigma = calibrate_orientation_sign();
    return sigma;
}

double curvature_identity_residual(const TrajectorySample& sample, const Params& p) {
    return identity_residual_with_sign(sample, p, orientation_sign());
}

double fd_residual(const TrajectorySample& a, const TrajectorySample& b,
                   const TrajectorySample& c, const Params& p) {
    const double h0 = b.t - a.t;
    const double h1 = c.t - b.t;
    if (h0 <= 0 || h1 <= 0) throw std::invalid_argument("samples must increase in t");
    if (std::abs(h0 - h1) > 0.1 * std::max(h0, h1)) {
        throw std::invalid_argument("sample spacing differs by more than 10%");
    }
    const double fd = (-h1 * h1 * a.state.theta + (h1 * h1 - h0 * h0) * b.state.theta +
                       h0 * h0 * c.state.theta) /
                      (h0 * h1 * (h0 + h1));
    return fd - rhs_xy(b.state, p).dtheta;
}

double theta_ddot(const ProfileState& st, double theta_dot, const Params& p) {
    require_domain(st.x, st.y);
    const double c = std::cos(st.theta);
    const double s = std::sin(st.theta);
    const double mixed = c * s * ((p.m - 1) / (st.x * st.x) - (p.n - 1) / (st.y * st.y));
    const double damping = (st.x * st.x - 2 * (p.m - 1)) / (2 * st.x) * c +
                           (st.y * st.y - 2 * (p.n - 1)) / (2 * st.y) * s;
    return mixed + theta_dot * damping;
}

bool in_curl_region(const ProfileState& st, const Params& p) {
    return std::cos(st.theta) < 0 && std::sin(st.theta) < 0 &&
           (p.m - 1) * st.y * st.y < (p.n - 1) * st.x * st.x;
}

}  // namespace lambdasurf
