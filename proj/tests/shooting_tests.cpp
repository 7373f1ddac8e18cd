#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "lambdasurf/model.hpp"
#include "lambdasurf/shooting.hpp"

using namespace lambdasurf;

namespace {
const Params kBase{2, 2, -0.5};

ShotResult shot_at(double R, IntegratorConfig cfg = {}) {
    return shoot({R, kBase, cfg});
}
}  // namespace

TEST_CASE("shot validation") {
    CHECK_THROWS_AS(shoot({-1.0, kBase, IntegratorConfig{}}), std::invalid_argument);
    CHECK_THROWS_AS(shoot({0.0, kBase, IntegratorConfig{}}), std::invalid_argument);
    CHECK_THROWS_AS(shoot({3.0, Params{3, 2, -0.5}, IntegratorConfig{}}),
                    std::invalid_argument);
}

TEST_CASE("the circle radius shot falls to the axis") {
    const ShotResult shot = shot_at(2.0);
    CHECK(shot.outcome == ShotOutcome::HitsXAxis);
    CHECK(std::abs(shot.T - kPi / 2) < 1e-4);
    const ProfileState end = from_diagonal(shot.terminal);
    CHECK(std::abs(end.theta + kPi / 2) < 0.01);
    CHECK(end.x == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("a far start returns to the line") {
    const ShotResult shot = shot_at(8.0);
    CHECK(shot.outcome == ShotOutcome::ReturnsToLine);
    CHECK(shot.T == doctest::Approx(2.548236495).epsilon(1e-7));
    CHECK(shot.terminal.phi == doctest::Approx(-1.773922966).epsilon(1e-7));
    CHECK(std::abs(shot.terminal.s) < 1e-9);
    CHECK(shot.terminal.phi > -kPi);
    CHECK(shot.terminal.phi < -kPi / 2);

    REQUIRE(shot.s_max.has_value());
    REQUIRE(shot.r_at_smax.has_value());
    CHECK(*shot.s_max == doctest::Approx(0.314343394).epsilon(1e-6));
    CHECK(*shot.r_at_smax == doctest::Approx(7.480279679).epsilon(1e-6));
    CHECK(*shot.s_max < 10.0 / 8.0);

    // The across-line displacement stays positive strictly between the endpoints.
    for (const auto& s : shot.trajectory.samples) {
        if (s.t < 1e-6 || s.t > shot.T - 1e-6) continue;
        CHECK(to_diagonal(s.state).s > 0);
    }
}

TEST_CASE("starts at or below the ceiling radius end immediately") {
    // dphi(0) >= 0 there: the angle would rise off the admissible wedge at once.
    for (const double R : {1.5, 1.5615528128088303}) {
        const ShotResult shot = shot_at(R);
        CHECK(shot.outcome == ShotOutcome::AngleCeiling);
        CHECK(shot.T == 0.0);
        CHECK(shot.trajectory.samples.size() == 1);
        REQUIRE(!shot.trajectory.events.empty());
        CHECK(shot.trajectory.events.back().kind == EventKind::AngleCeiling);
    }
    // Just above the ceiling the shot integrates and drops to the angle floor.
    const ShotResult above = shot_at(1.57);
    CHECK(above.T > 0.0);
}

TEST_CASE("short starts fall to the angle floor with positive displacement") {
    const ShotResult shot = shot_at(2.2);
    CHECK(shot.outcome == ShotOutcome::AngleFloor);
    CHECK(shot.terminal.phi == doctest::Approx(-kPi).epsilon(1e-9));
    CHECK(shot.terminal.s > 0);
}

TEST_CASE("sweep classifies a single transition") {
    std::vector<double> radii;
    for (int i = 0; i < 20; ++i) radii.push_back(2.2 + (8.0 - 2.2) * i / 19.0);
    const auto rows = sweep(kBase, IntegratorConfig{}, radii);
    REQUIRE(rows.size() == 20);

    int transitions = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].error.empty());
        CHECK(rows[i].R == radii[i]);
        const bool returns = rows[i].outcome == ShotOutcome::ReturnsToLine;
        CHECK((returns || rows[i].outcome == ShotOutcome::AngleFloor));
        if (i > 0 && returns != (rows[i - 1].outcome == ShotOutcome::ReturnsToLine)) {
            ++transitions;
        }
    }
    CHECK(transitions == 1);
    CHECK(rows.front().outcome == ShotOutcome::AngleFloor);
    CHECK(rows.back().outcome == ShotOutcome::ReturnsToLine);
}

TEST_CASE("sweep edge behavior") {
    CHECK(sweep(kBase, IntegratorConfig{}, {}).empty());
    const auto rows = sweep(kBase, IntegratorConfig{}, {-1.0, 8.0});
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].error.empty());
    CHECK(rows[1].error.empty());
    CHECK(rows[1].outcome == ShotOutcome::ReturnsToLine);
}

TEST_CASE("critical radius search converges to the frozen value") {
    const ClosedCurve curve = find_rstar(kBase, IntegratorConfig{});
    CHECK(curve.r_star == doctest::Approx(3.006655681529).epsilon(1e-8));
    CHECK(curve.bracket[1] - curve.bracket[0] <= 1e-10);
    CHECK(curve.bracket[0] <= curve.r_star);
    CHECK(curve.r_star <= curve.bracket[1]);
    CHECK(curve.iterations >= 25);
    CHECK(curve.iterations <= 60);
    CHECK(curve.perp_residual < 1e-6);
    CHECK(curve.closure_gap < 1e-6);
    CHECK(curve.max_eq_residual < 1e-4);

    // Outcomes flip across the critical radius.
    CHECK(shot_at(curve.r_star - 1e-4).outcome == ShotOutcome::AngleFloor);
    CHECK(shot_at(curve.r_star + 1e-4).outcome == ShotOutcome::ReturnsToLine);
}

TEST_CASE("reflection closes the loop symmetrically") {
    const ShotResult shot = shot_at(8.0);
    const ClosedCurve curve = reflect_and_close(shot);
    const std::size_t n = shot.trajectory.samples.size();
    REQUIRE(curve.points.size() == 2 * n - 2);

    // Forward half is kept verbatim; the mirrored half swaps coordinates exactly.
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const auto& fwd = curve.points[n - 1 - k];
        const auto& mir = curve.points[n - 1 + k];
        CHECK(mir.state.x == fwd.state.y);
        CHECK(mir.state.y == fwd.state.x);
        CHECK(mir.state.theta ==
              doctest::Approx(-2.5 * kPi - fwd.state.theta).epsilon(1e-15));
        CHECK(mir.t == doctest::Approx(2.0 * shot.T - fwd.t).epsilon(1e-15));
    }

    // Strictly increasing arclength, strictly inside the open first quadrant.
    for (std::size_t k = 0; k < curve.points.size(); ++k) {
        CHECK(curve.points[k].state.x > 0);
        CHECK(curve.points[k].state.y > 0);
        if (k > 0) CHECK(curve.points[k].t > curve.points[k - 1].t);
    }

    // Total turning over the closed loop is one clockwise revolution.
    const double dturn =
        curve.points.back().state.theta - curve.points.front().state.theta;
    CHECK(dturn == doctest::Approx(-2.0 * kPi).epsilon(0.05));

    CHECK(curve.closure_gap < 1e-6);
    CHECK(curve.perp_residual == doctest::Approx(std::abs(shot.terminal.phi + kPi)));
}

TEST_CASE("reflection demands a returning shot") {
    const ShotResult shot = shot_at(2.0);  // HitsXAxis
    CHECK_THROWS_AS(reflect_and_close(shot), std::invalid_argument);
}

TEST_CASE("critical radius is continuous in the offset constant") {
    const ClosedCurve a = find_rstar(Params{2, 2, -0.01}, IntegratorConfig{});
    const ClosedCurve b = find_rstar(Params{2, 2, -0.02}, IntegratorConfig{});
    CHECK(std::abs(a.r_star - b.r_star) < 0.05);
}

TEST_CASE("unreachable bracket tolerance reports the best curve") {
    try {
        find_rstar(kBase, IntegratorConfig{}, 1e-30, 200);
        FAIL("expected ToleranceNotMet");
    } catch (const ToleranceNotMet& ex) {
        CHECK(ex.best.points.size() > 100);
        CHECK(ex.best.perp_residual < 1e-6);
        CHECK(ex.best.r_star == doctest::Approx(3.006655681529).epsilon(1e-8));
    }
}

TEST_CASE("an arclength budget too small for any return fails the bracket") {
    IntegratorConfig cfg;
    cfg.t_max = 1e-3;  // every shot ends at StepLimit, so no radius ever returns
    CHECK_THROWS_AS(find_rstar(kBase, cfg), BracketFailure);
}
