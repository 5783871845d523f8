#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "relcycle/errors.hpp"
#include "relcycle/models.hpp"
#include "relcycle/reduction.hpp"

using namespace relcycle;
using namespace relcycle::reduction;
using dynamics::State;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

State random_swimmer_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    State s(8);
    s << 3 * u(rng), 3 * u(rng), 2 * u(rng), 2 * u(rng), u(rng), u(rng), u(rng), u(rng);
    return s;
}

// Distance between swimmer states with angles compared on the circle.
double swimmer_distance(const State& a, const State& b) {
    State d = a - b;
    d[0] = lie::wrap_angle(d[0]);
    d[1] = lie::wrap_angle(d[1]);
    return d.lpNorm<Eigen::Infinity>();
}

double se2_distance(const lie::SE2Element& a, const lie::SE2Element& b) {
    return std::abs(lie::wrap_angle(a.theta - b.theta)) + std::abs(a.tx - b.tx) + std::abs(a.ty - b.ty);
}

} // namespace

TEST_CASE("chart identities") {
    std::mt19937_64 rng(21);
    const auto chart = models::swimmer_chart();
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 50; ++i) {
        const State x = random_swimmer_state(rng);
        const State r = chart.project(x);
        CHECK((chart.project(chart.representative(r)) - r).norm() < 1e-14);
        const lie::SE2Element z{lie::wrap_angle(u(rng)), u(rng), u(rng)};
        CHECK((chart.project(chart.symmetry.act(z, x)) - r).norm() < 1e-12);
        // x = frame_of(x) . representative(project(x))
        const State back = chart.symmetry.act(chart.frame_of(x), chart.representative(r));
        CHECK(swimmer_distance(back, x) < 1e-12);
    }
}

TEST_CASE("project_tangent matches finite differences of project") {
    std::mt19937_64 rng(22);
    const auto chart = models::swimmer_chart();
    for (int i = 0; i < 20; ++i) {
        const State x = random_swimmer_state(rng);
        const State v = random_swimmer_state(rng);
        const double h = 1e-6;
        const State fd = (chart.project(x + h * v) - chart.project(x - h * v)) / (2 * h);
        CHECK((fd - chart.project_tangent(x, v)).norm() < 1e-8);
    }
}

TEST_CASE("three_d reduces to the spring field exactly") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-5, 5);
    const auto reduced = reduced_field(models::three_d_field(0.7), models::three_d_chart());
    const auto spring = models::spring_field(0.7);
    for (int i = 0; i < 200; ++i) {
        const State r{{u(rng), u(rng)}};
        const double t = u(rng);
        CHECK((reduced(r, t) - spring(r, t)).norm() == 0.0);
    }
    CHECK_THROWS_AS(reduced_field(models::spring_field(1.0), models::three_d_chart()), MissingSymmetry);
    CHECK_THROWS_AS(models::swimmer_chart().project(State::Zero(5)), std::invalid_argument);
}

TEST_CASE("swimmer reduced field") {
    models::SwimmerParams p;
    p.eps = 0.3;
    const auto full = models::swimmer_field(p);
    const auto chart = models::swimmer_chart();
    const auto reduced = reduced_field(full, chart);
    std::mt19937_64 rng(24);

    // At the identity frame the reduced rates are read directly off the full rhs.
    const State r{{1.2, 0.3, -0.4, 0.5, 0.2}};
    const State x = chart.representative(r);
    const State xdot = full(x, 0.9);
    const State rdot = reduced(r, 0.9);
    CHECK(rdot[0] == doctest::Approx(xdot[0] - xdot[1]));
    CHECK(rdot[1] == doctest::Approx(xdot[4] - xdot[5]));
    CHECK(rdot[2] == doctest::Approx(xdot[4]));
    CHECK(rdot[3] == doctest::Approx(xdot[6] + r[2] * r[4]));
    CHECK(rdot[4] == doctest::Approx(xdot[7] - r[2] * r[3]));

    // Any point of the orbit gives the same reduced vector.
    std::uniform_real_distribution<double> u(-3, 3);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const lie::SE2Element z{lie::wrap_angle(u(rng)), u(rng), u(rng)};
        const State y = chart.symmetry.act(z, x);
        worst = std::max(worst, (chart.project_tangent(y, full(y, 0.9)) - rdot).norm());
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("reconstruction") {
    const auto chart = models::swimmer_chart();
    models::SwimmerParams p;

    SUBCASE("stationary reduced state gives a constant lift") {
        const auto full = models::swimmer_field(p);
        const State rest = models::swimmer_rest(p);
        const auto red = reduced_field(full, chart);
        const auto rtraj = dynamics::integrate(red, rest, 0, 3, dynamics::FixedStep{0.1});
        const lie::SE2Element g0{0.3, 1.0, -1.0};
        const auto lifted = reconstruct(rtraj, full, chart, g0, dynamics::FixedStep{0.1});
        for (const auto& s : lifted.states) CHECK(swimmer_distance(s, lifted.states.front()) < 1e-14);
    }

    SUBCASE("constant body velocity lifts to a one-parameter subgroup") {
        // A translation-invariant toy field on R^3 x SE(2)-coordinates where the
        // reduced state is constant and the body velocity is fixed.
        const lie::SE2Algebra xi{0.4, 1.0, 0.5};
        QuotientChart c = chart;
        dynamics::SystemField f;
        f.dimension = 8;
        f.symmetry = chart.symmetry;
        f.rhs = [xi](const State& x, double) {
            const double co = std::cos(x[0]), s = std::sin(x[0]);
            State d = State::Zero(8);
            d[0] = xi.omega;
            d[1] = xi.omega;
            d[2] = co * xi.vx - s * xi.vy;
            d[3] = s * xi.vx + co * xi.vy;
            return d;
        };
        const State r = State::Zero(5);
        dynamics::Trajectory rtraj;
        for (int k = 0; k <= 20; ++k) {
            rtraj.times.push_back(0.1 * k);
            rtraj.states.push_back(r);
        }
        const lie::SE2Element g0{0.2, -1.0, 0.5};
        const auto lifted = reconstruct(rtraj, f, c, g0, dynamics::Adaptive{1e-12});
        for (std::size_t k = 0; k < rtraj.size(); ++k) {
            const auto expected = lie::compose(g0, lie::exp(xi, rtraj.times[k]));
            const auto got = std::get<lie::SE2Element>(c.frame_of(lifted.states[k]));
            CHECK(se2_distance(got, expected) < 1e-10);
        }
    }

    SUBCASE("projection followed by reconstruction recovers a swimmer run") {
        p.eps = 0.4;
        const auto full = models::swimmer_field(p);
        State x0(8);
        x0 << 0.7, -0.6, 1.0, -2.0, 0.3, -0.2, 0.5, 0.1;
        const auto ctl = dynamics::Adaptive{1e-11};
        const auto run = dynamics::integrate(full, x0, 0, 10, ctl);
        const auto lifted = reconstruct(project(run, chart), full, chart, chart.frame_of(x0), ctl);
        double worst = 0;
        for (std::size_t k = 0; k < run.size(); ++k)
            worst = std::max(worst, swimmer_distance(lifted.states[k], run.states[k]));
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("phase shift of the translation example") {
    const auto chart = models::three_d_chart();
    const auto ctl = dynamics::default_period_control(kTwoPi);

    // Along x = -cos t, y = sin t the z-rate averages to -1/2, so dz = -pi.
    const auto ph = phase_shift(models::three_d_field(1.0), chart, State{{-1.0, 0.0}}, kTwoPi, ctl);
    CHECK(std::get<lie::TranslationElement>(ph.group_element).shift[0] ==
          doctest::Approx(-std::numbers::pi).epsilon(1e-6));
    CHECK(ph.residual < 1e-8);

    const auto rest = phase_shift(models::three_d_field(0.0), chart, State{{0.0, 0.0}}, kTwoPi, ctl);
    CHECK(std::get<lie::TranslationElement>(rest.group_element).shift[0] == 0.0);

    try {
        phase_shift(models::three_d_field(1.0), chart, State{{1.0, 1.0}}, kTwoPi, ctl);
        FAIL("expected NonPeriodicOrbit");
    } catch (const NonPeriodicOrbit& e) {
        CHECK(e.residual() > 1e-3);
    }
}

TEST_CASE("swimmer at rest has identity phase") {
    models::SwimmerParams p;
    const auto ph = phase_shift(models::swimmer_field(p), models::swimmer_chart(), models::swimmer_rest(p),
                                p.T_f, dynamics::default_period_control(p.T_f));
    CHECK(se2_distance(std::get<lie::SE2Element>(ph.group_element), lie::SE2Element::identity()) == 0.0);
}

TEST_CASE("relative phase is conjugation-consistent") {
    models::SwimmerParams p;
    p.eps = 0.5;
    const auto full = models::swimmer_field(p);
    const auto chart = models::swimmer_chart();
    const auto ctl = dynamics::default_period_control(p.T_f, 1000);
    State x0(8);
    x0 << 0.4, -1.0, 0.3, 0.2, 0.1, -0.2, 0.3, -0.1;
    const auto g = std::get<lie::SE2Element>(relative_phase(full, chart, x0, p.T_f, ctl));
    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 20; ++i) {
        const lie::SE2Element z{lie::wrap_angle(u(rng)), u(rng), u(rng)};
        const auto gz = std::get<lie::SE2Element>(
            relative_phase(full, chart, chart.symmetry.act(z, x0), p.T_f, ctl));
        const auto expected = lie::compose(lie::compose(z, g), lie::inverse(z));
        CHECK(se2_distance(gz, expected) < 1e-8);
    }
}
