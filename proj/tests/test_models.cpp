#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "relcycle/cycles.hpp"
#include "relcycle/models.hpp"

using namespace relcycle;
using namespace relcycle::models;
using dynamics::State;

namespace {

constexpr double kPi = std::numbers::pi;

SwimmerConfig random_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ang(-kPi, kPi), pos(-3, 3);
    return {ang(rng), ang(rng), pos(rng), pos(rng)};
}

Vec4 random_rates(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2, 2);
    return {u(rng), u(rng), u(rng), u(rng)};
}

// Random state whose interior angle stays within 2 rad of the rest angle,
// away from the antipodal cusp of the wrapped spring.
State random_state_near_rest(std::mt19937_64& rng, const SwimmerParams& p) {
    std::uniform_real_distribution<double> u(-1, 1);
    const double phi1 = kPi * u(rng);
    State s(8);
    s << phi1, phi1 - p.theta_bar - 2.0 * u(rng), 2 * u(rng), 2 * u(rng), u(rng), u(rng), u(rng), u(rng);
    return s;
}

SwimmerConfig cfg(const State& x) { return {x[0], x[1], x[2], x[3]}; }

// dL/dqdot by central differences of the Lagrangian.
Vec4 momentum(const Vec4& q, const Vec4& qd, const SwimmerParams& p) {
    Vec4 out;
    for (int i = 0; i < 4; ++i) {
        const double h = 1e-2;
        Vec4 a = qd, b = qd;
        a[i] += h;
        b[i] -= h;
        const SwimmerState sa{{q[0], q[1], q[2], q[3]}, a[0], a[1], a[2], a[3]};
        const SwimmerState sb{{q[0], q[1], q[2], q[3]}, b[0], b[1], b[2], b[3]};
        out[i] = (lagrangian(sa, p) - lagrangian(sb, p)) / (2 * h);
    }
    return out;
}

// Euler-Lagrange residual d/dt dL/dqdot - dL/dq - Q, evaluated by finite
// differences of the Lagrangian along the curve with the given accelerations.
Vec4 euler_lagrange_residual(const State& x, const Vec4& qdd, double t, const SwimmerParams& p) {
    const Vec4 q = x.head<4>(), qd = x.tail<4>();
    const double h = 1e-4;
    const Vec4 qp = q + h * qd + 0.5 * h * h * qdd, qm = q - h * qd + 0.5 * h * h * qdd;
    const Vec4 dp = (momentum(qp, qd + h * qdd, p) - momentum(qm, qd - h * qdd, p)) / (2 * h);
    Vec4 dq;
    for (int i = 0; i < 4; ++i) {
        const double e = 1e-6;
        Vec4 a = q, b = q;
        a[i] += e;
        b[i] -= e;
        const SwimmerState sa{{a[0], a[1], a[2], a[3]}, qd[0], qd[1], qd[2], qd[3]};
        const SwimmerState sb{{b[0], b[1], b[2], b[3]}, qd[0], qd[1], qd[2], qd[3]};
        dq[i] = (lagrangian(sa, p) - lagrangian(sb, p)) / (2 * e);
    }
    return dp - dq - total_force(cfg(x), qd, t, p);
}

} // namespace

TEST_CASE("spring field") {
    const auto f0 = spring_field(0.0);
    CHECK(f0(State{{0.0, 0.0}}, 0.0).norm() == 0.0);
    CHECK((f0(State{{1.0, 2.0}}, 0.37) - State{{2.0, -3.0}}).norm() == 0.0);
    CHECK((spring_field(1.0)(State{{0.0, 0.0}}, kPi / 2) - State{{0.0, 1.0}}).norm() == 0.0);
    CHECK(*f0.period == doctest::Approx(2 * kPi));
}

TEST_CASE("three-dimensional field") {
    const auto f0 = three_d_field(0.0);
    for (double z : {-3.0, 0.0, 10.0}) CHECK(f0(State{{0.0, 0.0, z}}, 0.0).norm() == 0.0);
    CHECK((f0(State{{1.0, 1.0, 0.0}}, 0.0) - State{{1.0, -2.0, -1.0}}).norm() == 0.0);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-4, 4);
    for (int i = 0; i < 100; ++i) {
        const double eps = std::abs(u(rng));
        const State x{{u(rng), u(rng), u(rng)}};
        const double t = u(rng);
        CHECK((three_d_field(eps)(x, t).head(2) - spring_field(eps)(x.head(2), t)).norm() == 0.0);
    }
}

TEST_CASE("mass matrix") {
    SwimmerParams p;
    Mat4 expected;
    // Frozen from expanding K1 + K2 at zero angles with unit masses and inertias.
    expected << 2, 0, 0, 1,
                0, 2, 0, 1,
                0, 0, 2, 0,
                1, 1, 0, 2;
    CHECK((mass_matrix({0, 0, 0, 0}, p) - expected).cwiseAbs().maxCoeff() < 1e-12);

    std::mt19937_64 rng(32);
    for (int i = 0; i < 1000; ++i) {
        const auto m = mass_matrix(random_config(rng), p);
        CHECK((m - m.transpose()).norm() == 0.0);
        CHECK(m.determinant() > 0.0);
        CHECK(Eigen::LLT<Mat4>(m).info() == Eigen::Success);
    }

    // Kinetic energy is unchanged when configuration and rates move together.
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 100; ++i) {
        const auto q = random_config(rng);
        const Vec4 qd = random_rates(rng);
        const lie::SE2Element z{lie::wrap_angle(u(rng)), u(rng), u(rng)};
        Mat4 jac = Mat4::Identity();
        jac.block<2, 2>(2, 2) << std::cos(z.theta), -std::sin(z.theta), std::sin(z.theta), std::cos(z.theta);
        const Mat4 pulled = jac.transpose() * mass_matrix(lie::act_config(z, q), p) * jac;
        CHECK((pulled - mass_matrix(q, p)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("swimmer equilibrium and trivial motion") {
    SwimmerParams p;
    const auto f = swimmer_field(p);
    State rest = State::Zero(8);
    rest << 0.4, 0.4 - p.theta_bar, 1.0, 2.0, 0, 0, 0, 0;
    CHECK(f(rest, 0.3).norm() < 1e-15);

    SwimmerParams inert = p;
    inert.k = 0.0;
    State still(8);
    still << 0.4, -2.0, 1.0, 2.0, 0, 0, 0, 0;
    const auto end = dynamics::flow(swimmer_field(inert), still, 0, 5, dynamics::FixedStep{0.05});
    CHECK((end - still).norm() == 0.0);
}

TEST_CASE("accelerations at zero velocity have no velocity terms") {
    SwimmerParams p;
    p.eps = 0.7;
    std::mt19937_64 rng(33);
    for (int i = 0; i < 50; ++i) {
        const auto q = random_config(rng);
        const double t = 0.9 * i;
        const Vec4 zero = Vec4::Zero();
        CHECK(coriolis(q, zero, p).norm() == 0.0);
        const Vec4 direct = mass_matrix(q, p).ldlt().solve(-potential_gradient(q, p) + swim_force(t, p));
        CHECK((accelerations(q, zero, t, p) - direct).norm() < 1e-14);
    }
}

TEST_CASE("equations of motion match a finite-difference Euler-Lagrange oracle") {
    SwimmerParams p;
    p.eps = 0.5;
    p.M1 = 1.3;
    p.I2 = 0.7;
    p.L1 = 1.4;
    std::mt19937_64 rng(34);
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
        const State x = random_state_near_rest(rng, p);
        const double t = 0.37 * i;
        const Vec4 qdd = accelerations(cfg(x), x.tail<4>(), t, p);
        worst = std::max(worst, euler_lagrange_residual(x, qdd, t, p).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("Coriolis term matches Christoffel symbols of the finite-differenced metric") {
    SwimmerParams p;
    p.M2 = 2.0;
    std::mt19937_64 rng(35);
    for (int n = 0; n < 50; ++n) {
        const auto q = random_config(rng);
        const Vec4 qd = random_rates(rng);
        std::array<Mat4, 4> dm;
        for (int k = 0; k < 4; ++k) {
            Vec4 a(q.phi1, q.phi2, q.x, q.y), b = a;
            a[k] += 1e-6;
            b[k] -= 1e-6;
            dm[static_cast<std::size_t>(k)] =
                (mass_matrix({a[0], a[1], a[2], a[3]}, p) - mass_matrix({b[0], b[1], b[2], b[3]}, p)) / 2e-6;
        }
        Vec4 c = Vec4::Zero();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k)
                    c[i] += (dm[static_cast<std::size_t>(k)](i, j) - 0.5 * dm[static_cast<std::size_t>(i)](j, k)) * qd[j] * qd[k];
        CHECK((c - coriolis(q, qd, p)).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("drag force") {
    SwimmerParams p;
    p.L1 = 1.5;
    p.L2 = 0.5;
    std::mt19937_64 rng(36);
    CHECK(drag_force(random_config(rng), Vec4::Zero(), p).norm() == 0.0);

    // Both links along phi, hinge sliding along that axis: pure tangential drag.
    const double phi = 0.6, v = 1.7;
    const SwimmerConfig folded{phi, phi, 0.0, 0.0};
    const Vec4 axial(0, 0, v * std::cos(phi), v * std::sin(phi));
    const Vec4 f = drag_force(folded, axial, p);
    CHECK(f[2] == doctest::Approx(-p.c_t * (p.L1 + p.L2) * v * std::cos(phi)));
    CHECK(f[3] == doctest::Approx(-p.c_t * (p.L1 + p.L2) * v * std::sin(phi)));
    CHECK(std::abs(f[0]) < 1e-15);
    CHECK(std::abs(f[1]) < 1e-15);

    // Closed form against midpoint quadrature of the force density with virtual work.
    for (int n = 0; n < 20; ++n) {
        const auto q = random_config(rng);
        const Vec4 qd = random_rates(rng);
        Vec4 quad = Vec4::Zero();
        const int m = 4000;
        for (int link = 0; link < 2; ++link) {
            const double ang = link == 0 ? q.phi1 : q.phi2;
            const double w = link == 0 ? qd[0] : qd[1];
            const double len = link == 0 ? p.L1 : p.L2;
            const Eigen::Vector2d t(std::cos(ang), std::sin(ang)), nrm(-std::sin(ang), std::cos(ang));
            const double ds = len / m;
            for (int k = 0; k < m; ++k) {
                const double s = (k + 0.5) * ds;
                const Eigen::Vector2d vel = Eigen::Vector2d(qd[2], qd[3]) + s * w * nrm;
                const Eigen::Vector2d dens = -(p.c_t * t * t.dot(vel) + p.c_n * nrm * nrm.dot(vel));
                quad[2] += dens.x() * ds;
                quad[3] += dens.y() * ds;
                quad[link] += s * nrm.dot(dens) * ds;
            }
        }
        CHECK((quad - drag_force(q, qd, p)).cwiseAbs().maxCoeff() < 1e-6);
    }

    double worst_power = -1.0;
    for (int n = 0; n < 1000; ++n) {
        const auto q = random_config(rng);
        const Vec4 qd = random_rates(rng);
        worst_power = std::max(worst_power, drag_force(q, qd, p).dot(qd));
    }
    CHECK(worst_power <= 0.0);
}

TEST_CASE("parameter validation") {
    SwimmerParams p;
    CHECK_NOTHROW(p.validate());
    p.c_n = 0.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = SwimmerParams{};
    p.M1 = 0.0;
    CHECK_THROWS_AS(swimmer_field(p), std::invalid_argument);
    p = SwimmerParams{};
    p.eps = -1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("SE(2) invariance of the Lagrangian and equivariance of the field") {
    SwimmerParams p;
    p.eps = 0.3;
    const auto f = swimmer_field(p);
    const auto chart = swimmer_chart();
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-3, 3);
    double worst_l = 0, worst_eq = 0;
    for (int i = 0; i < 100; ++i) {
        const State x = random_state_near_rest(rng, p);
        const lie::SE2Element z{lie::wrap_angle(u(rng)), u(rng), u(rng)};
        const SwimmerState s = from_vector(x);
        worst_l = std::max(worst_l, std::abs(lagrangian(lie::tangent_act(z, s), p) - lagrangian(s, p)));
        const std::vector<State> one{x};
        worst_eq = std::max(worst_eq, dynamics::equivariance_residual(f, z, one, 0.1 * i));
    }
    CHECK(worst_l < 1e-10);
    CHECK(worst_eq < 1e-9);
}

TEST_CASE("energy") {
    SwimmerParams p;
    State rest = State::Zero(8);
    rest << 1.0, 1.0 - p.theta_bar, 0.5, 0.5, 0, 0, 0, 0;
    const auto e = energy(rest, 0.0, p);
    CHECK(e.total == 0.0);
    CHECK(e.dissipation_rate == 0.0);

    std::mt19937_64 rng(38);
    for (int i = 0; i < 100; ++i) {
        const auto r = energy(random_state_near_rest(rng, p), 0.0, p);
        CHECK(r.total == doctest::Approx(r.kinetic + r.potential));
        CHECK(r.dissipation_rate <= 1e-12);
    }
}

TEST_CASE("unforced swimmer loses energy at the rate of its dissipation") {
    SwimmerParams p;
    State x0(8);
    x0 << 0.2, -0.5, 0.0, 0.0, 1.0, -0.8, 0.6, -0.4;
    const auto traj = dynamics::integrate(swimmer_field(p), x0, 0, 20, dynamics::FixedStep{1e-2});
    double previous = energy(traj.states.front(), 0, p).total;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double now = energy(traj.states[k], traj.times[k], p).total;
        CHECK(now <= previous + 1e-12);
        previous = now;
    }
    CHECK(energy_rate_residual(traj, p) < 1e-6);

    // Non-uniform sample times from the adaptive integrator work as well.
    const auto adaptive = dynamics::integrate(swimmer_field(p), x0, 0, 20, dynamics::Adaptive{1e-11});
    CHECK(energy_rate_residual(adaptive, p) < 1e-6);
}

TEST_CASE("forced swimmer balances energy over one cycle") {
    SwimmerParams p;
    p.eps = 0.2;
    const auto field = swimmer_field(p);
    const auto chart = swimmer_chart();
    const auto cert = cycles::find_relative_cycle(field, chart, swimmer_rest(p));
    const State x0 = chart.representative(cert.anchor);
    const State xT = dynamics::flow(field, x0, 0, p.T_f, dynamics::default_period_control(p.T_f));
    const auto traj = dynamics::integrate(field, x0, 0, p.T_f, dynamics::default_period_control(p.T_f));
    double scale = 0;
    for (const auto& s : traj.states) scale = std::max(scale, std::abs(energy(s, 0, p).total));
    CHECK(scale > 0.0);
    CHECK(std::abs(energy(xT, p.T_f, p).total - energy(x0, 0, p).total) < 1e-5 * scale);
}

TEST_CASE("unforced swimmer comes to rest at the rest angle") {
    SwimmerParams p;
    const auto f = swimmer_field(p);
    std::mt19937_64 rng(39);
    for (int i = 0; i < 3; ++i) {
        const State x0 = random_state_near_rest(rng, p);
        const State end = dynamics::flow(f, x0, 0, 150, dynamics::Adaptive{1e-12});
        CHECK(std::abs(shape_deviation(cfg(end), p)) < 1e-4);
        CHECK(end.tail<4>().norm() < 1e-6);
        CHECK(f(end, 150).tail<4>().norm() < 1e-6);
        CHECK(potential_gradient(cfg(end), p).norm() < 1e-6);
    }
}

TEST_CASE("state vector conversion") {
    const SwimmerState s{{0.1, 0.2, 0.3, 0.4}, 0.5, 0.6, 0.7, 0.8};
    const auto back = from_vector(to_vector(s));
    CHECK(back.q.phi2 == 0.2);
    CHECK(back.dy == 0.8);
    CHECK_THROWS_AS(from_vector(State::Zero(3)), std::invalid_argument);
}
