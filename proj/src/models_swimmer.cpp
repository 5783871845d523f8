#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "relcycle/errors.hpp"
#include "relcycle/models.hpp"

namespace relcycle::models {

namespace {

Eigen::Matrix2d rotation(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Eigen::Matrix2d r;
    r << c, -s,
         s, c;
    return r;
}

Vec4 rates(const State& x) { return x.segment<4>(4); }

SwimmerConfig config_of(const State& x) { return {x[0], x[1], x[2], x[3]}; }

// Drag on one rod hinged at the origin of s, angle phi, length L.
// Adds the hinge force to (fx, fy) and returns the torque about the hinge.
double rod_drag(double phi, double dphi, double dx, double dy, double L, const SwimmerParams& p,
                double& fx, double& fy) {
    const double c = std::cos(phi), s = std::sin(phi);
    const double u_t = dx * c + dy * s;
    const double u_n = -dx * s + dy * c;
    // Normal velocity is u_n + s * dphi along the rod; moments of s are L, L^2/2, L^3/3.
    const double f_t = -p.c_t * L * u_t;
    const double f_n = -p.c_n * (L * u_n + 0.5 * L * L * dphi);
    fx += f_t * c - f_n * s;
    fy += f_t * s + f_n * c;
    return -p.c_n * (0.5 * L * L * u_n + L * L * L / 3.0 * dphi);
}

// First-derivative weights at z for the nodes x (Fornberg).
std::array<double, 5> derivative_weights(double z, const std::array<double, 5>& x) {
    double c[5][2] = {};
    double c1 = 1.0, c4 = x[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i < 5; ++i) {
        const int mn = std::min(i, 1);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k > 0; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k > 0; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    return {c[0][1], c[1][1], c[2][1], c[3][1], c[4][1]};
}

} // namespace

void SwimmerParams::validate() const {
    const auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string("swimmer parameter ") + name +
                                        " must be positive");
    };
    positive(M1, "M1");
    positive(M2, "M2");
    positive(I1, "I1");
    positive(I2, "I2");
    positive(c_B, "c_B");
    positive(c_t, "c_t");
    positive(c_n, "c_n");
    positive(L1, "L1");
    positive(L2, "L2");
    positive(T_f, "T_f");
    if (!std::isfinite(k) || k < 0.0) throw std::invalid_argument("swimmer parameter k must be >= 0");
    if (!std::isfinite(theta_bar)) throw std::invalid_argument("theta_bar must be finite");
    if (c_n < c_t) throw std::invalid_argument("drag anisotropy requires c_n >= c_t");
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be >= 0");
}

State to_vector(const SwimmerState& s) {
    State v(kSwimmerDim);
    v << s.q.phi1, s.q.phi2, s.q.x, s.q.y, s.dphi1, s.dphi2, s.dx, s.dy;
    return v;
}

SwimmerState from_vector(const State& v) {
    if (v.size() != kSwimmerDim) throw std::invalid_argument("swimmer state needs 8 entries");
    return {{v[0], v[1], v[2], v[3]}, v[4], v[5], v[6], v[7]};
}

Mat4 mass_matrix(const SwimmerConfig& q, const SwimmerParams& p) {
    const double s1 = std::sin(q.phi1), c1 = std::cos(q.phi1);
    const double s2 = std::sin(q.phi2), c2 = std::cos(q.phi2);
    Mat4 m;
    m << p.I1 + p.M1, 0.0, -p.M1 * s1, p.M1 * c1,
         0.0, p.I2 + p.M2, -p.M2 * s2, p.M2 * c2,
         -p.M1 * s1, -p.M2 * s2, p.M1 + p.M2, 0.0,
         p.M1 * c1, p.M2 * c2, 0.0, p.M1 + p.M2;
    return m;
}

Vec4 coriolis(const SwimmerConfig& q, const Vec4& qdot, const SwimmerParams& p) {
    const double w1 = qdot[0] * qdot[0], w2 = qdot[1] * qdot[1];
    return {0.0, 0.0,
            -(p.M1 * std::cos(q.phi1) * w1 + p.M2 * std::cos(q.phi2) * w2),
            -(p.M1 * std::sin(q.phi1) * w1 + p.M2 * std::sin(q.phi2) * w2)};
}

double shape_deviation(const SwimmerConfig& q, const SwimmerParams& p) {
    return lie::wrap_angle(q.phi1 - q.phi2 - p.theta_bar);
}

double potential(const SwimmerConfig& q, const SwimmerParams& p) {
    const double d = shape_deviation(q, p);
    return 0.5 * p.k * d * d;
}

Vec4 potential_gradient(const SwimmerConfig& q, const SwimmerParams& p) {
    const double g = p.k * shape_deviation(q, p);
    return {g, -g, 0.0, 0.0};
}

double kinetic_energy(const SwimmerConfig& q, const Vec4& qdot, const SwimmerParams& p) {
    return 0.5 * qdot.dot(mass_matrix(q, p) * qdot);
}

double lagrangian(const SwimmerState& s, const SwimmerParams& p) {
    const Vec4 qdot(s.dphi1, s.dphi2, s.dx, s.dy);
    return kinetic_energy(s.q, qdot, p) - potential(s.q, p);
}

Vec4 drag_force(const SwimmerConfig& q, const Vec4& qdot, const SwimmerParams& p) {
    double fx = 0.0, fy = 0.0;
    const double tau1 = rod_drag(q.phi1, qdot[0], qdot[2], qdot[3], p.L1, p, fx, fy);
    const double tau2 = rod_drag(q.phi2, qdot[1], qdot[2], qdot[3], p.L2, p, fx, fy);
    return {tau1, tau2, fx, fy};
}

Vec4 shape_force(const Vec4& qdot, const SwimmerParams& p) {
    const double tau = -p.c_B * (qdot[0] - qdot[1]);
    return {tau, -tau, 0.0, 0.0};
}

Vec4 swim_force(double t, const SwimmerParams& p) {
    const double tau = p.eps * std::sin(2.0 * std::numbers::pi * t / p.T_f);
    return {tau, -tau, 0.0, 0.0};
}

Vec4 total_force(const SwimmerConfig& q, const Vec4& qdot, double t, const SwimmerParams& p) {
    return drag_force(q, qdot, p) + shape_force(qdot, p) + swim_force(t, p);
}

Vec4 accelerations(const SwimmerConfig& q, const Vec4& qdot, double t, const SwimmerParams& p) {
    const Vec4 rhs = -potential_gradient(q, p) - coriolis(q, qdot, p) + total_force(q, qdot, t, p);
    const Eigen::LLT<Mat4> llt(mass_matrix(q, p));
    if (llt.info() != Eigen::Success) throw NumericalError("swimmer mass matrix is not positive definite");
    return llt.solve(rhs);
}

SystemField swimmer_field(const SwimmerParams& p) {
    p.validate();
    SystemField f;
    f.dimension = kSwimmerDim;
    f.period = p.T_f;
    f.rhs = [p](const State& x, double t) {
        const Vec4 qdot = rates(x);
        State dx(kSwimmerDim);
        dx.head<4>() = qdot;
        dx.tail<4>() = accelerations(config_of(x), qdot, t, p);
        return dx;
    };
    f.symmetry = swimmer_chart().symmetry;
    return f;
}

State swimmer_act(const lie::SE2Element& z, const State& x) {
    const Eigen::Matrix2d r = rotation(z.theta);
    State y = x;
    y[0] += z.theta;
    y[1] += z.theta;
    y.segment<2>(2) = r * x.segment<2>(2) + z.translation();
    y.segment<2>(6) = r * x.segment<2>(6);
    return y;
}

reduction::QuotientChart swimmer_chart() {
    reduction::QuotientChart c;
    c.full_dim = kSwimmerDim;
    c.reduced_dim = kSwimmerReducedDim;
    c.symmetry.group = "SE2";
    c.symmetry.act = [](const lie::GroupElement& g, const State& x) {
        return swimmer_act(std::get<lie::SE2Element>(g), x);
    };
    c.symmetry.tangent_act = [](const lie::GroupElement& g, const State&, const State& v) {
        const Eigen::Matrix2d r = rotation(std::get<lie::SE2Element>(g).theta);
        State w = v;
        w.segment<2>(2) = r * v.segment<2>(2);
        w.segment<2>(6) = r * v.segment<2>(6);
        return w;
    };
    c.project = [](const State& x) {
        if (x.size() != kSwimmerDim) throw std::invalid_argument("swimmer state must have 8 entries");
        const Eigen::Vector2d v = rotation(-x[0]) * x.segment<2>(6);
        return State{{x[0] - x[1], x[4] - x[5], x[4], v.x(), v.y()}};
    };
    c.project_tangent = [](const State& x, const State& xdot) {
        const double s = std::sin(x[0]), co = std::cos(x[0]);
        Eigen::Matrix2d d_rot;  // d/dphi of rotation(-phi)
        d_rot << -s, co,
                 -co, -s;
        const Eigen::Vector2d dv =
            rotation(-x[0]) * xdot.segment<2>(6) + xdot[0] * (d_rot * x.segment<2>(6));
        return State{{xdot[0] - xdot[1], xdot[4] - xdot[5], xdot[4], dv.x(), dv.y()}};
    };
    c.representative = [](const State& r) {
        if (r.size() != kSwimmerReducedDim)
            throw std::invalid_argument("reduced swimmer state must have 5 entries");
        State x(kSwimmerDim);
        x << 0.0, -r[0], 0.0, 0.0, r[2], r[2] - r[1], r[3], r[4];
        return x;
    };
    c.frame_of = [](const State& x) -> lie::GroupElement {
        return lie::SE2Element{lie::wrap_angle(x[0]), x[2], x[3]};
    };
    c.body_velocity = [](const State& x, const State& xdot) -> lie::AlgebraElement {
        const Eigen::Vector2d v = rotation(-x[0]) * xdot.segment<2>(2);
        return lie::SE2Algebra{xdot[0], v.x(), v.y()};
    };
    return c;
}

State swimmer_rest(const SwimmerParams& p) {
    State r = State::Zero(kSwimmerReducedDim);
    r[0] = p.theta_bar;
    return r;
}

EnergyReport energy(const State& x, double t, const SwimmerParams& p) {
    const SwimmerConfig q = config_of(x);
    const Vec4 qdot = rates(x);
    EnergyReport e;
    e.kinetic = kinetic_energy(q, qdot, p);
    e.potential = potential(q, p);
    e.total = e.kinetic + e.potential;
    e.dissipation_rate = total_force(q, qdot, t, p).dot(qdot);
    return e;
}

double energy_rate_residual(const dynamics::Trajectory& traj, const SwimmerParams& p) {
    const std::size_t n = traj.size();
    if (n < 5) throw std::invalid_argument("energy audit needs at least 5 samples");
    std::vector<double> e(n);
    for (std::size_t k = 0; k < n; ++k) e[k] = energy(traj.states[k], traj.times[k], p).total;
    double worst = 0.0;
    for (std::size_t k = 2; k + 2 < n; ++k) {
        const std::array<double, 5> nodes{traj.times[k - 2], traj.times[k - 1], traj.times[k],
                                          traj.times[k + 1], traj.times[k + 2]};
        const auto w = derivative_weights(traj.times[k], nodes);
        double de = 0.0;
        for (int j = 0; j < 5; ++j) de += w[static_cast<std::size_t>(j)] * e[k - 2 + static_cast<std::size_t>(j)];
        const double power = energy(traj.states[k], traj.times[k], p).dissipation_rate;
        worst = std::max(worst, std::abs(de - power));
    }
    return worst;
}

} // namespace relcycle::models
