#pragma once

#include <Eigen/Core>

#include "relcycle/dynamics.hpp"
#include "relcycle/reduction.hpp"
#include "relcycle/swimmer_types.hpp"

namespace relcycle::models {

using dynamics::State;
using dynamics::SystemField;

// ---------------------------------------------------------------------------
// Forced damped spring and its translation-symmetric extension
// ---------------------------------------------------------------------------

/// x' = y, y' = -x - y + eps sin t. Period 2 pi.
SystemField spring_field(double eps);

/// Spring plus z' = y - x^2 - x y + eps cos t. Symmetric under z-translation.
SystemField three_d_field(double eps);

/// Quotient (x, y, z) -> (x, y) with frame z.
reduction::QuotientChart three_d_chart();

// ---------------------------------------------------------------------------
// Two-link swimmer
// ---------------------------------------------------------------------------

/// Two rigid links hinged at (x, y). Each link has its centre of mass at unit
/// distance from the hinge; L1, L2 only enter the drag integrals.
struct SwimmerParams {
    double M1 = 1.0, M2 = 1.0;
    double I1 = 1.0, I2 = 1.0;
    double k = 1.0;
    double theta_bar = 1.5707963267948966;
    double c_B = 0.5;
    double c_t = 1.0, c_n = 2.0;
    double L1 = 1.0, L2 = 1.0;
    double eps = 0.0;
    double T_f = 6.283185307179586;

    /// Throws std::invalid_argument on non-physical values.
    void validate() const;
};

/// State vector layout: (phi1, phi2, x, y, dphi1, dphi2, dx, dy).
inline constexpr int kSwimmerDim = 8;
inline constexpr int kSwimmerReducedDim = 5;

State to_vector(const SwimmerState& s);
SwimmerState from_vector(const State& v);

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

/// Kinetic metric: 2K = qdot^T M(q) qdot, coordinates (phi1, phi2, x, y).
Mat4 mass_matrix(const SwimmerConfig& q, const SwimmerParams& p);

/// Velocity-quadratic term c with M qddot + c = forces.
Vec4 coriolis(const SwimmerConfig& q, const Vec4& qdot, const SwimmerParams& p);

/// Shape angle theta = phi1 - phi2 measured from its rest value, wrapped to
/// (-pi, pi]; the spring sees the circle, not its cover.
double shape_deviation(const SwimmerConfig& q, const SwimmerParams& p);

double potential(const SwimmerConfig& q, const SwimmerParams& p);
Vec4 potential_gradient(const SwimmerConfig& q, const SwimmerParams& p);

double kinetic_energy(const SwimmerConfig& q, const Vec4& qdot, const SwimmerParams& p);
double lagrangian(const SwimmerState& s, const SwimmerParams& p);

/// Resistive drag on both links: density -(c_t t t^T + c_n n n^T) v(s) along
/// each rod, integrated in closed form and mapped by virtual work.
Vec4 drag_force(const SwimmerConfig& q, const Vec4& qdot, const SwimmerParams& p);

/// Joint friction -c_B theta' d theta.
Vec4 shape_force(const Vec4& qdot, const SwimmerParams& p);

/// Joint torque eps sin(2 pi t / T_f) d theta.
Vec4 swim_force(double t, const SwimmerParams& p);

/// Sum of the non-conservative forces at time t.
Vec4 total_force(const SwimmerConfig& q, const Vec4& qdot, double t, const SwimmerParams& p);

/// Generalized accelerations solving M qddot = -grad U - c + Q.
Vec4 accelerations(const SwimmerConfig& q, const Vec4& qdot, double t, const SwimmerParams& p);

/// 8-dimensional first-order field, T_f-periodic, SE(2)-symmetric.
SystemField swimmer_field(const SwimmerParams& p);

/// SE(2) action on the state vector. Angles are shifted without wrapping so
/// the action is smooth on the integration chart.
State swimmer_act(const lie::SE2Element& z, const State& x);

/// Reduced coordinates (theta, theta', omega, v1, v2): interior angle
/// phi1 - phi2, its rate, link-1 angular rate, and hinge velocity in the
/// link-1 frame. The identity frame puts link 1 along +x with the hinge at 0.
reduction::QuotientChart swimmer_chart();

/// Reduced rest state (theta_bar, 0, 0, 0, 0).
State swimmer_rest(const SwimmerParams& p);

struct EnergyReport {
    double kinetic = 0.0;
    double potential = 0.0;
    double total = 0.0;
    /// Power of the non-conservative forces, equal to dE/dt.
    double dissipation_rate = 0.0;
};

EnergyReport energy(const State& x, double t, const SwimmerParams& p);

/// max_k |dE/dt - <F, qdot>| over the interior samples, with dE/dt from a
/// five-point finite-difference stencil on the sample times.
double energy_rate_residual(const dynamics::Trajectory& traj, const SwimmerParams& p);

} // namespace relcycle::models
