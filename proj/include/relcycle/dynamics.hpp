#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "relcycle/lie.hpp"

namespace relcycle::dynamics {

using State = Eigen::VectorXd;

/// Declares how a group acts on a field's state space and on its tangent
/// vectors. `act` is the left action g . x, `tangent_act(g, x, v)` pushes a
/// tangent vector v based at x forward along that action.
struct Symmetry {
    std::string group;
    std::function<State(const lie::GroupElement&, const State&)> act;
    std::function<State(const lie::GroupElement&, const State&, const State&)> tangent_act;
};

/// A vector field x' = rhs(x, t). When `period` is set the field is
/// T-periodic in t; when `jacobian` is empty, derivatives are taken by
/// central differences of rhs.
struct SystemField {
    int dimension = 0;
    std::function<State(const State&, double)> rhs;
    std::optional<double> period;
    std::optional<Symmetry> symmetry;
    std::function<Eigen::MatrixXd(const State&, double)> jacobian;

    State operator()(const State& x, double t) const { return rhs(x, t); }
    Eigen::MatrixXd jacobian_at(const State& x, double t) const;
};

struct FixedStep {
    double h = 1e-2;
};

/// Dormand-Prince 5(4) with mixed absolute/relative tolerance `tol`.
struct Adaptive {
    double tol = 1e-10;
};

using IntegratorControl = std::variant<FixedStep, Adaptive>;

struct IntegrationStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
    double max_error_estimate = 0.0;
    double min_step = 0.0;
    double max_step = 0.0;
};

/// Accepted steps of one integration. times is strictly increasing and
/// states[i] is the state at times[i].
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    IntegrationStats stats;

    std::size_t size() const { return times.size(); }
    const State& final_state() const { return states.back(); }
};

/// Integrates from t0 to exactly t1, recording every accepted step.
/// Throws StiffnessError when the adaptive step underflows.
Trajectory integrate(const SystemField& field, const State& x0, double t0, double t1,
                     const IntegratorControl& control);

/// Same as integrate() but keeps only the final state.
State flow(const SystemField& field, const State& x0, double t0, double t1,
           const IntegratorControl& control);

enum class MonodromyScheme { finite_difference, tangent_propagation };

struct MonodromyResult {
    Eigen::MatrixXd matrix;
    Eigen::VectorXcd multipliers;
};

/// Fixed RK4 with n steps across the period; smooth in the initial state,
/// which finite differencing of the flow map relies on.
IntegratorControl default_period_control(double period, int steps_per_period = 2000);

/// Linearized flow map d(Phi_{t0 -> t0+T})/dx at `anchor`.
MonodromyResult monodromy(const SystemField& field, const State& anchor, double T,
                          MonodromyScheme scheme, const IntegratorControl& control,
                          double t0 = 0.0);

/// Finite-difference step used for coordinate i of x (shared with Newton).
double fd_step(double xi);

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& m);

/// max over samples of |g . X(x, t) - X(g . x, t)|. Requires field.symmetry.
double equivariance_residual(const SystemField& field, const lie::GroupElement& z,
                             std::span<const State> samples, double t);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

/// Writes `t,<names...>` then one row per sample. With no names the state
/// columns are called x0, x1, ...; `extra` appends derived columns.
void write_csv(std::ostream& os, const Trajectory& traj,
               const std::vector<std::string>& names = {},
               const std::vector<std::string>& extra_names = {},
               const std::function<std::vector<double>(double, const State&)>& extra = {});

} // namespace relcycle::dynamics
