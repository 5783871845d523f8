#include "relcycle/reduction.hpp"

#include <stdexcept>

#include "relcycle/errors.hpp"

namespace relcycle::reduction {

using dynamics::SystemField;
using dynamics::Trajectory;

SystemField reduced_field(const SystemField& field, const QuotientChart& chart) {
    if (!field.symmetry) throw MissingSymmetry("reduced_field needs a symmetric field");
    if (field.dimension != chart.full_dim)
        throw std::invalid_argument("chart and field dimensions differ");
    SystemField out;
    out.dimension = chart.reduced_dim;
    out.period = field.period;
    out.rhs = [field, chart](const State& r, double t) {
        const State x = chart.representative(r);
        return chart.project_tangent(x, field(x, t));
    };
    return out;
}

Trajectory project(const Trajectory& full, const QuotientChart& chart) {
    Trajectory out;
    out.times = full.times;
    out.stats = full.stats;
    out.states.reserve(full.states.size());
    for (const State& x : full.states) out.states.push_back(chart.project(x));
    return out;
}

Trajectory reconstruct(const Trajectory& reduced_traj, const SystemField& field,
                       const QuotientChart& chart, const lie::GroupElement& g0,
                       const dynamics::IntegratorControl& control) {
    if (reduced_traj.size() == 0) throw std::invalid_argument("empty reduced trajectory");
    if (!field.symmetry) throw MissingSymmetry("reconstruct needs a symmetric field");
    const int rd = chart.reduced_dim;
    const Eigen::Index gd = lie::coordinates(g0).size();

    // Skew product: reduced state followed by raw group coordinates.
    SystemField joint;
    joint.dimension = rd + static_cast<int>(gd);
    joint.rhs = [&](const State& z, double t) {
        const State r = z.head(rd);
        const lie::GroupElement g = lie::from_coordinates(g0, z.tail(gd));
        const State x = chart.representative(r);
        const State xdot = field(x, t);
        State dz(z.size());
        dz.head(rd) = chart.project_tangent(x, xdot);
        dz.tail(gd) = lie::left_rate(g, chart.body_velocity(x, xdot));
        return dz;
    };

    Trajectory out;
    out.times = reduced_traj.times;
    out.states.reserve(reduced_traj.size());
    State gc = lie::coordinates(g0);
    const auto lift = [&](const State& r, const State& coords) {
        return chart.symmetry.act(lie::from_coordinates(g0, coords), chart.representative(r));
    };
    out.states.push_back(lift(reduced_traj.states.front(), gc));
    for (std::size_t k = 0; k + 1 < reduced_traj.size(); ++k) {
        State z(rd + gd);
        z.head(rd) = reduced_traj.states[k];
        z.tail(gd) = gc;
        const State z1 =
            dynamics::flow(joint, z, reduced_traj.times[k], reduced_traj.times[k + 1], control);
        gc = z1.tail(gd);
        out.states.push_back(lift(reduced_traj.states[k + 1], gc));
    }
    return out;
}

PhaseShift phase_shift(const SystemField& field, const QuotientChart& chart,
                       const State& cycle_anchor, double T,
                       const dynamics::IntegratorControl& control, double tol, double t0) {
    if (!field.symmetry) throw MissingSymmetry("phase_shift needs a symmetric field");
    const State x0 = chart.representative(cycle_anchor);
    const State xT = dynamics::flow(field, x0, t0, t0 + T, control);
    const double residual = (chart.project(xT) - cycle_anchor).norm();
    if (residual > tol) {
        throw NonPeriodicOrbit("anchor does not close after one period (residual " +
                                   dynamics::format_double(residual) + ")",
                               residual);
    }
    return {chart.frame_of(xT), T, residual};
}

lie::GroupElement relative_phase(const SystemField& field, const QuotientChart& chart,
                                 const State& x0, double T,
                                 const dynamics::IntegratorControl& control, double t0) {
    const State xT = dynamics::flow(field, x0, t0, t0 + T, control);
    return lie::compose(chart.frame_of(xT), lie::inverse(chart.frame_of(x0)));
}

} // namespace relcycle::reduction
