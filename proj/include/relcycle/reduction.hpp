#pragma once

#include <functional>

#include "relcycle/dynamics.hpp"
#include "relcycle/lie.hpp"

namespace relcycle::reduction {

using dynamics::State;

/// Coordinates on the orbit space of a free group action.
///
/// `representative(r)` is the point above r whose frame is the identity, and
/// `frame_of(x)` is the g with x = g . representative(project(x)).
/// `project_tangent(x, v)` is the derivative of `project` at x applied to v.
/// `body_velocity(x, v)` is g^{-1} dg/dt for a curve through x with velocity
/// v, where g = frame_of.
struct QuotientChart {
    int full_dim = 0;
    int reduced_dim = 0;
    dynamics::Symmetry symmetry;
    std::function<State(const State&)> project;
    std::function<State(const State&, const State&)> project_tangent;
    std::function<State(const State&)> representative;
    std::function<lie::GroupElement(const State&)> frame_of;
    std::function<lie::AlgebraElement(const State&, const State&)> body_velocity;
};

/// Per-period group phase of a relatively periodic orbit, with the
/// reduced-space closing error of the orbit it was read from.
struct PhaseShift {
    lie::GroupElement group_element;
    double period = 0.0;
    double residual = 0.0;
};

/// Field on the orbit space: lift by `representative`, evaluate, push forward
/// with `project_tangent`. Throws MissingSymmetry for fields without one.
dynamics::SystemField reduced_field(const dynamics::SystemField& field,
                                    const QuotientChart& chart);

/// Projects every sample of a full-space trajectory.
dynamics::Trajectory project(const dynamics::Trajectory& full, const QuotientChart& chart);

/// Lifts a reduced trajectory back to full space starting in frame g0.
///
/// Between consecutive samples the frame equation g' = g xi(t) is integrated
/// together with the reduced dynamics from the recorded sample, using the
/// given control, so the recorded reduced states are honoured exactly at the
/// sample times.
dynamics::Trajectory reconstruct(const dynamics::Trajectory& reduced_traj,
                                 const dynamics::SystemField& field,
                                 const QuotientChart& chart, const lie::GroupElement& g0,
                                 const dynamics::IntegratorControl& control);

/// Phase of the relative cycle through `cycle_anchor`: flows the full field
/// from representative(anchor) over [t0, t0 + T] and reads the frame.
/// Throws NonPeriodicOrbit when the projected end point misses the anchor by
/// more than `tol`.
PhaseShift phase_shift(const dynamics::SystemField& field, const QuotientChart& chart,
                       const State& cycle_anchor, double T,
                       const dynamics::IntegratorControl& control, double tol = 1e-6,
                       double t0 = 0.0);

/// frame_of(x(t0 + T)) * frame_of(x0)^{-1} for an arbitrary full-space start.
lie::GroupElement relative_phase(const dynamics::SystemField& field, const QuotientChart& chart,
                                 const State& x0, double T,
                                 const dynamics::IntegratorControl& control, double t0 = 0.0);

} // namespace relcycle::reduction
