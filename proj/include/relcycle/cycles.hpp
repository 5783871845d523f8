#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relcycle/dynamics.hpp"
#include "relcycle/reduction.hpp"

namespace relcycle::cycles {

using dynamics::State;

enum class Stability { stable, marginal, unstable };

const char* to_string(Stability s);

/// Multipliers with modulus at most 1 - margin are contracting; those within
/// margin of the unit circle make a cycle marginal.
inline constexpr double kStabilityMargin = 1e-3;

Stability classify(const Eigen::VectorXcd& multipliers);

/// A periodic orbit of a forced field located by stroboscopic shooting.
/// `anchor` is the state at forcing phase `section_time`.
struct CycleCertificate {
    double epsilon = 0.0;
    State anchor;
    double period = 0.0;
    double section_time = 0.0;
    Eigen::VectorXcd multipliers;
    double contraction_rate = 0.0;
    double newton_residual = 0.0;
    int iterations = 0;
    Stability stability = Stability::unstable;
    std::optional<reduction::PhaseShift> phase;
};

struct ShootingOptions {
    double tol = 1e-10;
    int max_iter = 50;
    int steps_per_period = 2000;
    double section_time = 0.0;
    /// Step-halvings allowed in the residual line search.
    int max_halvings = 8;
};

/// Newton iteration on F(x) = Phi_T(x) - x with a finite-difference Jacobian
/// and step-halving line search. Throws NewtonDivergence or DegenerateCycle.
CycleCertificate find_stroboscopic_cycle(const dynamics::SystemField& field, const State& guess,
                                         const ShootingOptions& options = {});

/// Cycle of the reduced field with its group phase attached.
CycleCertificate find_relative_cycle(const dynamics::SystemField& field,
                                     const reduction::QuotientChart& chart,
                                     const State& reduced_guess,
                                     const ShootingOptions& options = {});

/// |Phi_T(anchor) - anchor| recomputed from scratch.
double reintegration_residual(const dynamics::SystemField& field, const CycleCertificate& cert,
                              const ShootingOptions& options = {});

/// `count` states uniformly spaced in time along one period of the cycle.
std::vector<State> sample_cycle(const dynamics::SystemField& field,
                                const CycleCertificate& cert, int count = 256,
                                const ShootingOptions& options = {});

/// Largest |x| over the sampled cycle.
double cycle_amplitude(const dynamics::SystemField& field, const CycleCertificate& cert,
                       const ShootingOptions& options = {});

struct RateEstimate {
    bool applicable = false;
    double rate = 0.0;
    double initial_distance = 0.0;
    double final_distance = 0.0;
    int samples_used = 0;
};

/// Fits log |x(t) - c(t)| ~ a + rate * t over the last 80% of `horizon`,
/// where c(t) is the cycle point at the same forcing phase.
/// With a chart, `field` is the full field, `x0` a full state, and distance
/// is measured after projection; `cycle` then belongs to the reduced field.
/// Throws BasinEscape when the distance ends larger than it started.
RateEstimate transient_convergence_rate(const dynamics::SystemField& field,
                                        const reduction::QuotientChart* chart,
                                        const State& x0, const CycleCertificate& cycle,
                                        double horizon, const ShootingOptions& options = {});

struct SweepResult {
    std::vector<CycleCertificate> certificates;
    std::optional<double> failed_epsilon;
    std::string failure;
};

using FieldFamily = std::function<dynamics::SystemField(double)>;

/// Finds the cycle for every epsilon in ascending order, stopping at the first
/// failure. With continuation each search starts from the previous anchor;
/// without it entries are independent and run on up to `jobs` threads.
SweepResult persistence_sweep(const FieldFamily& family, const reduction::QuotientChart* chart,
                              std::vector<double> eps_grid, const State& guess,
                              bool continuation, const ShootingOptions& options = {},
                              int jobs = 1);

} // namespace relcycle::cycles
