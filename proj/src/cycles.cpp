#include "relcycle/cycles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "relcycle/errors.hpp"

namespace relcycle::cycles {

using dynamics::SystemField;

namespace {

double require_period(const SystemField& field) {
    if (!field.period) throw std::invalid_argument("stroboscopic shooting needs a periodic field");
    return *field.period;
}

} // namespace

const char* to_string(Stability s) {
    switch (s) {
    case Stability::stable: return "stable";
    case Stability::marginal: return "marginal";
    case Stability::unstable: return "unstable";
    }
    return "unknown";
}

Stability classify(const Eigen::VectorXcd& multipliers) {
    double largest = 0.0;
    for (const auto& m : multipliers) largest = std::max(largest, std::abs(m));
    if (largest <= 1.0 - kStabilityMargin) return Stability::stable;
    if (largest < 1.0 + kStabilityMargin) return Stability::marginal;
    return Stability::unstable;
}

CycleCertificate find_stroboscopic_cycle(const SystemField& field, const State& guess,
                                         const ShootingOptions& options) {
    const double T = require_period(field);
    if (guess.size() != field.dimension)
        throw std::invalid_argument("shooting guess has wrong dimension");
    const auto control = dynamics::default_period_control(T, options.steps_per_period);
    const double t0 = options.section_time;
    const auto residual_at = [&](const State& x) -> State {
        return dynamics::flow(field, x, t0, t0 + T, control) - x;
    };
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(field.dimension, field.dimension);

    State x = guess;
    State F = residual_at(x);
    double res = F.norm();
    int iter = 0;
    while (!(res < options.tol)) {
        if (iter >= options.max_iter || !std::isfinite(res)) {
            throw NewtonDivergence("shooting did not converge after " + std::to_string(iter) +
                                   " iterations (residual " + dynamics::format_double(res) + ")");
        }
        const Eigen::MatrixXd J =
            dynamics::monodromy(field, x, T, dynamics::MonodromyScheme::finite_difference,
                                control, t0)
                .matrix -
            identity;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= 1e-12 * std::max(1.0, sv(0))) {
            throw DegenerateCycle("shooting Jacobian is singular: a multiplier is at 1");
        }
        const State dx = J.fullPivLu().solve(-F);

        double lambda = 1.0;
        State x_new = x + dx;
        State F_new = residual_at(x_new);
        for (int k = 0; k < options.max_halvings && !(F_new.norm() < res); ++k) {
            lambda *= 0.5;
            x_new = x + lambda * dx;
            F_new = residual_at(x_new);
        }
        x = x_new;
        F = F_new;
        res = F.norm();
        ++iter;
    }

    const auto mono = dynamics::monodromy(field, x, T, dynamics::MonodromyScheme::finite_difference,
                                          control, t0);
    for (const auto& m : mono.multipliers) {
        if (std::abs(m - 1.0) < 1e-8)
            throw DegenerateCycle("cycle has a Floquet multiplier at 1");
    }

    CycleCertificate cert;
    cert.anchor = x;
    cert.period = T;
    cert.section_time = t0;
    cert.multipliers = mono.multipliers;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& m : mono.multipliers) worst = std::max(worst, std::log(std::abs(m)));
    cert.contraction_rate = worst / T;
    cert.newton_residual = res;
    cert.iterations = iter;
    cert.stability = classify(mono.multipliers);
    return cert;
}

CycleCertificate find_relative_cycle(const SystemField& field,
                                     const reduction::QuotientChart& chart,
                                     const State& reduced_guess, const ShootingOptions& options) {
    const SystemField reduced = reduction::reduced_field(field, chart);
    CycleCertificate cert = find_stroboscopic_cycle(reduced, reduced_guess, options);
    const auto control = dynamics::default_period_control(cert.period, options.steps_per_period);
    // The full flow closes to roughly the integration error, not the Newton tolerance.
    const double tol = std::max(1e-6, 10.0 * options.tol);
    cert.phase = reduction::phase_shift(field, chart, cert.anchor, cert.period, control, tol,
                                        cert.section_time);
    return cert;
}

double reintegration_residual(const SystemField& field, const CycleCertificate& cert,
                              const ShootingOptions& options) {
    const auto control = dynamics::default_period_control(cert.period, options.steps_per_period);
    const State end = dynamics::flow(field, cert.anchor, cert.section_time,
                                     cert.section_time + cert.period, control);
    return (end - cert.anchor).norm();
}

std::vector<State> sample_cycle(const SystemField& field, const CycleCertificate& cert, int count,
                                const ShootingOptions& options) {
    if (count < 1) throw std::invalid_argument("sample count must be positive");
    const int per_sample = std::max(1, options.steps_per_period / count);
    const double dt = cert.period / count;
    const auto control = dynamics::FixedStep{dt / per_sample};
    std::vector<State> out;
    out.reserve(static_cast<std::size_t>(count));
    State x = cert.anchor;
    out.push_back(x);
    for (int k = 1; k < count; ++k) {
        const double ta = cert.section_time + (k - 1) * dt;
        x = dynamics::flow(field, x, ta, ta + dt, control);
        out.push_back(x);
    }
    return out;
}

double cycle_amplitude(const SystemField& field, const CycleCertificate& cert,
                       const ShootingOptions& options) {
    double amp = 0.0;
    for (const State& x : sample_cycle(field, cert, 256, options)) amp = std::max(amp, x.norm());
    return amp;
}

RateEstimate transient_convergence_rate(const SystemField& field,
                                        const reduction::QuotientChart* chart, const State& x0,
                                        const CycleCertificate& cycle, double horizon,
                                        const ShootingOptions& options) {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    const SystemField cycle_field = chart ? reduction::reduced_field(field, *chart) : field;
    const auto separation = [&](const State& x, const State& on_cycle) {
        return ((chart ? chart->project(x) : x) - on_cycle).norm();
    };

    RateEstimate est;
    const double t0 = cycle.section_time;
    est.initial_distance = separation(x0, cycle.anchor);
    if (est.initial_distance < 1e-9) return est;

    // The cycle point at the same forcing phase is carried along on the same grid.
    const auto control = dynamics::FixedStep{cycle.period / options.steps_per_period};
    const auto traj = dynamics::integrate(field, x0, t0, t0 + horizon, control);
    const auto ref = dynamics::integrate(cycle_field, cycle.anchor, t0, t0 + horizon, control);

    const double fit_start = t0 + 0.2 * horizon;
    double peak = 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double d = separation(traj.states[k], ref.states[k]);
        peak = std::max(peak, d);
        if (traj.times[k] < fit_start || d < 1e-13) continue;
        const double t = traj.times[k] - t0;
        const double y = std::log(d);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        ++n;
    }
    est.final_distance = separation(traj.final_state(), ref.final_state());
    if (est.final_distance >= est.initial_distance || peak > 10.0 * est.initial_distance) {
        throw BasinEscape("distance to the cycle grew from " +
                          dynamics::format_double(est.initial_distance) + " to " +
                          dynamics::format_double(std::max(peak, est.final_distance)));
    }
    if (n < 2) return est;
    est.applicable = true;
    est.samples_used = n;
    est.rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return est;
}

SweepResult persistence_sweep(const FieldFamily& family, const reduction::QuotientChart* chart,
                              std::vector<double> eps_grid, const State& guess,
                              bool continuation, const ShootingOptions& options, int jobs) {
    std::sort(eps_grid.begin(), eps_grid.end());
    const auto solve = [&](double eps, const State& start) {
        const SystemField f = family(eps);
        CycleCertificate c = chart ? find_relative_cycle(f, *chart, start, options)
                                   : find_stroboscopic_cycle(f, start, options);
        c.epsilon = eps;
        return c;
    };

    SweepResult result;
    if (continuation) {
        State start = guess;
        for (double eps : eps_grid) {
            try {
                result.certificates.push_back(solve(eps, start));
            } catch (const NumericalError& e) {
                result.failed_epsilon = eps;
                result.failure = e.what();
                break;
            }
            start = result.certificates.back().anchor;
        }
        return result;
    }

    const std::size_t n = eps_grid.size();
    std::vector<std::optional<CycleCertificate>> slots(n);
    std::vector<std::string> errors(n);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i] = solve(eps_grid[i], guess);
            } catch (const NumericalError& e) {
                errors[i] = e.what();
            }
        }
    };
    const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, n)));
    std::vector<std::thread> pool;
    for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < n; ++i) {
        if (!slots[i]) {
            result.failed_epsilon = eps_grid[i];
            result.failure = errors[i];
            break;
        }
        result.certificates.push_back(std::move(*slots[i]));
    }
    return result;
}

} // namespace relcycle::cycles
