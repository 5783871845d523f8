#include "relcycle/dynamics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "relcycle/errors.hpp"

namespace relcycle::dynamics {

namespace {

constexpr double kMinStep = 1e-10;
constexpr double kSafety = 0.9;

void check_inputs(const SystemField& field, const State& x0, double t0, double t1) {
    if (!(t1 > t0)) throw std::invalid_argument("integrate: t1 must exceed t0");
    if (x0.size() != field.dimension)
        throw std::invalid_argument("integrate: initial state has wrong dimension");
}

State rk4_step(const SystemField& f, const State& x, double t, double h, std::size_t& evals) {
    const State k1 = f(x, t);
    const State k2 = f(x + 0.5 * h * k1, t + 0.5 * h);
    const State k3 = f(x + 0.5 * h * k2, t + 0.5 * h);
    const State k4 = f(x + h * k3, t + h);
    evals += 4;
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <typename OnAccept>
void run_fixed(const SystemField& f, const State& x0, double t0, double t1, double h,
               IntegrationStats& stats, OnAccept&& on_accept) {
    if (!(h > 0.0)) throw std::invalid_argument("fixed step must be positive");
    const double span = t1 - t0;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / h * (1.0 - 1e-12))));
    State x = x0;
    double t = t0;
    stats.min_step = std::min(h, span);
    stats.max_step = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t_next = (k + 1 == n) ? t1 : t0 + static_cast<double>(k + 1) * h;
        const double step = t_next - t;
        x = rk4_step(f, x, t, step, stats.evaluations);
        t = t_next;
        ++stats.accepted;
        stats.min_step = std::min(stats.min_step, step);
        stats.max_step = std::max(stats.max_step, step);
        on_accept(t, x);
    }
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

double scaled_norm(const State& v, const State& x, double tol) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        m = std::max(m, std::abs(v[i]) / (tol + tol * std::abs(x[i])));
    }
    return m;
}

template <typename OnAccept>
void run_adaptive(const SystemField& f, const State& x0, double t0, double t1, double tol,
                  IntegrationStats& stats, OnAccept&& on_accept) {
    if (!(tol > 0.0)) throw std::invalid_argument("adaptive tolerance must be positive");
    const double span = t1 - t0;
    const double h_max = span / 10.0;

    State x = x0;
    double t = t0;
    State k1 = f(x, t);
    ++stats.evaluations;

    // Initial step from the size of x and x' (Hairer-Norsett-Wanner, simplified).
    double h = 0.0;
    {
        const double d0 = scaled_norm(x, x, tol);
        const double d1 = scaled_norm(k1, x, tol);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::clamp(h, kMinStep, h_max);
    }
    stats.min_step = h_max;
    stats.max_step = 0.0;

    while (t < t1) {
        bool last = false;
        if (t + h >= t1 || t1 - (t + h) < 1e-12 * span) {
            h = t1 - t;
            last = true;
        }
        const State k2 = f(x + h * (a21 * k1), t + c2 * h);
        const State k3 = f(x + h * (a31 * k1 + a32 * k2), t + c3 * h);
        const State k4 = f(x + h * (a41 * k1 + a42 * k2 + a43 * k3), t + c4 * h);
        const State k5 = f(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), t + c5 * h);
        const State k6 =
            f(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), t + h);
        const State x_new = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const State k7 = f(x_new, t + h);
        stats.evaluations += 6;

        const State err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double err = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double sc = tol + tol * std::max(std::abs(x[i]), std::abs(x_new[i]));
            err = std::max(err, std::abs(err_vec[i]) / sc);
        }

        const double factor =
            err == 0.0 ? 5.0 : std::clamp(kSafety * std::pow(err, -0.2), 0.2, 5.0);
        if (err <= 1.0) {
            t = last ? t1 : t + h;
            x = x_new;
            k1 = k7;
            ++stats.accepted;
            stats.max_error_estimate = std::max(stats.max_error_estimate, err * tol);
            stats.min_step = std::min(stats.min_step, h);
            stats.max_step = std::max(stats.max_step, h);
            on_accept(t, x);
            h = std::clamp(h * factor, kMinStep, h_max);
        } else {
            ++stats.rejected;
            const double h_new = h * std::min(1.0, factor);
            if (h_new < kMinStep) {
                throw StiffnessError("adaptive step underflow at t = " + format_double(t));
            }
            h = std::min(h_new, h_max);
        }
    }
}

template <typename OnAccept>
IntegrationStats dispatch(const SystemField& f, const State& x0, double t0, double t1,
                          const IntegratorControl& control, OnAccept&& on_accept) {
    IntegrationStats stats;
    if (const auto* fixed = std::get_if<FixedStep>(&control)) {
        run_fixed(f, x0, t0, t1, fixed->h, stats, on_accept);
    } else {
        run_adaptive(f, x0, t0, t1, std::get<Adaptive>(control).tol, stats, on_accept);
    }
    return stats;
}

} // namespace

Eigen::MatrixXd SystemField::jacobian_at(const State& x, double t) const {
    if (jacobian) return jacobian(x, t);
    Eigen::MatrixXd j(dimension, dimension);
    State xp = x;
    for (int i = 0; i < dimension; ++i) {
        const double h = fd_step(x[i]);
        xp[i] = x[i] + h;
        const State fp = rhs(xp, t);
        xp[i] = x[i] - h;
        const State fm = rhs(xp, t);
        xp[i] = x[i];
        j.col(i) = (fp - fm) / (2.0 * h);
    }
    return j;
}

Trajectory integrate(const SystemField& field, const State& x0, double t0, double t1,
                     const IntegratorControl& control) {
    check_inputs(field, x0, t0, t1);
    Trajectory traj;
    traj.times.push_back(t0);
    traj.states.push_back(x0);
    traj.stats = dispatch(field, x0, t0, t1, control, [&](double t, const State& x) {
        traj.times.push_back(t);
        traj.states.push_back(x);
    });
    return traj;
}

State flow(const SystemField& field, const State& x0, double t0, double t1,
           const IntegratorControl& control) {
    check_inputs(field, x0, t0, t1);
    State last = x0;
    dispatch(field, x0, t0, t1, control, [&](double, const State& x) { last = x; });
    return last;
}

IntegratorControl default_period_control(double period, int steps_per_period) {
    return FixedStep{period / steps_per_period};
}

double fd_step(double xi) { return std::max(1e-6, 1e-6 * std::abs(xi)); }

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    return solver.eigenvalues();
}

MonodromyResult monodromy(const SystemField& field, const State& anchor, double T,
                          MonodromyScheme scheme, const IntegratorControl& control, double t0) {
    const int d = field.dimension;
    MonodromyResult out;
    if (scheme == MonodromyScheme::finite_difference) {
        out.matrix.resize(d, d);
        State xp = anchor;
        for (int i = 0; i < d; ++i) {
            const double h = fd_step(anchor[i]);
            xp[i] = anchor[i] + h;
            const State fp = flow(field, xp, t0, t0 + T, control);
            xp[i] = anchor[i] - h;
            const State fm = flow(field, xp, t0, t0 + T, control);
            xp[i] = anchor[i];
            out.matrix.col(i) = (fp - fm) / (2.0 * h);
        }
    } else {
        // Variational equations V' = J(x, t) V with V(t0) = I, stored column-major.
        SystemField augmented;
        augmented.dimension = d + d * d;
        augmented.rhs = [&field, d](const State& z, double t) {
            const State x = z.head(d);
            const Eigen::Map<const Eigen::MatrixXd> v(z.data() + d, d, d);
            State dz(d + d * d);
            dz.head(d) = field(x, t);
            Eigen::Map<Eigen::MatrixXd>(dz.data() + d, d, d) = field.jacobian_at(x, t) * v;
            return dz;
        };
        State z0(d + d * d);
        z0.head(d) = anchor;
        Eigen::Map<Eigen::MatrixXd>(z0.data() + d, d, d).setIdentity();
        const State z1 = flow(augmented, z0, t0, t0 + T, control);
        out.matrix = Eigen::Map<const Eigen::MatrixXd>(z1.data() + d, d, d);
    }
    out.multipliers = eigenvalues(out.matrix);
    return out;
}

double equivariance_residual(const SystemField& field, const lie::GroupElement& z,
                             std::span<const State> samples, double t) {
    if (!field.symmetry) throw MissingSymmetry("field has no symmetry descriptor");
    const Symmetry& sym = *field.symmetry;
    double worst = 0.0;
    for (const State& x : samples) {
        const State pushed = sym.tangent_act(z, x, field(x, t));
        const State moved = field(sym.act(z, x), t);
        worst = std::max(worst, (pushed - moved).norm());
    }
    return worst;
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void write_csv(std::ostream& os, const Trajectory& traj, const std::vector<std::string>& names,
               const std::vector<std::string>& extra_names,
               const std::function<std::vector<double>(double, const State&)>& extra) {
    const Eigen::Index dim = traj.states.empty() ? 0 : traj.states.front().size();
    if (!names.empty() && static_cast<Eigen::Index>(names.size()) != dim)
        throw std::invalid_argument("write_csv: column names do not match state dimension");
    os << 't';
    for (Eigen::Index i = 0; i < dim; ++i) {
        os << ',' << (names.empty() ? "x" + std::to_string(i) : names[static_cast<std::size_t>(i)]);
    }
    for (const auto& n : extra_names) os << ',' << n;
    os << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << format_double(traj.times[k]);
        const State& x = traj.states[k];
        for (Eigen::Index i = 0; i < dim; ++i) os << ',' << format_double(x[i]);
        if (extra) {
            for (double v : extra(traj.times[k], x)) os << ',' << format_double(v);
        }
        os << '\n';
    }
}

} // namespace relcycle::dynamics
