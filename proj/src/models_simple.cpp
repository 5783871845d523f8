#include <cmath>
#include <numbers>

#include "relcycle/models.hpp"

namespace relcycle::models {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double z_shift(const lie::GroupElement& g) {
    return std::get<lie::TranslationElement>(g).shift[0];
}

} // namespace

SystemField spring_field(double eps) {
    SystemField f;
    f.dimension = 2;
    f.period = kTwoPi;
    f.rhs = [eps](const State& x, double t) {
        return State{{x[1], -x[0] - x[1] + eps * std::sin(t)}};
    };
    f.jacobian = [](const State&, double) {
        Eigen::MatrixXd j(2, 2);
        j << 0, 1,
            -1, -1;
        return j;
    };
    return f;
}

SystemField three_d_field(double eps) {
    SystemField f;
    f.dimension = 3;
    f.period = kTwoPi;
    f.rhs = [eps](const State& s, double t) {
        const double x = s[0], y = s[1];
        return State{{y, -x - y + eps * std::sin(t), y - x * x - x * y + eps * std::cos(t)}};
    };
    f.jacobian = [](const State& s, double) {
        const double x = s[0], y = s[1];
        Eigen::MatrixXd j(3, 3);
        j << 0, 1, 0,
            -1, -1, 0,
            -2 * x - y, 1 - x, 0;
        return j;
    };
    f.symmetry = three_d_chart().symmetry;
    return f;
}

reduction::QuotientChart three_d_chart() {
    reduction::QuotientChart c;
    c.full_dim = 3;
    c.reduced_dim = 2;
    c.symmetry.group = "R1";
    c.symmetry.act = [](const lie::GroupElement& g, const State& x) {
        State y = x;
        y[2] += z_shift(g);
        return y;
    };
    c.symmetry.tangent_act = [](const lie::GroupElement&, const State&, const State& v) {
        return v;
    };
    c.project = [](const State& x) { return State(x.head(2)); };
    c.project_tangent = [](const State&, const State& v) { return State(v.head(2)); };
    c.representative = [](const State& r) { return State{{r[0], r[1], 0.0}}; };
    c.frame_of = [](const State& x) -> lie::GroupElement {
        return lie::TranslationElement{Eigen::VectorXd::Constant(1, x[2])};
    };
    c.body_velocity = [](const State&, const State& v) -> lie::AlgebraElement {
        return lie::TranslationAlgebra{Eigen::VectorXd::Constant(1, v[2])};
    };
    return c;
}

} // namespace relcycle::models
