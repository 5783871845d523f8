#include "relcycle/lie.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "relcycle/errors.hpp"

namespace relcycle::lie {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix2d rotation(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::Matrix2d r;
    r << c, -s,
         s, c;
    return r;
}

// sin(a)/a and (1 - cos(a))/a with series near zero.
void exp_coefficients(double a, double& sin_over, double& cos_over) {
    if (std::abs(a) < 1e-4) {
        const double a2 = a * a;
        sin_over = 1.0 - a2 / 6.0 + a2 * a2 / 120.0;
        cos_over = a / 2.0 - a * a2 / 24.0;
    } else {
        sin_over = std::sin(a) / a;
        cos_over = (1.0 - std::cos(a)) / a;
    }
}

} // namespace

double wrap_angle(double a) {
    double r = std::remainder(a, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    if (r > kPi) r -= 2.0 * kPi;
    return r;
}

SE2Element compose(const SE2Element& g1, const SE2Element& g2) {
    const Eigen::Vector2d t = rotation(g1.theta) * g2.translation() + g1.translation();
    return {wrap_angle(g1.theta + g2.theta), t.x(), t.y()};
}

SE2Element inverse(const SE2Element& g) {
    const Eigen::Vector2d t = -(rotation(-g.theta) * g.translation());
    return {wrap_angle(-g.theta), t.x(), t.y()};
}

TranslationElement compose(const TranslationElement& a, const TranslationElement& b) {
    if (a.shift.size() != b.shift.size())
        throw std::invalid_argument("translation dimension mismatch");
    return {a.shift + b.shift};
}

TranslationElement inverse(const TranslationElement& a) { return {-a.shift}; }

SE2Element exp(const SE2Algebra& xi, double t) {
    const double a = xi.omega * t;
    double so = 0.0, co = 0.0;
    exp_coefficients(a, so, co);
    const double ux = xi.vx * t;
    const double uy = xi.vy * t;
    return {wrap_angle(a), so * ux - co * uy, co * ux + so * uy};
}

SE2Algebra log(const SE2Element& g) {
    const double a = g.theta;
    if (kPi - std::abs(a) < 1e-12)
        throw BranchPointError("SE(2) log is multivalued at theta = +-pi");
    // V(a)^{-1} = [[A, a/2], [-a/2, A]] with A = (a/2) cot(a/2).
    double diag = 0.0;
    if (std::abs(a) < 1e-4) {
        diag = 1.0 - a * a / 12.0;
    } else {
        diag = 0.5 * a * std::sin(a) / (1.0 - std::cos(a));
    }
    const double half = 0.5 * a;
    return {a, diag * g.tx + half * g.ty, -half * g.tx + diag * g.ty};
}

Eigen::Vector2d act_point(const SE2Element& g, const Eigen::Vector2d& p) {
    return rotation(g.theta) * p + g.translation();
}

SwimmerConfig act_config(const SE2Element& z, const SwimmerConfig& q) {
    const Eigen::Vector2d hinge = act_point(z, {q.x, q.y});
    return {wrap_angle(z.theta + q.phi1), wrap_angle(z.theta + q.phi2), hinge.x(), hinge.y()};
}

SwimmerState tangent_act(const SE2Element& z, const SwimmerState& s) {
    const Eigen::Vector2d v = rotation(z.theta) * Eigen::Vector2d(s.dx, s.dy);
    return {act_config(z, s.q), s.dphi1, s.dphi2, v.x(), v.y()};
}

double shape(const SwimmerConfig& q) { return wrap_angle(q.phi1 - q.phi2); }

GroupElement compose(const GroupElement& a, const GroupElement& b) {
    return std::visit(
        [](const auto& x, const auto& y) -> GroupElement {
            using X = std::decay_t<decltype(x)>;
            using Y = std::decay_t<decltype(y)>;
            if constexpr (std::is_same_v<X, Y>) {
                return compose(x, y);
            } else {
                throw std::invalid_argument("cannot compose elements of different groups");
            }
        },
        a, b);
}

GroupElement inverse(const GroupElement& a) {
    return std::visit([](const auto& x) -> GroupElement { return inverse(x); }, a);
}

Eigen::VectorXd coordinates(const GroupElement& g) {
    if (const auto* se2 = std::get_if<SE2Element>(&g)) {
        return Eigen::Vector3d(se2->theta, se2->tx, se2->ty);
    }
    return std::get<TranslationElement>(g).shift;
}

GroupElement from_coordinates(const GroupElement& like, const Eigen::VectorXd& c) {
    if (std::holds_alternative<SE2Element>(like)) {
        if (c.size() != 3) throw std::invalid_argument("SE(2) needs 3 coordinates");
        return SE2Element{wrap_angle(c[0]), c[1], c[2]};
    }
    return TranslationElement{c};
}

Eigen::VectorXd left_rate(const GroupElement& g, const AlgebraElement& xi) {
    if (const auto* se2 = std::get_if<SE2Element>(&g)) {
        const auto& v = std::get<SE2Algebra>(xi);
        const Eigen::Vector2d t = rotation(se2->theta) * Eigen::Vector2d(v.vx, v.vy);
        return Eigen::Vector3d(v.omega, t.x(), t.y());
    }
    return std::get<TranslationAlgebra>(xi).rate;
}

} // namespace relcycle::lie
