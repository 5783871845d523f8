#pragma once

#include <variant>

#include <Eigen/Core>

#include "relcycle/swimmer_types.hpp"

namespace relcycle::lie {

/// Maps an angle into (-pi, pi].
double wrap_angle(double a);

/// Rigid motion of the plane: rotate by theta, then translate by (tx, ty).
/// theta is kept in (-pi, pi].
struct SE2Element {
    double theta = 0.0;
    double tx = 0.0;
    double ty = 0.0;

    static SE2Element identity() { return {}; }
    Eigen::Vector2d translation() const { return {tx, ty}; }
};

/// Body-frame velocity in se(2).
struct SE2Algebra {
    double omega = 0.0;
    double vx = 0.0;
    double vy = 0.0;
};

/// Element of the abelian group (R^n, +).
struct TranslationElement {
    Eigen::VectorXd shift;

    static TranslationElement identity(Eigen::Index n) {
        return {Eigen::VectorXd::Zero(n)};
    }
};

/// Rate in the Lie algebra of (R^n, +), which is R^n itself.
struct TranslationAlgebra {
    Eigen::VectorXd rate;
};

SE2Element compose(const SE2Element& g1, const SE2Element& g2);
SE2Element inverse(const SE2Element& g);

TranslationElement compose(const TranslationElement& a, const TranslationElement& b);
TranslationElement inverse(const TranslationElement& a);

/// exp(t * xi). Translation is the rotation integrated along the path.
SE2Element exp(const SE2Algebra& xi, double t = 1.0);

/// Inverse of exp(., 1). Throws BranchPointError when |theta| = pi, where
/// the logarithm is not unique.
SE2Algebra log(const SE2Element& g);

Eigen::Vector2d act_point(const SE2Element& g, const Eigen::Vector2d& p);

/// Rotates both links by theta and moves the hinge rigidly; angles come back
/// wrapped.
SwimmerConfig act_config(const SE2Element& z, const SwimmerConfig& q);

/// Tangent lift of act_config: link rates unchanged, hinge velocity rotated.
SwimmerState tangent_act(const SE2Element& z, const SwimmerState& s);

/// Interior angle phi1 - phi2, wrapped.
double shape(const SwimmerConfig& q);

// Type-erased group elements, used by the symmetry/reduction layer which
// handles both the planar and the translation examples.

using GroupElement = std::variant<SE2Element, TranslationElement>;
using AlgebraElement = std::variant<SE2Algebra, TranslationAlgebra>;

GroupElement compose(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& a);

/// Flat coordinates of a group element: (theta, tx, ty) or the shift vector.
Eigen::VectorXd coordinates(const GroupElement& g);

/// Rebuilds an element of the same kind as `like` from coordinates.
GroupElement from_coordinates(const GroupElement& like, const Eigen::VectorXd& c);

/// Coordinate derivative of a curve g(t) with g^{-1} g' = xi.
Eigen::VectorXd left_rate(const GroupElement& g, const AlgebraElement& xi);

} // namespace relcycle::lie
