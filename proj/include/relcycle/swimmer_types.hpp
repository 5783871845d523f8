#pragma once

namespace relcycle {

/// Configuration of the two-link body: link angles against the x-axis and
/// hinge position.
struct SwimmerConfig {
    double phi1 = 0.0;
    double phi2 = 0.0;
    double x = 0.0;
    double y = 0.0;
};

/// Configuration plus rates.
struct SwimmerState {
    SwimmerConfig q;
    double dphi1 = 0.0;
    double dphi2 = 0.0;
    double dx = 0.0;
    double dy = 0.0;
};

} // namespace relcycle
