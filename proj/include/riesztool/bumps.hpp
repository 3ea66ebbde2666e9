#pragma once

#include <cmath>

namespace riesz {

/// Quintic smoothstep: 0 for t<=0, 1 for t>=1, C^2 at the joins.
inline double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

/// Radial cutoff profile with chi_{|x|>=1} <= psi <= chi_{|x|>=1/2}:
/// 0 for r <= 1/2, 1 for r >= 1.
inline double psi_outer(double r) { return smoothstep5(2.0 * r - 1.0); }

/// Radial bump with chi_{B(0,1/8)} <= phi <= chi_{B(0,1/4)}:
/// 1 for r <= 1/8, 0 for r >= 1/4.
inline double phi_gen(double r) { return 1.0 - smoothstep5(8.0 * r - 1.0); }

/// Band profile phi(r) = phi_gen(r) - phi_gen(2r), supported on
/// 1/16 <= r <= 1/4. The dyadic family phi_j(x) = phi_band(2^j |x|) is a
/// partition of unity away from the origin.
inline double phi_band(double r) { return phi_gen(r) - phi_gen(2.0 * r); }

// Support annulus of phi_band(2^j |x|): [kBandInner, kBandOuter] * 2^{-j}.
inline constexpr double kBandInner = 1.0 / 16.0;
inline constexpr double kBandOuter = 1.0 / 4.0;

}  // namespace riesz
