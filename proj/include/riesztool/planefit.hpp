#pragma once

#include "riesztool/dyadic.hpp"

namespace riesz {

/// Weighted least-squares n-plane through the atoms of mu inside the region:
/// base = weighted centroid, frame = top-n principal directions of the
/// weighted second-moment matrix. Throws when the atoms span less than n
/// dimensions.
AffinePlane fit_plane_l2(const DiscreteMeasure& mu, const Ball& region);

/// Same fit from an explicit atom list.
AffinePlane fit_plane_atoms(const DiscreteMeasure& mu, const std::vector<int>& atoms);

/// Non-throwing variant; empty optional on degenerate rank.
std::optional<AffinePlane> try_fit_plane_atoms(const DiscreteMeasure& mu,
                                               const std::vector<int>& atoms);

/// Plane obtained from `base` by tilting its frame with the (d-n) x n matrix
/// packed in params[0 .. n(d-n)) and shifting the base point by the normal
/// offsets in params[n(d-n) .. (n+1)(d-n)).
AffinePlane perturb_plane(const AffinePlane& base, const Vec& params);

/// Derivative-free Nelder-Mead minimizer; returns the best parameter vector.
Vec nelder_mead(const std::function<double(const Vec&)>& objective, const Vec& start,
                double step, int max_iters = 400, double tol = 1e-10);

enum class BetaP { one, two, infinity };

struct BetaResult {
    double value = 0.0;
    AffinePlane plane;  // candidate achieving the reported value
    bool refined = false;
};

/// Jones-type beta number of a cube: scale-normalized L^p deviation of mu on
/// 3Q from the best n-plane. p=2 is computed exactly through the weighted
/// second-moment matrix; p=1 and p=inf start from the L2 plane and refine by
/// Nelder-Mead over plane parameters.
BetaResult beta_number(const DiscreteMeasure& mu, const DyadicCube& cube, BetaP p,
                       bool refine = true);

/// Beta over an explicit ball (beta_{p,F}(x,t) of the stopping conditions,
/// integration region |x-y| <= 3t, normalization by t).
BetaResult beta_number_ball(const DiscreteMeasure& mu, const Vec& center, double t, BetaP p,
                            bool refine = false);

}  // namespace riesz
