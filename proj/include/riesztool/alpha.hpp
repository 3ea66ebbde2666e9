#pragma once

#include "riesztool/planefit.hpp"
#include "riesztool/transport.hpp"

namespace riesz {

struct AlphaOptions {
    double spacing_factor = 16.0;  // finest plane-grid spacing = side / factor
    bool refine = true;            // Nelder-Mead over the candidate plane
    int golden_iters = 18;
    int node_cap = 1200;
    int max_grid_atoms = 20000;
};

struct AlphaResult {
    double alpha = 0.0;
    double c_q = 0.0;
    AffinePlane plane;
    double distance = 0.0;  // best bounded-Lipschitz distance found
    double gap = 0.0;       // discretization + aggregation + line-search slack
    bool lp_optimal = true;
};

/// alpha coefficient of a cube: (1/l^{n+1}) inf over c >= 0 and n-planes L
/// of dist_{B_Q}(mu, c H^n|_L). The infimum is approximated from above over
/// finitely many candidate planes (least-squares fit plus optional
/// refinement), a discretized copy of H^n|_L, and golden-section in c (the
/// distance is convex in c). Evaluations at the coarser dyadic spacings are
/// folded into the running minimum, so refining the grid never increases
/// the reported value.
AlphaResult alpha_number(const DiscreteMeasure& mu, const DyadicCube& cube,
                         const AlphaOptions& opts = {});

}  // namespace riesz
