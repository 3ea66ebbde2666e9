#pragma once

#include "riesztool/measure.hpp"

namespace riesz {

struct BlDiagnostics {
    int nodes = 0;
    int pivots = 0;
    bool optimal = true;
    double aggregation_bias = 0.0;
};

/// Bounded-Lipschitz (Kantorovich-Rubinstein) distance localized to a ball:
/// sup { |int f dsigma - int f dnu| : Lip(f) <= 1, supp(f) in B }.
///
/// Atoms outside B cannot contribute (f vanishes there); for the rest the
/// admissible f are exactly the vectors with |f_i| <= dist(p_i, boundary)
/// and |f_i - f_j| <= |p_i - p_j|. That LP is solved through its min-cost
/// flow dual: transport the signed surplus between atoms at Euclidean cost,
/// with a boundary node absorbing/creating mass at cost dist(p, boundary).
/// Instances larger than node_cap are aggregated mass-preservingly onto a
/// grid; the induced bias is reported in the diagnostics.
double bl_distance(const DiscreteMeasure& sigma, const DiscreteMeasure& nu, const Ball& b,
                   BlDiagnostics* diag = nullptr, int node_cap = 1200);

/// Same solver on raw signed supplies: minimize the cost of balancing
/// `supply` by flows between the points (cost = Euclidean distance) and
/// to/from the boundary (cost = bcost per unit). Exposed for the alpha
/// coefficient, which re-solves with rescaled supplies.
double lipschitz_dual_flow(int dim, const std::vector<double>& pts,
                           const std::vector<double>& supply,
                           const std::vector<double>& bcost, BlDiagnostics* diag = nullptr);

}  // namespace riesz
