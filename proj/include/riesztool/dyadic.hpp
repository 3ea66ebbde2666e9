#pragma once

#include "riesztool/measure.hpp"

namespace riesz {

enum class LatticeMode { graph, ambient };

/// Dyadic lattice cube. In graph mode the lattice lives on the reference
/// plane (atoms are bucketed by their projection); in ambient mode it is the
/// standard dyadic lattice of R^d.
struct DyadicCube {
    int level = 0;                       // side = 2^{-level}
    std::vector<long long> index;        // lattice index (n or d entries)
    double side = 0.0;
    double diam = 0.0;
    Vec center;                          // z_Q in R^d (lifted in graph mode)
    Ball b_q;                            // closed B(z_Q, 3 diam)
    double mass = 0.0;                   // mu(Q)
    double mass3 = 0.0;                  // mu(3Q)
    std::vector<int> atoms;              // atoms of Q
    std::vector<int> atoms3;             // atoms of 3Q
};

struct DyadicLattice {
    LatticeMode mode = LatticeMode::graph;
    int level_min = 0, level_max = 0;
    std::vector<DyadicCube> cubes;                 // grouped by level, ascending
    std::vector<std::pair<int, int>> level_ranges; // [begin,end) per level offset
};

/// Builds the nonempty cubes of the dyadic lattice for each level in
/// [level_min, level_max]. Only cubes meeting supp(mu) are kept.
DyadicLattice dyadic_lattice(const DiscreteMeasure& mu, int level_min, int level_max,
                             LatticeMode mode = LatticeMode::graph);

enum class LevelCoefficient { beta1_sq, beta2_sq, alpha_sq };

struct LevelSums {
    std::vector<int> levels;
    std::vector<double> per_level;  // sum over Q in level of coeff(Q)^2 mu(Q)
    double total = 0.0;
};

/// Sum of coeff(Q)^2 mu(Q) per level and in total; `values` holds the
/// unsquared coefficient aligned with lattice.cubes.
LevelSums level_sums(const DyadicLattice& lattice, const std::vector<double>& values);

}  // namespace riesz
