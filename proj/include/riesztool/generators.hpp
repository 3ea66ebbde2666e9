#pragma once

#include "riesztool/graphfn.hpp"

namespace riesz {

/// Four-corner Cantor set, generation g: 4^g atoms of mass 4^{-g} at the
/// lower-left corners of the generation-g squares in [0,1]^2 (n=1, d=2).
DiscreteMeasure gen_cantor_four_corner(int generation);

/// Uniform grid sample of the coordinate n-plane patch [0,extent]^n in R^d,
/// unit density, spacing h. Atoms carry weight h^n.
DiscreteMeasure gen_plane_sample(int n, int d, double extent, double h);

/// Surface sample of a graph with i.i.d. bounded transverse perturbations:
/// each transverse coordinate is shifted by uniform(-amplitude, amplitude).
DiscreteMeasure gen_perturbed_graph(const GraphFunction& a, double noise_amplitude,
                                    std::uint64_t seed, const GraphMeasureSpec& spec = {});

}  // namespace riesz
