#pragma once

#include "riesztool/bumps.hpp"
#include "riesztool/measure.hpp"

namespace riesz {

/// K(x) = x / |x|^{n+1}. Throws on x = 0.
Vec riesz_kernel(const Vec& x, int n);

/// R_eps mu(x): sum of w K(x-y) over atoms with |x-y| > eps (strict).
Vec truncated_transform(const DiscreteMeasure& mu, const Vec& x, double eps);

/// Smoothed transform with kernel (x-y) / (|x-y|^2 + eps^2)^{(n+1)/2}.
Vec smoothed_transform(const DiscreteMeasure& mu, const Vec& x, double eps);

/// Cutoff transform with kernel psi(|x-y|/eps) K(x-y); atoms closer than
/// eps/2 contribute exactly 0 and atoms beyond eps carry the full kernel.
Vec cutoff_transform(const DiscreteMeasure& mu, const Vec& x, double eps);

/// |R~_{e1} - R~_{e2}| + |R^_{e1} - R^_{e2}| at x. Requires 0 < e1 < e2.
double pv_oscillation(const DiscreteMeasure& mu, const Vec& x, double eps1, double eps2);

/// Maximal transform over the given epsilon grid (a lower bound for the
/// true supremum over eps > 0).
double maximal_transform(const DiscreteMeasure& mu, const Vec& x,
                         const std::vector<double>& eps_grid);

struct OrthogonalPart {
    double magnitude = 0.0;  // |v - proj(v)|
    Vec vector;              // v - proj(v), full ambient vector
};

/// Component of v orthogonal to the plane's direction span. Throws when the
/// stored frame has Gram deviation above 1e-10.
OrthogonalPart orthogonal_part(const Vec& v, const AffinePlane& plane);

enum class BandFlavor { standard, flat };

/// Band transform with kernel K_j(x) = phi_j(x0) x/|x|^{n+1} (standard) or
/// K~_j(x) = phi_j(x0) x/|x0|^{n+1} (flat), x0 the projection of x onto the
/// reference plane (default R^n x {0}). Atoms with |x0| outside
/// [2^{-j-4}, 2^{-j-2}] contribute exactly 0.
Vec band_transform(const DiscreteMeasure& mu, const Vec& x, int j,
                   BandFlavor flavor = BandFlavor::standard,
                   const AffinePlane* reference = nullptr);

/// R_j^perp mu evaluated at every atom of mu.
std::vector<Vec> band_orthogonal_field(const DiscreteMeasure& mu, int j,
                                       BandFlavor flavor = BandFlavor::standard,
                                       const AffinePlane* reference = nullptr);

/// <R_j^perp mu, R_k^perp mu>_{L^2(mu)}.
double band_inner_product(const DiscreteMeasure& mu, int j, int k,
                          BandFlavor flavor = BandFlavor::standard,
                          const AffinePlane* reference = nullptr);

enum class TransformVariant { truncated, smoothed, cutoff };
enum class EvalMethod { naive, treecode };

/// Batch evaluation result: one transform vector per target plus the
/// L^2(targets)-norm, norm^2 = sum over targets of weight * |vector|^2.
struct FieldResult {
    std::vector<Vec> vectors;
    double l2_norm = 0.0;
    EvalMethod method = EvalMethod::naive;

    /// L^2(targets)-norm of the components orthogonal to a plane.
    double orthogonal_l2_norm(const DiscreteMeasure& targets, const AffinePlane& plane) const;
};

/// Evaluates the chosen transform of mu at every atom of `targets`.
/// Throws when eps is below the source measure's truncation floor.
FieldResult transform_field(const DiscreteMeasure& mu, const DiscreteMeasure& targets,
                            double eps, EvalMethod method,
                            TransformVariant variant = TransformVariant::smoothed,
                            double treecode_theta = 0.3, int treecode_order = 10);

}  // namespace riesz
