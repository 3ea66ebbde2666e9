#pragma once

#include "riesztool/measure.hpp"

namespace riesz {

enum class TransformVariant;

/// Particle-cluster treecode for the Riesz kernel sums. Far cells are
/// evaluated through a Cartesian Taylor expansion of the kernel about the
/// cell centroid (the coefficients of (|u|^2 + eps^2)^{-nu/2} satisfy a
/// three-term recurrence, so arbitrary expansion order is cheap); near cells
/// are summed directly. The acceptance criterion dist/radius uses the exact
/// bounding radius of the cell about its centroid.
class Treecode {
public:
    /// theta: opening threshold, cell_radius / distance <= theta accepts.
    /// order: Taylor expansion order of the far field.
    Treecode(const DiscreteMeasure& mu, double theta = 0.3, int order = 10);

    /// Transform of the indexed measure at x for the given variant/eps.
    /// Matches the corresponding point transform up to the expansion error.
    Vec evaluate(const Vec& x, double eps, TransformVariant variant) const;

    double theta() const { return theta_; }
    int order() const { return order_; }

private:
    struct Cell {
        int begin = 0, end = 0;
        int left = -1, right = -1;
        double radius = 0.0;
        int centroid_off = 0;  // into centroids_
        int moments_off = 0;   // into moments_
    };

    int build(int begin, int end);
    void leaf_moments(const Cell& cell, double* out) const;
    void translate_moments(const double* child, const double* shift, double* out) const;

    int d_ = 0, n_ = 0;
    double theta_ = 0.3;
    int order_ = 10;

    // multi-index table for |alpha| <= order_+1
    int n_idx_ = 0;       // indices with |alpha| <= order_
    int n_idx_ext_ = 0;   // indices with |alpha| <= order_+1
    std::vector<int> exponents_;      // n_idx_ext_ * d_
    std::vector<int> degree_;
    std::vector<int> mono_parent_;    // alpha = parent + e_axis
    std::vector<int> mono_axis_;
    std::vector<int> sub1_, sub2_;    // n_idx_ * d_: ids of alpha-e_j, alpha-2e_j (-1 if absent)
    std::vector<int> plus1_;          // n_idx_ * d_: ids of alpha+e_j
    std::vector<int> trans_a_, trans_b_, trans_g_;  // translation triples (a = b + g)
    std::vector<double> trans_coeff_;

    std::vector<int> order_map_;      // tree-order -> original atom index
    std::vector<double> pts_;         // permuted coordinates
    std::vector<double> wts_;         // permuted weights
    std::vector<Cell> cells_;
    std::vector<double> centroids_;
    std::vector<double> moments_;     // signed moments sum w (c - y)^alpha
    int root_ = -1;
    int leaf_size_ = 48;
};

}  // namespace riesz
