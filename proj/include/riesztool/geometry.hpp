#pragma once

#include "riesztool/common.hpp"

namespace riesz {

/// Closed ball: membership is |x - center| <= radius everywhere in this
/// project (atoms make boundary ties observable, open balls would not be
/// deterministic under rounding).
struct Ball {
    Vec center;
    double radius = 0.0;

    Ball() = default;
    Ball(Vec c, double r) : center(std::move(c)), radius(r) {
        if (!(radius > 0.0)) throw std::invalid_argument("Ball: radius must be > 0");
    }

    bool contains(const Vec& x) const { return (x - center).norm() <= radius; }
    Ball scaled(double lambda) const { return Ball(center, lambda * radius); }
};

/// Affine n-plane in R^d: base point plus n orthonormal direction vectors.
class AffinePlane {
public:
    AffinePlane() = default;

    /// frame columns are the plane directions; they are re-orthonormalized
    /// and the call throws if their Gram matrix deviates from the identity
    /// by more than 1e-10 beforehand when `strict` is set.
    AffinePlane(Vec base, Mat frame, bool strict = false);

    int ambient_dim() const { return static_cast<int>(base_.size()); }
    int plane_dim() const { return static_cast<int>(frame_.cols()); }

    const Vec& base() const { return base_; }
    const Mat& frame() const { return frame_; }
    /// Orthonormal basis of the orthogonal complement of the direction span.
    const Mat& normal_frame() const { return normal_; }

    /// Euclidean distance from x to the plane.
    double distance(const Vec& x) const;

    /// Orthogonal projection of x onto the plane.
    Vec project(const Vec& x) const;

    /// Component of v orthogonal to the direction span (a free vector, the
    /// base point plays no role).
    Vec reject_vector(const Vec& v) const;

    double gram_deviation() const;

private:
    Vec base_;
    Mat frame_;   // d x n
    Mat normal_;  // d x (d-n)
};

/// Largest principal angle between the direction spans of two planes of the
/// same dimension, in radians.
double principal_angle(const AffinePlane& a, const AffinePlane& b);

/// n-volume of the simplex with the given n+1 vertices in R^d.
double simplex_volume(const std::vector<Vec>& vertices);

/// The coordinate plane R^n x {0} in R^d through the origin.
AffinePlane reference_plane(int n, int d);

}  // namespace riesz
