#pragma once

#include "riesztool/geometry.hpp"

#include <limits>
#include <optional>

namespace riesz {

/// kd-tree over a flat point array, used for closed-ball queries.
class KdTree {
public:
    KdTree() = default;
    KdTree(const std::vector<double>& coords, int dim);

    /// Indices of all points with |p - center| <= radius.
    void query_ball(const double* center, double radius, std::vector<int>& out) const;

    /// Calls visit(i) for every point with |p - center| <= radius.
    void visit_ball(const double* center, double radius,
                    const std::function<void(int)>& visit) const;

    /// Index and distance of the nearest point; {-1, inf} when empty.
    /// Prunes against the supplied upper bound.
    std::pair<int, double> nearest(const double* center,
                                   double upper_bound = std::numeric_limits<double>::infinity())
        const;

    bool empty() const { return nodes_.empty(); }

private:
    struct Node {
        int begin = 0, end = 0;   // range into order_
        int axis = -1;            // -1 marks a leaf
        double split = 0.0;
        int left = -1, right = -1;
        std::vector<double> bb_min, bb_max;
    };

    int build(int begin, int end);

    const double* pts_ = nullptr;
    int dim_ = 0;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
    std::vector<double> store_;  // owned copy of the coordinates
};

/// Weighted point cloud in R^d standing in for a measure, with the
/// codimension parameter n of the transforms that will act on it.
/// Immutable after construction; all queries are read-only.
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;

    int dim() const { return d_; }
    int codim_n() const { return n_; }
    std::size_t size() const { return weights_.size(); }
    double total_mass() const { return total_mass_; }

    const double* point_ptr(std::size_t i) const { return coords_.data() + i * d_; }
    Vec point(std::size_t i) const {
        return Eigen::Map<const Vec>(point_ptr(i), d_);
    }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& coords() const { return coords_; }

    /// Smallest scale at which kernel sums measure the transform rather than
    /// the discretization; 0 when unknown (e.g. generic clouds).
    double truncation_floor() const { return truncation_floor_; }
    void set_truncation_floor(double f) { truncation_floor_ = f; }

    /// mu(closed B).
    double mass_in_ball(const Vec& center, double radius) const;
    void atoms_in_ball(const Vec& center, double radius, std::vector<int>& out) const;
    void visit_ball(const Vec& center, double radius,
                    const std::function<void(int)>& visit) const;

    /// Restriction of the measure to the atoms with the given indices.
    DiscreteMeasure restrict_to(const std::vector<int>& indices) const;

    /// Image measure under x -> scale * x + shift, weights unchanged.
    DiscreteMeasure pushforward_affine(double scale, const Vec& shift) const;

    friend DiscreteMeasure build_measure(const std::vector<Vec>&, const std::vector<double>&, int);
    friend DiscreteMeasure build_measure_flat(std::vector<double>, std::vector<double>, int, int);

private:
    int d_ = 0;
    int n_ = 0;
    std::vector<double> coords_;   // size() * d_, row-major
    std::vector<double> weights_;
    double total_mass_ = 0.0;
    double truncation_floor_ = 0.0;
    KdTree tree_;
};

/// Builds a measure from points and nonnegative weights; n is the dimension
/// parameter of the Riesz kernels acting on it (0 < n <= d).
DiscreteMeasure build_measure(const std::vector<Vec>& points,
                              const std::vector<double>& weights, int n);

/// Same, from a flat coordinate array (row-major, size = weights.size()*d).
DiscreteMeasure build_measure_flat(std::vector<double> coords,
                                   std::vector<double> weights, int d, int n);

/// CSV interchange: header "x1,...,xd,w", one atom per row.
DiscreteMeasure load_measure_csv(const std::string& path, int n);
void save_measure_csv(const DiscreteMeasure& mu, const std::string& path);

/// delta_mu^n(x,r) = mu(B(x,r)) / r^n.
double density(const DiscreteMeasure& mu, const Vec& x, double r);

/// P(x,eps) = int eps / (|x-y|^2 + eps^2)^{(n+1)/2} dmu(y).
double poisson_p(const DiscreteMeasure& mu, const Vec& x, double eps);

/// P2(x,eps) = int eps^3 / (|x-y|^2 + eps^2)^{(n+3)/2} dmu(y).
/// The integrand is centered at the evaluation point.
double poisson_p2(const DiscreteMeasure& mu, const Vec& x, double eps);

/// Scans dyadic radii r1 = 2^k r, k >= 0, for the smallest one with
/// P(x,r1) <= 2^{n+4} delta(x,r1) and delta(x,r1) >= delta(x,r).
/// Throws if none is found within the range guaranteed by the growth
/// hypotheses (density >= 1/C15 at r, growth factor M above r).
double find_good_radius(const DiscreteMeasure& mu, const Vec& x, double r,
                        double M, double C15 = 10.0);

}  // namespace riesz
