#pragma once

#include "riesztool/measure.hpp"

namespace riesz {

struct FourierMode {
    Vec freq;      // n entries, cycles per unit length
    Vec amp;       // d-n entries
    double phase = 0.0;
};

/// A: R^n -> R^{d-n} on a uniform grid over a box, optionally backed by an
/// analytic mode list A(x) = window(x) * sum_m amp_m sin(2 pi freq_m . x + phase_m).
/// The smoothstep window of width `window_margin` forces compact support
/// inside the box; values vanish outside.
class GraphFunction {
public:
    GraphFunction() = default;

    int n() const { return n_; }
    int d() const { return d_; }
    double spacing() const { return h_; }
    const Vec& box_lo() const { return lo_; }
    const Vec& box_hi() const { return hi_; }
    const std::vector<int>& grid_dims() const { return dims_; }
    std::size_t grid_size() const { return values_.size() / std::max(1, d_ - n_); }

    bool analytic() const { return !modes_.empty(); }
    const std::vector<FourierMode>& modes() const { return modes_; }
    double window_margin() const { return margin_; }

    /// Value at an arbitrary point: analytic formula when available,
    /// multilinear interpolation of the grid otherwise; zero outside the box.
    Vec eval(const Vec& x) const;

    /// Grid node access.
    Vec grid_point(std::size_t flat) const;
    Vec value_at_node(std::size_t flat) const;
    void set_value_at_node(std::size_t flat, const Vec& v);

    /// Finite-difference Jacobian matrix of A at x ((d-n) x n), centered
    /// stencil with one-sided fallback at the box edge.
    Mat gradient(const Vec& x) const;

    double grad_inf_norm() const { return grad_inf_; }
    double grad_l2_norm() const { return grad_l2_; }
    double value_l2_sq() const { return value_l2_sq_; }

    void refresh_norm_cache();

    friend GraphFunction make_graph_function(const std::vector<FourierMode>&, const Vec&,
                                             const Vec&, double, double, double);
    friend GraphFunction make_graph_function_grid(int, int, const Vec&, const Vec&, double,
                                                  const std::function<Vec(const Vec&)>&);

private:
    double window(const Vec& x) const;
    static GraphFunction init_grid(int n, int d, const Vec& lo, const Vec& hi, double h);

    int n_ = 0, d_ = 0;
    Vec lo_, hi_;
    double h_ = 0.0;
    std::vector<int> dims_;
    std::vector<double> values_;  // (d-n) per node, node-major
    std::vector<FourierMode> modes_;
    double margin_ = 0.0;
    double grad_inf_ = 0.0, grad_l2_ = 0.0, value_l2_sq_ = 0.0;
};

/// Builds an analytic-mode graph function sampled on the grid. Throws when a
/// positive grad_inf_bound is violated by the sampled gradient.
GraphFunction make_graph_function(const std::vector<FourierMode>& modes, const Vec& box_lo,
                                  const Vec& box_hi, double h, double window_margin,
                                  double grad_inf_bound = 0.0);

/// Builds a grid-backed graph function from a callable.
GraphFunction make_graph_function_grid(int n, int d, const Vec& box_lo, const Vec& box_hi,
                                       double h, const std::function<Vec(const Vec&)>& fn);

/// n-dimensional Jacobian of x -> (x, A(x)): sqrt(det(I + (DA)^T DA)),
/// equal to the root of the sum of squared n x n minors of the differential.
double jacobian(const GraphFunction& a, const Vec& p);

struct GraphMeasureSpec {
    std::function<double(const Vec&)> density;  // g on the base; 1 when absent
    bool mu0_mode = false;                      // pushforward = Lebesgue exactly
    double c1 = 100.0;                          // admissible band [1/c1, c1] for g
};

/// Surface measure sample: atoms at (p, A(p)) with weight g(p) J(p) h^n
/// (or g == pushforward-uniform weights h^n in mu0 mode). Records the
/// truncation floor 2h on the result.
DiscreteMeasure sample_graph_measure(const GraphFunction& a, const GraphMeasureSpec& spec = {});

/// JSON graph spec: {"modes":[{"freq":[...],"amp":[...],"phase":p}],
/// "box":{"lo":[...],"hi":[...]}, "h":h, "window":m, "d":d}
GraphFunction load_graph_spec(const std::string& path);
void save_graph_spec(const GraphFunction& a, const std::string& path);

}  // namespace riesz
