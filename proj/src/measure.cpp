#include "riesztool/measure.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

namespace riesz {

// ---------------------------------------------------------------------------
// KdTree

KdTree::KdTree(const std::vector<double>& coords, int dim) : dim_(dim) {
    store_ = coords;
    pts_ = store_.data();
    const int count = dim ? static_cast<int>(coords.size()) / dim : 0;
    order_.resize(count);
    std::iota(order_.begin(), order_.end(), 0);
    if (count > 0) root_ = build(0, count);
}

int KdTree::build(int begin, int end) {
    Node node;
    node.begin = begin;
    node.end = end;
    node.bb_min.assign(dim_, std::numeric_limits<double>::infinity());
    node.bb_max.assign(dim_, -std::numeric_limits<double>::infinity());
    for (int i = begin; i < end; ++i) {
        const double* p = pts_ + static_cast<std::size_t>(order_[i]) * dim_;
        for (int a = 0; a < dim_; ++a) {
            node.bb_min[a] = std::min(node.bb_min[a], p[a]);
            node.bb_max[a] = std::max(node.bb_max[a], p[a]);
        }
    }
    constexpr int kLeafSize = 16;
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= kLeafSize) return id;

    int axis = 0;
    double extent = -1.0;
    for (int a = 0; a < dim_; ++a) {
        double e = node.bb_max[a] - node.bb_min[a];
        if (e > extent) { extent = e; axis = a; }
    }
    if (!(extent > 0.0)) return id;  // all points coincide, keep as leaf

    int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                         return pts_[static_cast<std::size_t>(a) * dim_ + axis] <
                                pts_[static_cast<std::size_t>(b) * dim_ + axis];
                     });
    nodes_[id].axis = axis;
    nodes_[id].split = pts_[static_cast<std::size_t>(order_[mid]) * dim_ + axis];
    int left = build(begin, mid);
    int right = build(mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void KdTree::visit_ball(const double* center, double radius,
                        const std::function<void(int)>& visit) const {
    if (root_ < 0) return;
    const double r2 = radius * radius;
    std::vector<int> stack{root_};
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        // distance from center to the node bounding box
        double dist2 = 0.0;
        for (int a = 0; a < dim_; ++a) {
            double v = 0.0;
            if (center[a] < node.bb_min[a]) v = node.bb_min[a] - center[a];
            else if (center[a] > node.bb_max[a]) v = center[a] - node.bb_max[a];
            dist2 += v * v;
        }
        if (dist2 > r2) continue;
        if (node.axis < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                const int idx = order_[i];
                const double* p = pts_ + static_cast<std::size_t>(idx) * dim_;
                double s = 0.0;
                for (int a = 0; a < dim_; ++a) {
                    double v = p[a] - center[a];
                    s += v * v;
                }
                if (s <= r2) visit(idx);
            }
        } else {
            stack.push_back(node.left);
            stack.push_back(node.right);
        }
    }
}

void KdTree::query_ball(const double* center, double radius, std::vector<int>& out) const {
    out.clear();
    visit_ball(center, radius, [&out](int i) { out.push_back(i); });
}

std::pair<int, double> KdTree::nearest(const double* center, double upper_bound) const {
    int best = -1;
    double best2 = upper_bound * upper_bound;
    if (root_ < 0) return {best, upper_bound};
    thread_local std::vector<int> stack;
    stack.clear();
    stack.push_back(root_);
    while (!stack.empty()) {
        const Node& node = nodes_[stack.back()];
        stack.pop_back();
        double dist2 = 0.0;
        for (int a = 0; a < dim_; ++a) {
            double v = 0.0;
            if (center[a] < node.bb_min[a]) v = node.bb_min[a] - center[a];
            else if (center[a] > node.bb_max[a]) v = center[a] - node.bb_max[a];
            dist2 += v * v;
        }
        if (dist2 >= best2) continue;
        if (node.axis < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                const int idx = order_[i];
                const double* p = pts_ + static_cast<std::size_t>(idx) * dim_;
                double s = 0.0;
                for (int a = 0; a < dim_; ++a) {
                    double v = p[a] - center[a];
                    s += v * v;
                }
                if (s < best2) { best2 = s; best = idx; }
            }
        } else {
            // descend toward the query side first
            if (center[node.axis] < node.split) {
                stack.push_back(node.right);
                stack.push_back(node.left);
            } else {
                stack.push_back(node.left);
                stack.push_back(node.right);
            }
        }
    }
    return {best, std::sqrt(best2)};
}

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure build_measure_flat(std::vector<double> coords, std::vector<double> weights,
                                   int d, int n) {
    if (d <= 0) throw std::invalid_argument("build_measure: dimension must be positive");
    if (n <= 0 || n > d) throw std::invalid_argument("build_measure: need 0 < n <= d");
    if (coords.size() != weights.size() * static_cast<std::size_t>(d))
        throw std::invalid_argument("build_measure: points/weights length mismatch");
    for (double w : weights)
        if (!(w >= 0.0)) throw std::invalid_argument("build_measure: negative weight");

    DiscreteMeasure mu;
    mu.d_ = d;
    mu.n_ = n;
    mu.coords_ = std::move(coords);
    mu.weights_ = std::move(weights);
    mu.total_mass_ = std::accumulate(mu.weights_.begin(), mu.weights_.end(), 0.0);
    mu.tree_ = KdTree(mu.coords_, d);
    return mu;
}

DiscreteMeasure build_measure(const std::vector<Vec>& points,
                              const std::vector<double>& weights, int n) {
    if (points.size() != weights.size())
        throw std::invalid_argument("build_measure: points/weights length mismatch");
    if (points.empty()) {
        // Empty measure: dimension defaults to n (no point to read it from).
        return build_measure_flat({}, {}, std::max(n, 1), n);
    }
    const int d = static_cast<int>(points[0].size());
    std::vector<double> coords(points.size() * d);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != d)
            throw std::invalid_argument("build_measure: inconsistent point dimensions");
        std::memcpy(coords.data() + i * d, points[i].data(), sizeof(double) * d);
    }
    return build_measure_flat(std::move(coords), weights, d, n);
}

double DiscreteMeasure::mass_in_ball(const Vec& center, double radius) const {
    double mass = 0.0;
    tree_.visit_ball(center.data(), radius, [&](int i) { mass += weights_[i]; });
    return mass;
}

void DiscreteMeasure::atoms_in_ball(const Vec& center, double radius, std::vector<int>& out) const {
    tree_.query_ball(center.data(), radius, out);
}

void DiscreteMeasure::visit_ball(const Vec& center, double radius,
                                 const std::function<void(int)>& visit) const {
    tree_.visit_ball(center.data(), radius, visit);
}

DiscreteMeasure DiscreteMeasure::restrict_to(const std::vector<int>& indices) const {
    std::vector<double> coords(indices.size() * d_);
    std::vector<double> weights(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        std::memcpy(coords.data() + k * d_, point_ptr(indices[k]), sizeof(double) * d_);
        weights[k] = weights_[indices[k]];
    }
    DiscreteMeasure out = build_measure_flat(std::move(coords), std::move(weights), d_, n_);
    out.truncation_floor_ = truncation_floor_;
    return out;
}

DiscreteMeasure DiscreteMeasure::pushforward_affine(double scale, const Vec& shift) const {
    std::vector<double> coords(coords_.size());
    for (std::size_t i = 0; i < weights_.size(); ++i)
        for (int a = 0; a < d_; ++a)
            coords[i * d_ + a] = scale * coords_[i * d_ + a] + shift[a];
    DiscreteMeasure out = build_measure_flat(std::move(coords), weights_, d_, n_);
    out.truncation_floor_ = std::abs(scale) * truncation_floor_;
    return out;
}

// ---------------------------------------------------------------------------
// CSV

DiscreteMeasure load_measure_csv(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty point-cloud file " + path);
    // Header "x1,...,xd,w" fixes d; every row is validated against it.
    int cols = 1;
    for (char c : line)
        if (c == ',') ++cols;
    const int d = cols - 1;
    if (d < 1) throw std::runtime_error("point-cloud header needs at least x1,w: " + path);

    std::vector<double> coords, weights;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int got = 0;
        double row[64];
        while (std::getline(ss, cell, ',')) {
            if (got >= cols || got >= 64)
                throw std::runtime_error(path + ": too many columns on line " + std::to_string(lineno));
            row[got++] = std::stod(cell);
        }
        if (got != cols)
            throw std::runtime_error(path + ": expected " + std::to_string(cols) +
                                     " columns on line " + std::to_string(lineno));
        for (int a = 0; a < d; ++a) coords.push_back(row[a]);
        weights.push_back(row[d]);
    }
    return build_measure_flat(std::move(coords), std::move(weights), d, n);
}

void save_measure_csv(const DiscreteMeasure& mu, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (int a = 0; a < mu.dim(); ++a) out << "x" << (a + 1) << ",";
    out << "w\n";
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double* p = mu.point_ptr(i);
        for (int a = 0; a < mu.dim(); ++a) out << format_g17(p[a]) << ",";
        out << format_g17(mu.weight(i)) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Densities and Poisson-type functionals

double density(const DiscreteMeasure& mu, const Vec& x, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("density: radius must be > 0");
    return mu.mass_in_ball(x, r) / std::pow(r, mu.codim_n());
}

double poisson_p(const DiscreteMeasure& mu, const Vec& x, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("poisson_p: eps must be > 0");
    const int d = mu.dim();
    const double e2 = eps * eps;
    const int twice = mu.codim_n() + 1;
    double sum = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double* p = mu.point_ptr(i);
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) {
            double v = x[a] - p[a];
            r2 += v * v;
        }
        sum += mu.weight(i) * inv_pow_half(r2 + e2, twice);
    }
    return eps * sum;
}

double poisson_p2(const DiscreteMeasure& mu, const Vec& x, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("poisson_p2: eps must be > 0");
    const int d = mu.dim();
    const double e2 = eps * eps;
    const int twice = mu.codim_n() + 3;
    double sum = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double* p = mu.point_ptr(i);
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) {
            double v = x[a] - p[a];
            r2 += v * v;
        }
        sum += mu.weight(i) * inv_pow_half(r2 + e2, twice);
    }
    return eps * eps * eps * sum;
}

double find_good_radius(const DiscreteMeasure& mu, const Vec& x, double r, double M, double C15) {
    if (!(r > 0.0)) throw std::invalid_argument("find_good_radius: radius must be > 0");
    const int n = mu.codim_n();
    const double a = std::pow(2.0, n + 4);

    // Range bound from the dyadic-claim proof: each failed scale forces the
    // density up by a factor 8 within N octaves, and the density is capped by
    // M, so at most ceil(log8(M*C15)) + 1 rounds of N octaves are needed.
    const double mc = std::max(2.0, M * C15);
    const int octaves_per_round = n + 2 + static_cast<int>(std::ceil(std::log2(mc)));
    const int rounds = 1 + static_cast<int>(std::ceil(std::log2(mc) / 3.0));
    const int kmax = octaves_per_round * rounds + 1;

    const double delta_r = density(mu, x, r);
    for (int k = 0; k <= kmax; ++k) {
        const double r1 = std::ldexp(r, k);
        const double del = density(mu, x, r1);
        if (del >= delta_r && poisson_p(mu, x, r1) <= a * del) return r1;
    }
    throw std::runtime_error(
        "find_good_radius: no good radius within guaranteed range "
        "(growth/density preconditions violated)");
}

}  // namespace riesz
