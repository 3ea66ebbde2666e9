#include "riesztool/treecode.hpp"

#include "riesztool/kernels.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace riesz {

namespace {

void enumerate_indices(int d, int max_degree, std::vector<std::vector<int>>& out) {
    // graded lexicographic order
    std::vector<int> current(d, 0);
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == d - 1) {
            current[pos] = remaining;
            out.push_back(current);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            current[pos] = e;
            rec(pos + 1, remaining - e);
        }
    };
    for (int deg = 0; deg <= max_degree; ++deg) rec(0, deg);
}

}  // namespace

Treecode::Treecode(const DiscreteMeasure& mu, double theta, int order)
    : d_(mu.dim()), n_(mu.codim_n()), theta_(theta), order_(order) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("Treecode: need 0 < theta < 1");
    if (order < 0 || order > 16) throw std::invalid_argument("Treecode: order out of range");

    // --- multi-index tables ---
    std::vector<std::vector<int>> idx;
    enumerate_indices(d_, order_ + 1, idx);
    n_idx_ext_ = static_cast<int>(idx.size());
    std::map<std::vector<int>, int> lookup;
    for (int i = 0; i < n_idx_ext_; ++i) lookup[idx[i]] = i;

    exponents_.resize(static_cast<std::size_t>(n_idx_ext_) * d_);
    degree_.resize(n_idx_ext_);
    mono_parent_.assign(n_idx_ext_, -1);
    mono_axis_.assign(n_idx_ext_, -1);
    n_idx_ = 0;
    for (int i = 0; i < n_idx_ext_; ++i) {
        int deg = 0;
        for (int a = 0; a < d_; ++a) {
            exponents_[i * d_ + a] = idx[i][a];
            deg += idx[i][a];
        }
        degree_[i] = deg;
        if (deg <= order_) ++n_idx_;
        if (deg > 0) {
            for (int a = 0; a < d_; ++a)
                if (idx[i][a] > 0) {
                    auto parent = idx[i];
                    parent[a] -= 1;
                    mono_parent_[i] = lookup.at(parent);
                    mono_axis_[i] = a;
                    break;
                }
        }
    }

    sub1_.assign(static_cast<std::size_t>(n_idx_) * d_, -1);
    sub2_.assign(static_cast<std::size_t>(n_idx_) * d_, -1);
    plus1_.assign(static_cast<std::size_t>(n_idx_) * d_, -1);
    for (int i = 0; i < n_idx_; ++i) {
        for (int a = 0; a < d_; ++a) {
            auto v = idx[i];
            v[a] += 1;
            plus1_[i * d_ + a] = lookup.at(v);
            v[a] -= 2;
            if (v[a] >= 0) sub1_[i * d_ + a] = lookup.at(v);
            v[a] -= 1;
            if (v[a] >= 0) sub2_[i * d_ + a] = lookup.at(v);
        }
    }

    // translation triples: alpha = beta + gamma with multi-binomial C(alpha,beta)
    for (int ia = 0; ia < n_idx_ext_; ++ia) {
        std::vector<int> beta(d_, 0);
        std::function<void(int, double)> rec = [&](int axis, double coeff) {
            if (axis == d_) {
                std::vector<int> gamma(d_);
                for (int a = 0; a < d_; ++a) gamma[a] = idx[ia][a] - beta[a];
                trans_a_.push_back(ia);
                trans_b_.push_back(lookup.at(beta));
                trans_g_.push_back(lookup.at(gamma));
                trans_coeff_.push_back(coeff);
                return;
            }
            double binom = 1.0;
            for (int e = 0; e <= idx[ia][axis]; ++e) {
                beta[axis] = e;
                rec(axis + 1, coeff * binom);
                binom = binom * (idx[ia][axis] - e) / (e + 1.0);
            }
            beta[axis] = 0;
        };
        rec(0, 1.0);
    }

    // --- tree over a permuted copy of the atoms ---
    const std::size_t count = mu.size();
    order_map_.resize(count);
    std::iota(order_map_.begin(), order_map_.end(), 0);
    pts_ = mu.coords();
    wts_ = mu.weights();
    if (count > 0) {
        // build on index permutation first, then permute the flat arrays
        root_ = build(0, static_cast<int>(count));
        std::vector<double> pp(count * d_), ww(count);
        for (std::size_t i = 0; i < count; ++i) {
            const int src = order_map_[i];
            for (int a = 0; a < d_; ++a) pp[i * d_ + a] = mu.coords()[src * d_ + a];
            ww[i] = mu.weight(src);
        }
        pts_ = std::move(pp);
        wts_ = std::move(ww);

        // centroids, radii, moments (post-order so children are ready)
        centroids_.assign(cells_.size() * d_, 0.0);
        moments_.assign(cells_.size() * static_cast<std::size_t>(n_idx_ext_), 0.0);
        for (int c = static_cast<int>(cells_.size()) - 1; c >= 0; --c) {
            Cell& cell = cells_[c];
            cell.centroid_off = c * d_;
            cell.moments_off = c * n_idx_ext_;
            double* cen = centroids_.data() + cell.centroid_off;
            double mass = 0.0;
            for (int i = cell.begin; i < cell.end; ++i) mass += wts_[i];
            if (mass > 0.0) {
                for (int i = cell.begin; i < cell.end; ++i)
                    for (int a = 0; a < d_; ++a) cen[a] += wts_[i] * pts_[i * d_ + a];
                for (int a = 0; a < d_; ++a) cen[a] /= mass;
            } else if (cell.end > cell.begin) {
                for (int a = 0; a < d_; ++a) cen[a] = pts_[cell.begin * d_ + a];
            }
            double r2max = 0.0;
            for (int i = cell.begin; i < cell.end; ++i) {
                double s = 0.0;
                for (int a = 0; a < d_; ++a) {
                    double v = pts_[i * d_ + a] - cen[a];
                    s += v * v;
                }
                r2max = std::max(r2max, s);
            }
            cell.radius = std::sqrt(r2max);

            double* mom = moments_.data() + cell.moments_off;
            if (cell.left < 0) {
                leaf_moments(cell, mom);
            } else {
                for (int child : {cell.left, cell.right}) {
                    const Cell& ch = cells_[child];
                    if (ch.end == ch.begin) continue;
                    double shift[8];
                    for (int a = 0; a < d_; ++a)
                        shift[a] = centroids_[ch.centroid_off + a] - cen[a];
                    translate_moments(moments_.data() + ch.moments_off, shift, mom);
                }
            }
        }
    }
}

int Treecode::build(int begin, int end) {
    Cell cell;
    cell.begin = begin;
    cell.end = end;
    const int id = static_cast<int>(cells_.size());
    cells_.push_back(cell);
    if (end - begin <= leaf_size_) return id;

    // split widest axis at midpoint of the bounding box
    double lo[8], hi[8];
    for (int a = 0; a < d_; ++a) {
        lo[a] = std::numeric_limits<double>::infinity();
        hi[a] = -lo[a];
    }
    for (int i = begin; i < end; ++i) {
        const double* p = pts_.data() + static_cast<std::size_t>(order_map_[i]) * d_;
        for (int a = 0; a < d_; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    int axis = 0;
    double extent = -1.0;
    for (int a = 0; a < d_; ++a)
        if (hi[a] - lo[a] > extent) { extent = hi[a] - lo[a]; axis = a; }
    if (!(extent > 0.0)) return id;

    const double mid = 0.5 * (lo[axis] + hi[axis]);
    auto* base = order_map_.data();
    int* split = std::partition(base + begin, base + end, [&](int i) {
        return pts_[static_cast<std::size_t>(i) * d_ + axis] < mid;
    });
    int m = static_cast<int>(split - base);
    if (m == begin || m == end) m = (begin + end) / 2;  // degenerate mass, force balance
    if (m == begin || m == end) return id;
    int left = build(begin, m);
    int right = build(m, end);
    cells_[id].left = left;
    cells_[id].right = right;
    return id;
}

void Treecode::leaf_moments(const Cell& cell, double* out) const {
    thread_local std::vector<double> mono;
    mono.resize(n_idx_ext_);
    const double* cen = centroids_.data() + cell.centroid_off;
    for (int i = cell.begin; i < cell.end; ++i) {
        const double* p = pts_.data() + static_cast<std::size_t>(i) * d_;
        mono[0] = 1.0;
        for (int k = 1; k < n_idx_ext_; ++k)
            mono[k] = mono[mono_parent_[k]] * (cen[mono_axis_[k]] - p[mono_axis_[k]]);
        const double w = wts_[i];
        for (int k = 0; k < n_idx_ext_; ++k) out[k] += w * mono[k];
    }
}

void Treecode::translate_moments(const double* child, const double* shift, double* out) const {
    // signed moments translate with the negated shift
    thread_local std::vector<double> mono;
    mono.resize(n_idx_ext_);
    mono[0] = 1.0;
    for (int k = 1; k < n_idx_ext_; ++k)
        mono[k] = mono[mono_parent_[k]] * (-shift[mono_axis_[k]]);
    for (std::size_t t = 0; t < trans_a_.size(); ++t)
        out[trans_a_[t]] += trans_coeff_[t] * mono[trans_g_[t]] * child[trans_b_[t]];
}

Vec Treecode::evaluate(const Vec& x, double eps, TransformVariant variant) const {
    Vec out = Vec::Zero(d_);
    if (root_ < 0) return out;
    if (!(eps > 0.0)) throw std::invalid_argument("Treecode::evaluate: eps must be > 0");

    const double nu = n_ + 1.0;
    const double e2 = eps * eps;
    const bool smoothed = (variant == TransformVariant::smoothed);
    const double reg = smoothed ? e2 : 0.0;

    thread_local std::vector<double> coeff;
    coeff.resize(n_idx_);
    thread_local std::vector<int> stack;
    stack.clear();
    stack.push_back(root_);

    double acc[8];
    for (int a = 0; a < d_; ++a) acc[a] = 0.0;

    while (!stack.empty()) {
        const Cell& cell = cells_[stack.back()];
        stack.pop_back();
        if (cell.end == cell.begin) continue;
        const double* cen = centroids_.data() + cell.centroid_off;
        double xt[8];
        double dist2 = 0.0;
        for (int a = 0; a < d_; ++a) {
            xt[a] = x[a] - cen[a];
            dist2 += xt[a] * xt[a];
        }
        const double dist = std::sqrt(dist2);

        // For the sharply truncated variants the whole cell must clear the
        // cutoff radius before the smooth far-field form applies.
        const bool clears_cutoff = smoothed || (dist - cell.radius > eps);
        if (cell.radius <= theta_ * dist && clears_cutoff) {
            const double rho2 = dist2 + reg;
            coeff[0] = inv_pow_half(rho2, n_ + 1);
            for (int k = 1; k < n_idx_; ++k) {
                const int deg = degree_[k];
                double s = 0.0;
                for (int a = 0; a < d_; ++a) {
                    const int s1 = sub1_[k * d_ + a];
                    if (s1 >= 0) s += (2.0 * deg - 2.0 + nu) * xt[a] * coeff[s1];
                    const int s2 = sub2_[k * d_ + a];
                    if (s2 >= 0) s += (deg - 2.0 + nu) * coeff[s2];
                }
                coeff[k] = -s / (deg * rho2);
            }
            const double* mom = moments_.data() + cell.moments_off;
            double s0 = 0.0;
            for (int k = 0; k < n_idx_; ++k) s0 += coeff[k] * mom[k];
            for (int a = 0; a < d_; ++a) {
                double si = 0.0;
                for (int k = 0; k < n_idx_; ++k) si += coeff[k] * mom[plus1_[k * d_ + a]];
                acc[a] += xt[a] * s0 + si;
            }
            continue;
        }
        if (cell.left >= 0) {
            stack.push_back(cell.left);
            stack.push_back(cell.right);
            continue;
        }
        // direct sum over the leaf
        for (int i = cell.begin; i < cell.end; ++i) {
            const double* p = pts_.data() + static_cast<std::size_t>(i) * d_;
            double u[8];
            double r2 = 0.0;
            for (int a = 0; a < d_; ++a) {
                u[a] = x[a] - p[a];
                r2 += u[a] * u[a];
            }
            double scale = 0.0;
            switch (variant) {
                case TransformVariant::truncated:
                    if (r2 <= e2) continue;
                    scale = wts_[i] * inv_pow_half(r2, n_ + 1);
                    break;
                case TransformVariant::smoothed:
                    scale = wts_[i] * inv_pow_half(r2 + e2, n_ + 1);
                    break;
                case TransformVariant::cutoff: {
                    if (r2 <= 0.25 * e2) continue;
                    const double r = std::sqrt(r2);
                    scale = psi_outer(r / eps) * wts_[i] * inv_pow_half(r2, n_ + 1);
                    break;
                }
            }
            for (int a = 0; a < d_; ++a) acc[a] += scale * u[a];
        }
    }
    for (int a = 0; a < d_; ++a) out[a] = acc[a];
    return out;
}

}  // namespace riesz
