#include "riesztool/transport.hpp"

#include <algorithm>
#include <map>

namespace riesz {

namespace {

/// Uncapacitated network simplex on the complete graph over m points plus a
/// boundary node 0. Arc costs: Euclidean between points, bcost to/from the
/// boundary. Supplies must balance against the boundary (it absorbs the
/// total surplus).
class FlowSolver {
public:
    FlowSolver(int dim, const std::vector<double>& pts, const std::vector<double>& supply,
               const std::vector<double>& bcost)
        : d_(dim), pts_(pts), bcost_(bcost) {
        m_ = static_cast<int>(supply.size());
        const int nn = m_ + 1;
        if (static_cast<std::size_t>(nn) * nn <= 4u << 20) {
            // dense cost cache: pricing is the hot loop
            cost_cache_.resize(static_cast<std::size_t>(nn) * nn);
            for (int a = 0; a < nn; ++a)
                for (int b = 0; b < nn; ++b)
                    cost_cache_[static_cast<std::size_t>(a) * nn + b] =
                        (a == b) ? 0.0 : raw_cost(a, b);
        }
        parent_.assign(nn, -1);
        up_.assign(nn, false);
        flow_.assign(nn, 0.0);
        pi_.assign(nn, 0.0);
        depth_.assign(nn, 0);
        children_.assign(nn, {});

        double scale = 1.0;
        for (double b : bcost_) scale = std::max(scale, b);
        tol_ = 1e-12 * scale;

        for (int i = 1; i <= m_; ++i) {
            parent_[i] = 0;
            depth_[i] = 1;
            children_[0].push_back(i);
            const double c = supply[i - 1];
            if (c > 0.0) {
                up_[i] = true;   // arc i -> 0 carries the surplus out
                flow_[i] = c;
                pi_[i] = bcost_[i - 1];
            } else {
                up_[i] = false;  // arc 0 -> i feeds the deficit
                flow_[i] = -c;
                pi_[i] = -bcost_[i - 1];
            }
        }
    }

    double solve(BlDiagnostics* diag) {
        const long max_pivots = 80L * m_ + 4000;
        long pivots = 0;
        int cursor = 1;
        bool optimal = false;
        while (pivots < max_pivots) {
            auto [u, v, rc] = find_entering(cursor);
            if (u < 0) { optimal = true; break; }
            pivot(u, v, rc);
            ++pivots;
        }
        double value = 0.0;
        for (int i = 1; i <= m_; ++i)
            if (parent_[i] >= 0) value += flow_[i] * cost(i, parent_[i]);
        if (diag) {
            diag->nodes = m_ + 1;
            diag->pivots = static_cast<int>(pivots);
            diag->optimal = optimal;
        }
        return value;
    }

private:
    double raw_cost(int a, int b) const {
        if (a == 0) return bcost_[b - 1];
        if (b == 0) return bcost_[a - 1];
        const double* pa = pts_.data() + static_cast<std::size_t>(a - 1) * d_;
        const double* pb = pts_.data() + static_cast<std::size_t>(b - 1) * d_;
        double s = 0.0;
        for (int k = 0; k < d_; ++k) {
            double v = pa[k] - pb[k];
            s += v * v;
        }
        return std::sqrt(s);
    }

    double cost(int a, int b) const {
        if (!cost_cache_.empty())
            return cost_cache_[static_cast<std::size_t>(a) * (m_ + 1) + b];
        return raw_cost(a, b);
    }

    // Dantzig pricing over row blocks starting at a moving cursor.
    std::tuple<int, int, double> find_entering(int& cursor) {
        const int nn = m_ + 1;
        int best_u = -1, best_v = -1;
        double best_rc = -tol_;
        int rows_scanned = 0;
        const int max_rows = nn;  // full sweep in the worst case
        int row = cursor;
        while (rows_scanned < max_rows) {
            for (int v = 0; v < nn; ++v) {
                if (v == row) continue;
                const double rc = cost(row, v) - pi_[row] + pi_[v];
                if (rc < best_rc) { best_rc = rc; best_u = row; best_v = v; }
            }
            ++rows_scanned;
            row = (row + 1) % nn;
            if (best_u >= 0 && rows_scanned >= 8) break;  // block found
        }
        cursor = row;
        return {best_u, best_v, best_rc};
    }

    void pivot(int u, int v, double rc) {
        // collect paths to the least common ancestor
        thread_local std::vector<int> pu, pv;
        pu.clear();
        pv.clear();
        int a = u, b = v;
        while (depth_[a] > depth_[b]) { pu.push_back(a); a = parent_[a]; }
        while (depth_[b] > depth_[a]) { pv.push_back(b); b = parent_[b]; }
        while (a != b) {
            pu.push_back(a);
            pv.push_back(b);
            a = parent_[a];
            b = parent_[b];
        }

        // max pushable flow: arcs on the u-side gain when their basic arc is
        // directed downward, arcs on the v-side gain when directed upward
        double t = std::numeric_limits<double>::infinity();
        int leave = -1;
        bool leave_on_u = true;
        for (int z : pu)
            if (up_[z] && flow_[z] < t - 1e-18) { t = flow_[z]; leave = z; leave_on_u = true; }
        for (int z : pv)
            if (!up_[z] && flow_[z] < t - 1e-18) { t = flow_[z]; leave = z; leave_on_u = false; }
        if (leave < 0)
            throw std::runtime_error("bl_distance: unbounded pivot (inconsistent costs)");

        for (int z : pu) flow_[z] += up_[z] ? -t : t;
        for (int z : pv) flow_[z] += up_[z] ? t : -t;

        // detach the leaving arc, re-root the freed subtree at u or v and
        // hang it on the entering arc
        int root = leave_on_u ? u : v;
        // reverse parent pointers from root up to `leave`
        int prev = root, cur = parent_[root];
        bool prev_up = up_[root];
        double prev_flow = flow_[root];
        detach(root);
        while (prev != leave) {
            const int nxt = parent_[cur];
            const bool cur_up = up_[cur];
            const double cur_flow = flow_[cur];
            detach(cur);
            parent_[cur] = prev;
            up_[cur] = !prev_up;
            flow_[cur] = prev_flow;
            children_[prev].push_back(cur);
            prev_up = cur_up;
            prev_flow = cur_flow;
            prev = cur;
            cur = nxt;
        }

        if (leave_on_u) {
            parent_[u] = v;
            up_[u] = true;  // entering arc is u -> v
            flow_[u] = t;
            children_[v].push_back(u);
            shift_subtree(u, rc);
        } else {
            parent_[v] = u;
            up_[v] = false;  // entering arc is u -> v, v below u
            flow_[v] = t;
            children_[u].push_back(v);
            shift_subtree(v, -rc);
        }
    }

    void detach(int z) {
        auto& sib = children_[parent_[z]];
        sib.erase(std::find(sib.begin(), sib.end(), z));
        parent_[z] = -1;
    }

    void shift_subtree(int root, double delta) {
        thread_local std::vector<int> stack;
        stack.clear();
        stack.push_back(root);
        while (!stack.empty()) {
            int z = stack.back();
            stack.pop_back();
            pi_[z] += delta;
            depth_[z] = depth_[parent_[z]] + 1;
            for (int c : children_[z]) stack.push_back(c);
        }
    }

    int d_, m_;
    const std::vector<double>& pts_;
    const std::vector<double>& bcost_;
    std::vector<double> cost_cache_;
    double tol_ = 1e-12;
    std::vector<int> parent_;
    std::vector<bool> up_;
    std::vector<double> flow_;
    std::vector<double> pi_;
    std::vector<int> depth_;
    std::vector<std::vector<int>> children_;
};

struct NodeSet {
    std::vector<double> pts;
    std::vector<double> supply;
    std::vector<double> bcost;
    double aggregation_bias = 0.0;
};

void add_atoms(const DiscreteMeasure& mu, const Ball& b, double sign,
               std::map<std::vector<double>, double>& merged) {
    std::vector<int> atoms;
    mu.atoms_in_ball(b.center, b.radius, atoms);
    std::vector<double> key(mu.dim());
    for (int idx : atoms) {
        const double* p = mu.point_ptr(idx);
        double dist = 0.0;
        for (int a = 0; a < mu.dim(); ++a) {
            key[a] = p[a];
            double v = p[a] - b.center[a];
            dist += v * v;
        }
        if (std::sqrt(dist) >= b.radius) continue;  // boundary atoms carry f = 0
        merged[key] += sign * mu.weight(idx);
    }
}

NodeSet gather_nodes(const DiscreteMeasure& sigma, const DiscreteMeasure& nu, const Ball& b,
                     int node_cap) {
    if (sigma.dim() != nu.dim()) throw std::invalid_argument("bl_distance: dimension mismatch");
    const int d = sigma.dim();
    std::map<std::vector<double>, double> merged;
    add_atoms(sigma, b, +1.0, merged);
    add_atoms(nu, b, -1.0, merged);

    double wmax = 0.0;
    for (auto& [p, w] : merged) wmax = std::max(wmax, std::abs(w));

    NodeSet out;
    if (wmax == 0.0) return out;
    const double drop = 1e-15 * wmax;

    if (static_cast<int>(merged.size()) <= node_cap) {
        for (auto& [p, w] : merged) {
            if (std::abs(w) <= drop) continue;
            for (double c : p) out.pts.push_back(c);
            out.supply.push_back(w);
        }
    } else {
        // aggregate signed supplies onto a grid sized to respect node_cap
        double cell = 2.0 * b.radius / std::max(2.0, std::floor(std::pow(double(node_cap), 1.0 / d)));
        struct CellAgg { double w = 0.0; Vec centroid; double absw = 0.0; };
        for (int round = 0; round < 20; ++round) {
            std::map<std::vector<long long>, CellAgg> cells;
            std::vector<long long> key(d);
            for (auto& [p, w] : merged) {
                if (std::abs(w) <= drop) continue;
                for (int a = 0; a < d; ++a) key[a] = static_cast<long long>(std::floor(p[a] / cell));
                auto& agg = cells[key];
                if (agg.centroid.size() == 0) agg.centroid = Vec::Zero(d);
                agg.w += w;
                agg.absw += std::abs(w);
                for (int a = 0; a < d; ++a) agg.centroid[a] += std::abs(w) * p[a];
            }
            if (static_cast<int>(cells.size()) <= node_cap || round == 19) {
                for (auto& [k, agg] : cells) {
                    if (std::abs(agg.w) <= drop) continue;
                    Vec c = agg.centroid / agg.absw;
                    for (int a = 0; a < d; ++a) out.pts.push_back(c[a]);
                    out.supply.push_back(agg.w);
                    out.aggregation_bias += agg.absw * 0.5 * std::sqrt(double(d)) * cell;
                }
                break;
            }
            cell *= 1.5;
            out.aggregation_bias = 0.0;
        }
    }

    for (std::size_t i = 0; i < out.supply.size(); ++i) {
        double dist = 0.0;
        for (int a = 0; a < d; ++a) {
            double v = out.pts[i * d + a] - b.center[a];
            dist += v * v;
        }
        out.bcost.push_back(std::max(0.0, b.radius - std::sqrt(dist)));
    }
    return out;
}

}  // namespace

double lipschitz_dual_flow(int dim, const std::vector<double>& pts,
                           const std::vector<double>& supply,
                           const std::vector<double>& bcost, BlDiagnostics* diag) {
    if (supply.empty()) {
        if (diag) *diag = BlDiagnostics{};
        return 0.0;
    }
    FlowSolver solver(dim, pts, supply, bcost);
    return solver.solve(diag);
}

double bl_distance(const DiscreteMeasure& sigma, const DiscreteMeasure& nu, const Ball& b,
                   BlDiagnostics* diag, int node_cap) {
    NodeSet nodes = gather_nodes(sigma, nu, b, node_cap);
    BlDiagnostics local;
    const double value = lipschitz_dual_flow(sigma.dim(), nodes.pts, nodes.supply, nodes.bcost,
                                             &local);
    local.aggregation_bias = nodes.aggregation_bias;
    if (diag) *diag = local;
    return value;
}

}  // namespace riesz
