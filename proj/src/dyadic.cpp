#include "riesztool/dyadic.hpp"

#include <cmath>
#include <map>

namespace riesz {

DyadicLattice dyadic_lattice(const DiscreteMeasure& mu, int level_min, int level_max,
                             LatticeMode mode) {
    if (level_min > level_max) throw std::invalid_argument("dyadic_lattice: empty level range");
    const int d = mu.dim();
    const int m = (mode == LatticeMode::graph) ? mu.codim_n() : d;

    DyadicLattice lat;
    lat.mode = mode;
    lat.level_min = level_min;
    lat.level_max = level_max;

    for (int level = level_min; level <= level_max; ++level) {
        const double side = std::ldexp(1.0, -level);
        std::map<std::vector<long long>, int> cells;
        const int begin = static_cast<int>(lat.cubes.size());

        std::vector<long long> key(m);
        for (std::size_t i = 0; i < mu.size(); ++i) {
            if (!(mu.weight(i) > 0.0)) continue;
            const double* p = mu.point_ptr(i);
            for (int a = 0; a < m; ++a) key[a] = static_cast<long long>(std::floor(p[a] / side));
            auto [it, fresh] = cells.try_emplace(key, -1);
            if (fresh) {
                it->second = static_cast<int>(lat.cubes.size());
                DyadicCube q;
                q.level = level;
                q.index = key;
                q.side = side;
                lat.cubes.push_back(std::move(q));
            }
            DyadicCube& q = lat.cubes[it->second];
            q.atoms.push_back(static_cast<int>(i));
            q.mass += mu.weight(i);
        }

        // 3Q membership: lattice index within +-1 in every lattice axis.
        for (std::size_t i = 0; i < mu.size(); ++i) {
            if (!(mu.weight(i) > 0.0)) continue;
            const double* p = mu.point_ptr(i);
            for (int a = 0; a < m; ++a) key[a] = static_cast<long long>(std::floor(p[a] / side));
            // visit all neighbor cells this atom extends into
            std::vector<long long> probe(m);
            std::function<void(int)> rec = [&](int axis) {
                if (axis == m) {
                    auto it = cells.find(probe);
                    if (it != cells.end()) {
                        DyadicCube& q = lat.cubes[it->second];
                        q.atoms3.push_back(static_cast<int>(i));
                        q.mass3 += mu.weight(i);
                    }
                    return;
                }
                for (long long off = -1; off <= 1; ++off) {
                    probe[axis] = key[axis] + off;
                    rec(axis + 1);
                }
            };
            rec(0);
        }

        for (int c = begin; c < static_cast<int>(lat.cubes.size()); ++c) {
            DyadicCube& q = lat.cubes[c];
            q.center = Vec::Zero(d);
            for (int a = 0; a < m; ++a) q.center[a] = (q.index[a] + 0.5) * side;
            if (mode == LatticeMode::graph && d > m) {
                // lift the center to the fiber mass centroid
                Vec fiber = Vec::Zero(d - m);
                for (int idx : q.atoms) {
                    const double* p = mu.point_ptr(idx);
                    for (int a = m; a < d; ++a) fiber[a - m] += mu.weight(idx) * p[a];
                }
                if (q.mass > 0.0)
                    for (int a = m; a < d; ++a) q.center[a] = fiber[a - m] / q.mass;
            }
            // diameter: projected cube diagonal, or the atom spread if wider
            double diag = std::sqrt(static_cast<double>(m)) * side;
            double lo[8], hi[8];
            for (int a = 0; a < d; ++a) {
                lo[a] = std::numeric_limits<double>::infinity();
                hi[a] = -lo[a];
            }
            for (int idx : q.atoms) {
                const double* p = mu.point_ptr(idx);
                for (int a = 0; a < d; ++a) {
                    lo[a] = std::min(lo[a], p[a]);
                    hi[a] = std::max(hi[a], p[a]);
                }
            }
            double spread2 = 0.0;
            if (!q.atoms.empty())
                for (int a = 0; a < d; ++a) spread2 += (hi[a] - lo[a]) * (hi[a] - lo[a]);
            q.diam = std::max(diag, std::sqrt(spread2));
            q.b_q = Ball(q.center, 3.0 * q.diam);
        }
        lat.level_ranges.emplace_back(begin, static_cast<int>(lat.cubes.size()));
    }
    return lat;
}

LevelSums level_sums(const DyadicLattice& lattice, const std::vector<double>& values) {
    if (values.size() != lattice.cubes.size())
        throw std::invalid_argument("level_sums: one coefficient per cube required");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("level_sums: missing/non-finite coefficient");

    LevelSums out;
    for (std::size_t li = 0; li < lattice.level_ranges.size(); ++li) {
        auto [begin, end] = lattice.level_ranges[li];
        double s = 0.0;
        for (int c = begin; c < end; ++c) s += values[c] * values[c] * lattice.cubes[c].mass;
        out.levels.push_back(lattice.level_min + static_cast<int>(li));
        out.per_level.push_back(s);
        out.total += s;
    }
    return out;
}

}  // namespace riesz
