#include "riesztool/corona.hpp"

#include "riesztool/bumps.hpp"

#include <algorithm>
#include <atomic>
#include <map>

namespace riesz {

namespace {
std::shared_ptr<const SIndex> build_s_index(const StoppingRegion& region);
}

// ---------------------------------------------------------------------------
// simplex balls and plane estimation

SimplexBalls select_simplex_balls(const DiscreteMeasure& mu, const Ball& b, double c11,
                                  double c12) {
    const int n = mu.codim_n();
    const double t = b.radius;
    if (density(mu, b.center, t) < 1.0 / c11)
        throw std::invalid_argument("select_simplex_balls: density precondition fails");

    std::vector<int> atoms;
    mu.atoms_in_ball(b.center, t, atoms);

    // candidate centers: atoms whose small ball carries mass
    const double rsmall = t / c12;
    std::vector<int> candidates;
    for (int idx : atoms)
        if (mu.weight(idx) > 0.0) candidates.push_back(idx);
    if (candidates.size() < static_cast<std::size_t>(n + 1))
        throw std::invalid_argument("select_simplex_balls: not enough atoms");

    // greedy farthest-point selection, seeded at the densest candidate
    std::vector<int> chosen;
    {
        int best = candidates.front();
        double best_mass = -1.0;
        for (int idx : candidates) {
            const double m = mu.mass_in_ball(mu.point(idx), rsmall);
            if (m > best_mass) { best_mass = m; best = idx; }
        }
        chosen.push_back(best);
    }
    while (chosen.size() < static_cast<std::size_t>(n + 1)) {
        int best = -1;
        double best_score = -1.0;
        for (int idx : candidates) {
            double score = std::numeric_limits<double>::infinity();
            for (int c : chosen) score = std::min(score, (mu.point(idx) - mu.point(c)).norm());
            if (score > best_score) { best_score = score; best = idx; }
        }
        chosen.push_back(best);
    }

    SimplexBalls out;
    for (int idx : chosen) out.balls.emplace_back(mu.point(idx), rsmall);

    // certify the transversal volume on sampled vertex choices: centers plus
    // extreme atoms of each ball
    std::vector<std::vector<Vec>> options(n + 1);
    for (int i = 0; i <= n; ++i) {
        options[i].push_back(out.balls[i].center);
        std::vector<int> inball;
        mu.atoms_in_ball(out.balls[i].center, rsmall, inball);
        // extremes along each coordinate axis
        for (int axis = 0; axis < mu.dim(); ++axis) {
            int lo = -1, hi = -1;
            for (int idx : inball) {
                if (lo < 0 || mu.point_ptr(idx)[axis] < mu.point_ptr(lo)[axis]) lo = idx;
                if (hi < 0 || mu.point_ptr(idx)[axis] > mu.point_ptr(hi)[axis]) hi = idx;
            }
            if (lo >= 0) options[i].push_back(mu.point(lo));
            if (hi >= 0) options[i].push_back(mu.point(hi));
        }
    }
    double vol_min = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> pick(n + 1, 0);
    while (true) {
        std::vector<Vec> verts;
        for (int i = 0; i <= n; ++i) verts.push_back(options[i][pick[i]]);
        vol_min = std::min(vol_min, simplex_volume(verts));
        int axis = 0;
        while (axis <= n && pick[axis] + 1 == options[axis].size()) { pick[axis] = 0; ++axis; }
        if (axis > n) break;
        ++pick[axis];
    }
    out.certified_volume = vol_min;
    out.achieved_c14 = vol_min > 0.0 ? std::pow(t, n) / vol_min
                                     : std::numeric_limits<double>::infinity();
    if (!(vol_min > 0.0))
        throw std::runtime_error("select_simplex_balls: no certified family found");
    return out;
}

PlaneFromRiesz estimate_plane_from_riesz(const DiscreteMeasure& mu, const SimplexBalls& balls,
                                         double eps, const std::vector<int>& queries,
                                         double t) {
    const int n = mu.codim_n();
    PlaneFromRiesz out;

    for (const Ball& b : balls.balls) {
        std::vector<int> inball;
        mu.atoms_in_ball(b.center, b.radius, inball);
        int best = -1;
        for (int idx : inball)
            if (best < 0 || mu.weight(idx) > mu.weight(best)) best = idx;
        if (best < 0) throw std::logic_error("estimate_plane_from_riesz: empty simplex ball");
        out.representatives.push_back(best);
    }

    std::vector<Vec> verts;
    for (int idx : out.representatives) verts.push_back(mu.point(idx));
    if (simplex_volume(verts) <= 0.0)
        throw std::logic_error("estimate_plane_from_riesz: representatives degenerate");

    Mat frame(mu.dim(), n);
    for (int i = 0; i < n; ++i) frame.col(i) = verts[i + 1] - verts[0];
    out.plane = AffinePlane(verts[0], frame);

    const Vec r0 = smoothed_transform(mu, verts[0], eps);
    double rsum = 0.0;
    for (int i = 1; i <= n; ++i)
        rsum += (smoothed_transform(mu, verts[i], eps) - r0).norm();

    const double p = poisson_p(mu, verts[0], eps);
    const double p2 = poisson_p2(mu, verts[0], eps);
    for (int q : queries) {
        const Vec x = mu.point(q);
        out.distances.push_back(out.plane.distance(x));
        const double rq = (smoothed_transform(mu, x, eps) - r0).norm();
        const double bound = eps / p2 * (rsum + rq) + p / p2 * t * t / eps;
        out.bounds.push_back(bound);
    }
    return out;
}

FlatnessCertificate flatness_certificate(const DiscreteMeasure& mu,
                                         const std::vector<int>& f_atoms, const Ball& b,
                                         double delta) {
    const double r = b.radius;
    DiscreteMeasure muf = mu.restrict_to(f_atoms);

    std::vector<int> in3b_local;
    muf.atoms_in_ball(b.center, 3.0 * r, in3b_local);
    if (in3b_local.empty())
        throw std::invalid_argument("flatness_certificate: F does not meet 3B");

    FlatnessCertificate best;
    best.epsilon1 = std::numeric_limits<double>::infinity();

    const double floor = std::max(mu.truncation_floor(), 1e-12 * r);
    const int mmax = std::max(0, static_cast<int>(std::floor(std::log2(1.0 / delta))));
    for (int m = 0; m <= std::min(mmax, 6); ++m) {
        const double base = std::ldexp(r, m);
        double ell;
        try {
            ell = find_good_radius(muf, b.center, std::max(base, floor), /*M=*/64.0);
        } catch (const std::exception&) {
            continue;
        }
        if (ell > r / delta) continue;
        SimplexBalls balls;
        try {
            balls = select_simplex_balls(muf, Ball(b.center, r));
        } catch (const std::exception&) {
            continue;
        }
        PlaneFromRiesz est = estimate_plane_from_riesz(muf, balls, ell, in3b_local, r);
        double sup = 0.0;
        for (double dist : est.distances) sup = std::max(sup, dist);
        const double cert = sup / r;
        if (cert < best.epsilon1) {
            best.epsilon1 = cert;
            best.plane = est.plane;
            best.scale_used = ell;
        }
    }
    if (!std::isfinite(best.epsilon1))
        throw std::runtime_error("flatness_certificate: preconditions failed at every scale");
    return best;
}

// ---------------------------------------------------------------------------
// stopping region

AffinePlane StoppingRegion::plane_at(std::size_t row, std::size_t si) const {
    const int d = mu->dim();
    const int n = mu->codim_n();
    const std::size_t stride = static_cast<std::size_t>(d) * (n + 1);
    const double* data = plane_data.data() + cell(row, si) * stride;
    Vec base(d);
    for (int a = 0; a < d; ++a) base[a] = data[a];
    Mat frame(d, n);
    for (int j = 0; j < n; ++j)
        for (int a = 0; a < d; ++a) frame(a, j) = data[d + j * d + a];
    return AffinePlane(base, frame);
}

StoppingRegion stopping_region(const DiscreteMeasure& mu, const StoppingParams& params) {
    params.constants.validate();
    const int d = mu.dim();
    const int n = mu.codim_n();
    const double r0 = params.b0.radius;

    StoppingRegion reg;
    reg.mu = &mu;
    reg.params = params;

    if (params.f_atoms.empty()) throw std::invalid_argument("stopping_region: empty F");

    // dyadic scale grid, ascending, levels_per_octave per octave
    double floor = params.scale_floor > 0.0 ? params.scale_floor : mu.truncation_floor();
    if (!(floor > 0.0)) floor = r0 / 4096.0;
    const double ratio = std::pow(2.0, 1.0 / params.levels_per_octave);
    for (double t = 8.0 * r0; t >= floor * 0.999; t /= ratio) reg.scales.push_back(t);
    std::reverse(reg.scales.begin(), reg.scales.end());
    if (reg.scales.empty()) throw std::invalid_argument("stopping_region: empty scale grid");

    reg.rows = params.f_atoms;
    reg.row_of_atom.assign(mu.size(), -1);
    for (std::size_t rw = 0; rw < reg.rows.size(); ++rw) reg.row_of_atom[reg.rows[rw]] = static_cast<int>(rw);

    const std::size_t nrows = reg.rows.size();
    const std::size_t nscales = reg.scales.size();
    const std::size_t cells = nrows * nscales;
    reg.in_b0.assign(nrows, 0);
    reg.delta_f.assign(cells, 0.0);
    reg.beta1.assign(cells, std::numeric_limits<double>::quiet_NaN());
    reg.angle.assign(cells, std::numeric_limits<double>::quiet_NaN());
    reg.has_plane.assign(cells, 0);
    reg.plane_data.assign(cells * static_cast<std::size_t>(d) * (n + 1), 0.0);
    reg.member.assign(cells, 0);

    DiscreteMeasure muf = mu.restrict_to(params.f_atoms);
    // map from muf atom order back to mu atom ids
    const std::vector<int>& f_ids = params.f_atoms;

    for (std::size_t rw = 0; rw < nrows; ++rw)
        reg.in_b0[rw] = params.b0.contains(mu.point(reg.rows[rw])) ? 1 : 0;

    const double delta0 = params.constants.delta0;
    const double eps = params.constants.eps;
    const double alpha = params.constants.alpha;
    const std::size_t plane_stride = static_cast<std::size_t>(d) * (n + 1);

    parallel_for(nrows, [&](std::size_t rw) {
        const Vec x = mu.point(reg.rows[rw]);
        std::vector<int> ball_atoms;
        for (std::size_t si = 0; si < nscales; ++si) {
            const double t = reg.scales[si];
            const std::size_t c = reg.cell(rw, si);

            reg.delta_f[c] = density(muf, x, t);

            muf.atoms_in_ball(x, 3.0 * t, ball_atoms);
            auto fit = try_fit_plane_atoms(muf, ball_atoms);
            if (fit) {
                double b1 = 0.0;
                for (int idx : ball_atoms)
                    b1 += muf.weight(idx) * fit->distance(muf.point(idx));
                b1 /= std::pow(t, n + 1);
                reg.beta1[c] = b1;
                reg.angle[c] = principal_angle(*fit, params.d0);
                reg.has_plane[c] = 1;
                double* pd = reg.plane_data.data() + c * plane_stride;
                for (int a = 0; a < d; ++a) pd[a] = fit->base()[a];
                for (int j = 0; j < n; ++j)
                    for (int a = 0; a < d; ++a) pd[d + j * d + a] = fit->frame()(a, j);
            }

            // membership: conditions (i), (ii), (iii)
            bool ok = reg.delta_f[c] >= 0.5 * delta0;
            if (ok) ok = reg.has_plane[c] && reg.beta1[c] < 2.0 * eps;
            if (ok) {
                // witness for (iii): the beta_1 fit plane, falling back to
                // the reference plane itself
                bool witness = reg.beta1[c] <= 2.0 * eps && reg.angle[c] <= alpha;
                if (!witness) {
                    double b1_d0 = 0.0;
                    for (int idx : ball_atoms)
                        b1_d0 += muf.weight(idx) * params.d0.distance(muf.point(idx));
                    b1_d0 /= std::pow(t, n + 1);
                    witness = b1_d0 <= 2.0 * eps;
                }
                ok = witness;
            }
            reg.member[c] = ok ? 1 : 0;
        }
    });

    // stopping height: every excluded pair (y, tau) with y in F cap B_0
    // pushes h(x) to 4 tau on B(y, tau/3)
    reg.h.assign(nrows, 0.0);
    for (std::size_t rw = 0; rw < nrows; ++rw) {
        if (!reg.in_b0[rw]) continue;
        const Vec y = mu.point(reg.rows[rw]);
        for (std::size_t si = 0; si < nscales; ++si) {
            if (reg.member[reg.cell(rw, si)]) continue;
            const double tau = reg.scales[si];
            muf.visit_ball(y, tau / 3.0, [&](int local) {
                const int row = reg.row_of_atom[f_ids[local]];
                if (row >= 0 && reg.in_b0[row]) {
                    double& hx = reg.h[row];
                    hx = std::max(hx, 4.0 * tau);
                }
            });
        }
    }

    reg.t_min.assign(nrows, std::numeric_limits<double>::infinity());
    for (std::size_t rw = 0; rw < nrows; ++rw) {
        if (!reg.in_b0[rw]) continue;
        for (std::size_t si = 0; si < nscales; ++si) {
            if (reg.scales[si] >= reg.h[rw] && reg.member[reg.cell(rw, si)]) {
                reg.t_min[rw] = reg.scales[si];
                break;
            }
        }
    }
    reg.s_index = build_s_index(reg);
    return reg;
}

double stopping_height(const StoppingRegion& region, int atom) {
    const int row = region.row_of_atom[atom];
    if (row < 0) throw std::invalid_argument("stopping_height: atom not in F");
    return region.h[row];
}

SIndex::SIndex(std::vector<Pair> pairs, int d, int n) : pairs_(std::move(pairs)) {
    std::map<double, std::vector<int>> by_scale;
    for (std::size_t i = 0; i < pairs_.size(); ++i)
        by_scale[pairs_[i].t].push_back(static_cast<int>(i));
    std::vector<double> all_proj_flat;
    for (auto& [t, ids] : by_scale) {
        std::vector<double> full_flat, proj_flat;
        for (int id : ids) {
            for (int a = 0; a < d; ++a) full_flat.push_back(pairs_[id].full[a]);
            for (int a = 0; a < n; ++a) proj_flat.push_back(pairs_[id].proj[a]);
        }
        level_t_.push_back(t);
        level_full_.emplace_back(full_flat, d);
        level_proj_.emplace_back(proj_flat, n);
        level_pair_.push_back(ids);
    }
    std::vector<int> all_ids;
    for (std::size_t i = 0; i < pairs_.size(); ++i) {
        for (int a = 0; a < n; ++a) all_proj_flat.push_back(pairs_[i].proj[a]);
        all_ids.push_back(static_cast<int>(i));
    }
    all_proj_ = KdTree(all_proj_flat, n);
    all_pair_ = std::move(all_ids);
}

double SIndex::d(const Vec& x, double cap) const {
    double best = cap;
    for (std::size_t l = 0; l < level_t_.size(); ++l) {
        if (level_t_[l] >= best) continue;
        auto [idx, dist] = level_full_[l].nearest(x.data(), best - level_t_[l]);
        if (idx >= 0) best = std::min(best, dist + level_t_[l]);
    }
    return best;
}

double SIndex::D(const Vec& p, double cap) const {
    double best = cap;
    for (std::size_t l = 0; l < level_t_.size(); ++l) {
        if (level_t_[l] >= best) continue;
        auto [idx, dist] = level_proj_[l].nearest(p.data(), best - level_t_[l]);
        if (idx >= 0) best = std::min(best, dist + level_t_[l]);
    }
    return best;
}

void SIndex::visit_proj_ball(const Vec& p, double radius,
                             const std::function<void(int)>& fn) const {
    all_proj_.visit_ball(p.data(), radius, [&](int i) { fn(all_pair_[i]); });
}

namespace {

std::shared_ptr<const SIndex> build_s_index(const StoppingRegion& region) {
    std::vector<SIndex::Pair> pairs;
    const DiscreteMeasure& mu = *region.mu;
    const AffinePlane& d0 = region.params.d0;
    for (std::size_t rw = 0; rw < region.rows.size(); ++rw) {
        if (!region.in_b0[rw] || !std::isfinite(region.t_min[rw])) continue;
        SIndex::Pair pr;
        pr.full = mu.point(region.rows[rw]);
        pr.proj = d0.frame().transpose() * (pr.full - d0.base());
        pr.t = region.t_min[rw];
        pr.row = static_cast<int>(rw);
        pairs.push_back(std::move(pr));
    }
    return std::make_shared<SIndex>(std::move(pairs), mu.dim(), mu.codim_n());
}

}  // namespace

double d_function(const StoppingRegion& region, const Vec& x) {
    return region.s_index->d(x, 16.0 * region.params.b0.radius);
}

double D_function(const StoppingRegion& region, const Vec& p) {
    return region.s_index->D(p, 16.0 * region.params.b0.radius);
}

std::vector<CoronaLabel> partition(const StoppingRegion& region) {
    const DiscreteMeasure& mu = *region.mu;
    const Constants& cst = region.params.constants;
    const std::size_t nrows = region.rows.size();
    DiscreteMeasure muf = mu.restrict_to(region.params.f_atoms);
    const std::vector<int>& f_ids = region.params.f_atoms;

    std::vector<CoronaLabel> labels(nrows, CoronaLabel::unlabeled);
    parallel_for(nrows, [&](std::size_t rw) {
        if (!region.in_b0[rw]) return;
        if (region.h[rw] <= 0.0) {
            labels[rw] = CoronaLabel::Z;
            return;
        }
        const Vec x = mu.point(region.rows[rw]);
        const double hx = region.h[rw];

        // witness scan over the tau window, one pass per rule to preserve
        // the set-difference order F1, F2, F3
        bool f1 = false, f2 = false, f3 = false;
        std::vector<int> near;
        for (std::size_t si = 0; si < region.scales.size(); ++si) {
            const double tau = region.scales[si];
            if (tau < hx / 5.0 || tau > hx / 2.0) continue;
            muf.atoms_in_ball(x, tau / 2.0, near);
            for (int local : near) {
                const int yrow = region.row_of_atom[f_ids[local]];
                if (yrow < 0) continue;
                const std::size_t c = region.cell(yrow, si);
                if (region.delta_f[c] <= cst.delta0) f1 = true;
                if (std::isfinite(region.beta1[c]) && region.beta1[c] >= cst.eps) f2 = true;
                if (region.has_plane[c] && region.angle[c] >= 0.75 * cst.alpha) f3 = true;
            }
        }
        if (f1) labels[rw] = CoronaLabel::F1;
        else if (f2) labels[rw] = CoronaLabel::F2;
        else if (f3) labels[rw] = CoronaLabel::F3;
    });
    return labels;
}

// ---------------------------------------------------------------------------
// graph construction

CoronaGraph construct_graph(const StoppingRegion& region) {
    const DiscreteMeasure& mu = *region.mu;
    const AffinePlane& d0 = region.params.d0;
    const int d = mu.dim();
    const int n = mu.codim_n();
    const double r0 = region.params.b0.radius;
    const double cap = 16.0 * r0;

    CoronaGraph out;
    const SIndex& sidx = *region.s_index;
    const auto& pairs = sidx.pairs();
    out.s_was_empty = pairs.empty();

    const double spacing = region.params.plane_grid_spacing > 0.0
                               ? region.params.plane_grid_spacing
                               : r0 / 64.0;
    const Vec center_proj = d0.frame().transpose() * (region.params.b0.center - d0.base());
    Vec lo(n), hi(n);
    for (int a = 0; a < n; ++a) {
        lo[a] = center_proj[a] - 8.5 * r0;
        hi[a] = center_proj[a] + 8.5 * r0;
    }

    const double t_floor = region.scales.front();

    // planes per S pair, expressed as affine graphs over d0 coordinates:
    // height(p) = base_h + slope * (p - base_p)
    struct LocalPlane {
        Vec base_p;   // n
        Vec base_h;   // d-n
        Mat slope;    // (d-n) x n
    };
    std::vector<LocalPlane> local(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const std::size_t rw = pairs[i].row;
        const double t = pairs[i].t;
        std::size_t si = 0;
        while (si < region.scales.size() && region.scales[si] < t) ++si;
        if (si == region.scales.size()) si = region.scales.size() - 1;
        AffinePlane plane = region.has_plane[region.cell(rw, si)] ? region.plane_at(rw, si) : d0;
        // express as graph over d0: directions u = d0-coords, heights w
        Mat pu = d0.frame().transpose() * plane.frame();              // n x n
        Mat pw = d0.normal_frame().transpose() * plane.frame();       // (d-n) x n
        Vec bp = d0.frame().transpose() * (plane.base() - d0.base());
        Vec bh = d0.normal_frame().transpose() * (plane.base() - d0.base());
        LocalPlane lp;
        lp.base_p = bp;
        lp.base_h = bh;
        lp.slope = pw * pu.inverse();
        local[i] = std::move(lp);
    }

    GraphFunction a = make_graph_function_grid(
        n, d, lo, hi, spacing, [&](const Vec& p) {
            Vec value = Vec::Zero(d - n);
            if (pairs.empty()) return value;
            // window to Pi(3 B_0); skip work well outside the support
            const double rad = (p - center_proj).norm();
            const double win = 1.0 - smoothstep5((rad - 2.0 * r0) / r0);
            if (win <= 0.0) return value;

            const double dp = sidx.D(p, cap);

            if (dp <= 1.5 * t_floor) {
                // fiber average over the good set's closure
                double wsum = 0.0;
                Vec acc = Vec::Zero(d - n);
                sidx.visit_proj_ball(p, 3.0 * spacing, [&](int i) {
                    acc += d0.normal_frame().transpose() * (pairs[i].full - d0.base());
                    wsum += 1.0;
                });
                if (wsum > 0.0) return Vec(win * (acc / wsum));
            }

            // Whitney-style blend of the stopped planes at scale D(p)
            double wsum = 0.0;
            Vec acc = Vec::Zero(d - n);
            sidx.visit_proj_ball(p, 2.0 * dp, [&](int i) {
                const double dist = (pairs[i].proj - p).norm();
                const double w = 1.0 - smoothstep5(dist / (2.0 * dp));
                if (w <= 0.0) return;
                const LocalPlane& lp = local[i];
                acc += w * (lp.base_h + lp.slope * (p - lp.base_p));
                wsum += w;
            });
            if (wsum > 0.0) value = acc / wsum;
            return Vec(value * win);
        });

    out.a = std::move(a);
    out.grad_inf = out.a.grad_inf_norm();

    // second-difference profile |D2 A(p)| * D(p)
    double hess_scale = 0.0;
    const auto& dims = out.a.grid_dims();
    const std::size_t nodes = out.a.grid_size();
    for (std::size_t node = 0; node < nodes; ++node) {
        const Vec p = out.a.grid_point(node);
        bool interior = true;
        std::size_t rem = node;
        std::vector<int> coord(n);
        for (int axis = n - 1; axis >= 0; --axis) {
            coord[axis] = static_cast<int>(rem % dims[axis]);
            rem /= dims[axis];
            if (coord[axis] == 0 || coord[axis] == dims[axis] - 1) interior = false;
        }
        if (!interior) continue;
        double h2 = 0.0;
        for (int axis = 0; axis < n; ++axis) {
            std::size_t stride = 1;
            for (int b = axis + 1; b < n; ++b) stride *= dims[b];
            const Vec sec = (out.a.value_at_node(node + stride) -
                             2.0 * out.a.value_at_node(node) +
                             out.a.value_at_node(node - stride)) /
                            (spacing * spacing);
            h2 += sec.squaredNorm();
        }
        const double dp = sidx.D(p, cap);
        hess_scale = std::max(hess_scale, std::sqrt(h2) * dp);
    }
    out.hess_scale = hess_scale;

    // good set membership and d values per row
    const double eps_sqrt = std::sqrt(region.params.constants.eps);
    out.f_tilde.assign(region.rows.size(), 0);
    out.d_values.assign(region.rows.size(), 0.0);
    for (std::size_t rw = 0; rw < region.rows.size(); ++rw) {
        const Vec x = mu.point(region.rows[rw]);
        const double dx = sidx.d(x, cap);
        out.d_values[rw] = dx;
        const Vec p = d0.frame().transpose() * (x - d0.base());
        const Vec height = d0.normal_frame().transpose() * (x - d0.base());
        const double dist = (height - out.a.eval(p)).norm();
        out.f_tilde[rw] = dist <= eps_sqrt * dx ? 1 : 0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// mollified density and the report

MollifiedDensity mollified_density(const DiscreteMeasure& mu, const StoppingRegion& region,
                                   const CoronaGraph& graph) {
    const AffinePlane& d0 = region.params.d0;
    const int n = mu.codim_n();
    const double r0 = region.params.b0.radius;
    const double cap = 16.0 * r0;
    const double eps_quarter = std::pow(region.params.constants.eps, 0.25);

    const SIndex& sidx = *region.s_index;
    const double spacing = graph.a.spacing();
    // resolution floor: the mollifier support must average several atoms
    double floor = region.params.mollifier_floor;
    if (!(floor > 0.0))
        floor = mu.truncation_floor() > 0.0 ? 4.0 * mu.truncation_floor() : 4.0 * spacing;

    // normalization of the radial mollifier profile
    const double cn = unit_ball_volume(n);
    double radial = 0.0;
    {
        const int steps = 4096;
        const double dr = kBandOuter / steps;
        for (int i = 0; i < steps; ++i) {
            const double r = (i + 0.5) * dr;
            radial += phi_gen(r) * std::pow(r, n - 1) * dr;
        }
    }
    const double phi_mass = n * cn * radial;  // integral of phi_gen(|u|) du

    // projections of the good-set atoms, kd-indexed for the local sums
    std::vector<double> proj_flat;
    std::vector<double> w;
    for (std::size_t rw = 0; rw < region.rows.size(); ++rw) {
        if (!graph.f_tilde[rw]) continue;
        const Vec x = mu.point(region.rows[rw]);
        const Vec pr = d0.frame().transpose() * (x - d0.base());
        for (int a = 0; a < n; ++a) proj_flat.push_back(pr[a]);
        w.push_back(mu.weight(region.rows[rw]));
    }
    KdTree proj_tree(proj_flat, n);

    MollifiedDensity out;
    out.g = make_graph_function_grid(
        n, n + 1, graph.a.box_lo(), graph.a.box_hi(), spacing, [&](const Vec& p) {
            const double dp = sidx.empty() ? cap : sidx.D(p, cap);
            const double s = std::max(eps_quarter * dp, floor);
            double g = 0.0;
            proj_tree.visit_ball(p.data(), kBandOuter * s, [&](int i) {
                double dist2 = 0.0;
                for (int a = 0; a < n; ++a) {
                    const double v = proj_flat[static_cast<std::size_t>(i) * n + a] - p[a];
                    dist2 += v * v;
                }
                g += w[i] * phi_gen(std::sqrt(dist2) / s);
            });
            Vec val(1);
            val[0] = g / (phi_mass * std::pow(s, n));
            return val;
        });

    const Vec center_proj = d0.frame().transpose() * (region.params.b0.center - d0.base());
    const std::size_t nodes = out.g.grid_size();
    out.g1.assign(nodes, 0);
    for (std::size_t i = 0; i < nodes; ++i) {
        const Vec p = out.g.grid_point(i);
        if ((p - center_proj).norm() <= 8.0 * r0 && out.g.value_at_node(i)[0] > 0.5)
            out.g1[i] = 1;
    }
    return out;
}

CoronaPipeline run_corona_pipeline(const DiscreteMeasure& mu, const StoppingParams& params) {
    CoronaPipeline pipe;
    pipe.region = stopping_region(mu, params);
    pipe.graph = construct_graph(pipe.region);
    pipe.density = mollified_density(mu, pipe.region, pipe.graph);
    pipe.labels = partition(pipe.region);
    return pipe;
}

MainLemmaReport main_lemma_report(const DiscreteMeasure& mu, const StoppingParams& params,
                                  const CoronaPipeline* pipeline) {
    MainLemmaReport rep;
    const Constants& cst = params.constants;
    const int n = mu.codim_n();
    const double r0 = params.b0.radius;
    const double cn = unit_ball_volume(n);
    const Vec& x0 = params.b0.center;

    rep.mass_8b0 = mu.mass_in_ball(x0, 8.0 * r0);
    rep.mass_8b0_expected = cn * std::pow(8.0 * r0, n);
    rep.mass_b0 = mu.mass_in_ball(x0, r0);
    double f_mass = 0.0;
    for (int idx : params.f_atoms) f_mass += mu.weight(idx);
    rep.mass_10b0_minus_f = mu.mass_in_ball(x0, 10.0 * r0) - f_mass;
    rep.hyp_a = std::abs(rep.mass_8b0 - rep.mass_8b0_expected) <= 0.02 * rep.mass_8b0_expected &&
                rep.mass_10b0_minus_f <= cst.delta1 * rep.mass_b0;

    // (b): growth over sampled atoms and dyadic radii above the floor
    const double floor = std::max(mu.truncation_floor(), r0 * 1e-4);
    double m1 = 0.0, cap = 0.0;
    const std::size_t step = std::max<std::size_t>(1, params.f_atoms.size() / 256);
    for (std::size_t i = 0; i < params.f_atoms.size(); i += step) {
        const Vec x = mu.point(params.f_atoms[i]);
        for (double r = floor; r <= 128.0 * r0; r *= 2.0) {
            const double del = density(mu, x, r);
            m1 = std::max(m1, del);
            if (r <= 100.0 * r0) cap = std::max(cap, del);
        }
    }
    rep.growth_m1 = m1;
    rep.growth_cap = cap;
    rep.hyp_b = m1 <= cst.M1 && cap <= cn * (1.0 + cst.delta1) * 1.25;

    // (c) proxy: operator norm of the truncated transform on L^2(mu|F)
    {
        std::vector<int> sub;
        const std::size_t opstep = std::max<std::size_t>(1, params.f_atoms.size() / 3000);
        for (std::size_t i = 0; i < params.f_atoms.size(); i += opstep)
            sub.push_back(params.f_atoms[i]);
        DiscreteMeasure muf = mu.restrict_to(sub);
        const std::size_t m = muf.size();
        std::vector<double> f(m, 1.0), tf;
        double norm = 0.0;
        for (int iter = 0; iter < 12; ++iter) {
            // apply T then T*
            std::vector<Vec> tfield(m);
            parallel_for(m, [&](std::size_t i) {
                Vec acc = Vec::Zero(muf.dim());
                const Vec xi = muf.point(i);
                for (std::size_t jj = 0; jj < m; ++jj) {
                    if (jj == i) continue;
                    Vec diff = xi - muf.point(jj);
                    const double r2 = diff.squaredNorm();
                    if (r2 <= floor * floor) continue;
                    acc += (muf.weight(jj) * f[jj] * inv_pow_half(r2, n + 1)) * diff;
                }
                tfield[i] = acc;
            });
            tf.assign(m, 0.0);
            parallel_for(m, [&](std::size_t jj) {
                double acc = 0.0;
                const Vec xj = muf.point(jj);
                for (std::size_t i = 0; i < m; ++i) {
                    if (i == jj) continue;
                    Vec diff = muf.point(i) - xj;
                    const double r2 = diff.squaredNorm();
                    if (r2 <= floor * floor) continue;
                    acc += muf.weight(i) * tfield[i].dot(diff) * inv_pow_half(r2, n + 1);
                }
                tf[jj] = acc;
            });
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                num += muf.weight(i) * f[i] * tf[i];
                den += muf.weight(i) * f[i] * f[i];
            }
            norm = std::sqrt(std::max(0.0, num / std::max(den, 1e-300)));
            double tfnorm = 0.0;
            for (std::size_t i = 0; i < m; ++i) tfnorm += muf.weight(i) * tf[i] * tf[i];
            tfnorm = std::sqrt(tfnorm);
            if (tfnorm <= 0.0) break;
            for (std::size_t i = 0; i < m; ++i) f[i] = tf[i] / tfnorm;
        }
        rep.op_norm = norm;
    }

    // (d): oscillation over sampled atoms and dyadic windows. The window is
    // capped at 2 r0 and the atoms at F cap 2B_0: beyond that a finite
    // sample cannot represent the continuum hypothesis (the eps^2 tail of
    // the smoothed kernel sees the data's edge and measures truncation, not
    // oscillation).
    {
        const double upper = std::min(r0 / (cst.delta2 * cst.delta2), 2.0 * r0);
        std::vector<double> grid;
        for (double e = floor; e <= upper; e *= 2.0) grid.push_back(e);
        std::vector<int> osc_atoms;
        for (int idx : params.f_atoms)
            if ((mu.point(idx) - x0).norm() <= 2.0 * r0) osc_atoms.push_back(idx);
        const std::size_t ostep = std::max<std::size_t>(1, osc_atoms.size() / 128);
        double osc = 0.0;
        for (std::size_t i = 0; i < osc_atoms.size(); i += ostep) {
            const Vec x = mu.point(osc_atoms[i]);
            std::vector<Vec> sm, cu;
            for (double e : grid) {
                sm.push_back(smoothed_transform(mu, x, e));
                cu.push_back(cutoff_transform(mu, x, e));
            }
            for (std::size_t a = 0; a < grid.size(); ++a)
                for (std::size_t b = a + 1; b < grid.size(); ++b)
                    osc = std::max(osc, (sm[a] - sm[b]).norm() + (cu[a] - cu[b]).norm());
        }
        rep.osc_max = osc;
        rep.hyp_d = osc <= cst.delta2;
    }

    // run (or reuse) the pipeline
    CoronaPipeline local_pipeline;
    if (!pipeline) {
        local_pipeline = run_corona_pipeline(mu, params);
        pipeline = &local_pipeline;
    }
    const StoppingRegion& region = pipeline->region;
    const CoronaGraph& graph = pipeline->graph;
    const std::vector<CoronaLabel>& labels = pipeline->labels;

    double f_b0_mass = 0.0, mz = 0.0, m1f = 0.0, m2f = 0.0, m3f = 0.0, mun = 0.0;
    double covered = 0.0, f_minus_ftilde = 0.0;
    for (std::size_t rw = 0; rw < region.rows.size(); ++rw) {
        const double w = mu.weight(region.rows[rw]);
        if (!graph.f_tilde[rw]) f_minus_ftilde += w;
        if (!region.in_b0[rw]) continue;
        f_b0_mass += w;
        switch (labels[rw]) {
            case CoronaLabel::Z: mz += w; break;
            case CoronaLabel::F1: m1f += w; break;
            case CoronaLabel::F2: m2f += w; break;
            case CoronaLabel::F3: m3f += w; break;
            case CoronaLabel::unlabeled: mun += w; break;
        }
        const bool on_graph = graph.f_tilde[rw] && (labels[rw] == CoronaLabel::Z ||
                                                    labels[rw] == CoronaLabel::unlabeled);
        if (on_graph) covered += w;
    }
    if (f_b0_mass > 0.0) {
        rep.frac_z = mz / f_b0_mass;
        rep.frac_f1 = m1f / f_b0_mass;
        rep.frac_f2 = m2f / f_b0_mass;
        rep.frac_f3 = m3f / f_b0_mass;
        rep.frac_unlabeled = mun / f_b0_mass;
    }
    rep.mass_f_minus_ftilde_ratio = f_mass > 0.0 ? f_minus_ftilde / f_mass : 0.0;
    rep.coverage = covered / (cn * std::pow(r0, n));
    rep.coverage_pass = rep.coverage >= 0.9;
    rep.grad_inf = graph.grad_inf;
    return rep;
}

}  // namespace riesz
