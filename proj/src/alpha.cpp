#include "riesztool/alpha.hpp"

#include <algorithm>

namespace riesz {

namespace {

struct PlaneGrid {
    std::vector<double> pts;   // flat, d per point
    double unit_mass = 0.0;    // spacing^n (mass at c = 1 per atom)
    double spacing = 0.0;
    int count = 0;
};

/// Uniform atom grid on L inside the ball (empty when L misses the ball).
PlaneGrid discretize_plane(const AffinePlane& plane, const Ball& ball, double spacing,
                           int max_atoms) {
    const int n = plane.plane_dim();
    const int d = plane.ambient_dim();
    PlaneGrid grid;

    const double h = plane.distance(ball.center);
    if (h > ball.radius) return grid;

    double rho = std::sqrt(std::max(0.0, ball.radius * ball.radius - h * h));
    // widen spacing if the cap would be blown
    double s = spacing;
    auto count_estimate = [&](double sp) {
        double per_axis = 2.0 * rho / sp + 1.0;
        return std::pow(per_axis, n);
    };
    while (count_estimate(s) > max_atoms) s *= 1.5;
    grid.spacing = s;
    grid.unit_mass = std::pow(s, n);

    const Vec base0 = plane.project(ball.center);
    const Mat& frame = plane.frame();
    const long long kmax = static_cast<long long>(std::floor(rho / s));
    std::vector<long long> k(n, -kmax);
    if (kmax < 0) return grid;
    while (true) {
        double off2 = 0.0;
        for (int a = 0; a < n; ++a) off2 += double(k[a]) * k[a];
        if (off2 * s * s <= rho * rho) {
            Vec q = base0;
            for (int a = 0; a < n; ++a) q += (k[a] * s) * frame.col(a);
            for (int a = 0; a < d; ++a) grid.pts.push_back(q[a]);
            ++grid.count;
        }
        int axis = 0;
        while (axis < n && k[axis] == kmax) { k[axis] = -kmax; ++axis; }
        if (axis == n) break;
        ++k[axis];
    }
    return grid;
}

struct Instance {
    int d = 0;
    Ball ball;
    // mu atoms strictly inside the ball
    std::vector<double> mu_pts;
    std::vector<double> mu_w;
    std::vector<double> mu_bcost;
};

double eval_distance(const Instance& inst, const PlaneGrid& grid, double c,
                     BlDiagnostics* diag) {
    const int d = inst.d;
    std::vector<double> pts = inst.mu_pts;
    std::vector<double> supply = inst.mu_w;
    std::vector<double> bcost = inst.mu_bcost;
    if (c > 0.0) {
        for (int i = 0; i < grid.count; ++i) {
            double dist = 0.0;
            for (int a = 0; a < d; ++a) {
                double v = grid.pts[i * d + a] - inst.ball.center[a];
                dist += v * v;
            }
            double b = inst.ball.radius - std::sqrt(dist);
            if (b <= 0.0) continue;
            for (int a = 0; a < d; ++a) pts.push_back(grid.pts[i * d + a]);
            supply.push_back(-c * grid.unit_mass);
            bcost.push_back(b);
        }
    }
    return lipschitz_dual_flow(d, pts, supply, bcost, diag);
}

struct CandidateEval {
    double distance = std::numeric_limits<double>::infinity();
    double c = 0.0;
    double slack = 0.0;
    double disc_bound = 0.0;
    bool optimal = true;
};

CandidateEval golden_over_c(const Instance& inst, const PlaneGrid& grid, double mu_mass,
                            int iters) {
    CandidateEval out;
    if (grid.count == 0) {
        BlDiagnostics diag;
        out.distance = eval_distance(inst, grid, 0.0, &diag);
        out.optimal = diag.optimal;
        return out;
    }
    const double grid_mass = grid.count * grid.unit_mass;
    double lo = 0.0, hi = 4.0 * std::max(mu_mass, 1e-300) / grid_mass;

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    BlDiagnostics diag;
    bool all_optimal = true;
    auto f = [&](double c) {
        double v = eval_distance(inst, grid, c, &diag);
        all_optimal = all_optimal && diag.optimal;
        return v;
    };
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < iters; ++it) {
        if (f1 <= f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = f(x2);
        }
    }
    const double fend = f(0.5 * (lo + hi));
    const double f0 = f(0.0);
    out.distance = std::min({f1, f2, fend});
    out.c = 0.5 * (lo + hi);
    if (f0 < out.distance) {
        out.distance = f0;
        out.c = 0.0;
    }
    out.slack = std::abs(f1 - f2);
    out.disc_bound = out.c * grid.spacing * grid_mass;
    out.optimal = all_optimal;
    return out;
}

}  // namespace

AlphaResult alpha_number(const DiscreteMeasure& mu, const DyadicCube& cube,
                         const AlphaOptions& opts) {
    const int d = mu.dim();
    const int n = mu.codim_n();
    const Ball& bq = cube.b_q;

    std::vector<int> atoms;
    mu.atoms_in_ball(bq.center, bq.radius, atoms);

    AlphaResult out;
    if (atoms.empty()) {
        // convention: cubes missing the support carry alpha = 0
        out.plane = reference_plane(n, d);
        return out;
    }

    Instance inst;
    inst.d = d;
    inst.ball = bq;
    double mu_mass = 0.0;
    for (int idx : atoms) {
        const double* p = mu.point_ptr(idx);
        double dist = 0.0;
        for (int a = 0; a < d; ++a) {
            double v = p[a] - bq.center[a];
            dist += v * v;
        }
        double b = bq.radius - std::sqrt(dist);
        if (b <= 0.0) continue;
        for (int a = 0; a < d; ++a) inst.mu_pts.push_back(p[a]);
        inst.mu_w.push_back(mu.weight(idx));
        inst.mu_bcost.push_back(b);
        mu_mass += mu.weight(idx);
    }

    // candidate planes: least-squares fit, with the lattice plane as fallback
    std::vector<AffinePlane> candidates;
    if (auto fit = try_fit_plane_atoms(mu, atoms)) candidates.push_back(*fit);
    if (candidates.empty()) {
        Vec centroid = Vec::Zero(d);
        double wsum = 0.0;
        for (int idx : atoms) {
            centroid += mu.weight(idx) * mu.point(idx);
            wsum += mu.weight(idx);
        }
        if (wsum > 0.0) centroid /= wsum;
        Mat frame = Mat::Zero(d, n);
        for (int j = 0; j < n; ++j) frame(j, j) = 1.0;
        candidates.emplace_back(centroid, frame);
    }

    const double finest = cube.side / opts.spacing_factor;
    std::vector<double> spacings;
    for (double s = cube.side / 4.0; s > finest * 0.999; s *= 0.5) spacings.push_back(s);
    if (spacings.empty() || spacings.back() > finest * 1.001) spacings.push_back(finest);

    bool have = false;
    auto consider = [&](const AffinePlane& plane, const CandidateEval& ev, double spacing) {
        if (!have || ev.distance < out.distance) {
            have = true;
            out.distance = ev.distance;
            out.c_q = ev.c;
            out.plane = plane;
            out.gap = ev.disc_bound + ev.slack;
            out.lp_optimal = ev.optimal;
            (void)spacing;
        }
    };

    for (const AffinePlane& plane : candidates) {
        for (double s : spacings) {
            PlaneGrid grid = discretize_plane(plane, bq, s, opts.max_grid_atoms);
            CandidateEval ev = golden_over_c(inst, grid, mu_mass, opts.golden_iters);
            consider(plane, ev, s);
        }
    }

    if (opts.refine && !candidates.empty()) {
        const AffinePlane seed = candidates.front();
        const int codim = d - n;
        const int k = codim * (n + 1);
        const double coarse = spacings.front();
        auto objective = [&](const Vec& sparams) {
            Vec raw(k);
            for (int j = 0; j < n * codim; ++j) raw[j] = sparams[j];
            for (int a = 0; a < codim; ++a) raw[n * codim + a] = sparams[n * codim + a] * cube.side;
            AffinePlane p = perturb_plane(seed, raw);
            PlaneGrid grid = discretize_plane(p, bq, coarse, opts.max_grid_atoms);
            return golden_over_c(inst, grid, mu_mass, 10).distance;
        };
        Vec best = nelder_mead(objective, Vec::Zero(k), 0.15, 30, 1e-8);
        Vec raw(k);
        for (int j = 0; j < n * codim; ++j) raw[j] = best[j];
        for (int a = 0; a < codim; ++a) raw[n * codim + a] = best[n * codim + a] * cube.side;
        AffinePlane refined = perturb_plane(seed, raw);
        for (double s : spacings) {
            PlaneGrid grid = discretize_plane(refined, bq, s, opts.max_grid_atoms);
            CandidateEval ev = golden_over_c(inst, grid, mu_mass, opts.golden_iters);
            consider(refined, ev, s);
        }
    }

    out.alpha = out.distance / std::pow(cube.side, n + 1);
    out.gap /= std::pow(cube.side, n + 1);
    return out;
}

}  // namespace riesz
