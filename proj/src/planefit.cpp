#include "riesztool/planefit.hpp"

#include <algorithm>

namespace riesz {

namespace {

struct Moments {
    double mass = 0.0;
    Vec centroid;
    Mat scatter;  // sum w (y-c)(y-c)^T
    int count = 0;
};

Moments accumulate(const DiscreteMeasure& mu, const std::vector<int>& atoms) {
    const int d = mu.dim();
    Moments m;
    m.centroid = Vec::Zero(d);
    for (int idx : atoms) {
        const double w = mu.weight(idx);
        if (!(w > 0.0)) continue;
        m.mass += w;
        ++m.count;
        m.centroid += w * mu.point(idx);
    }
    if (m.mass > 0.0) m.centroid /= m.mass;
    m.scatter = Mat::Zero(d, d);
    for (int idx : atoms) {
        const double w = mu.weight(idx);
        if (!(w > 0.0)) continue;
        Vec rel = mu.point(idx) - m.centroid;
        m.scatter.noalias() += w * rel * rel.transpose();
    }
    return m;
}

void canonicalize_sign(Mat& frame) {
    for (int j = 0; j < frame.cols(); ++j) {
        for (int a = 0; a < frame.rows(); ++a) {
            if (std::abs(frame(a, j)) > 1e-12) {
                if (frame(a, j) < 0.0) frame.col(j) = -frame.col(j);
                break;
            }
        }
    }
}

std::optional<AffinePlane> plane_from_moments(const Moments& m, int n, int d,
                                              double* residual = nullptr) {
    if (m.count < n + 1 || !(m.mass > 0.0)) return std::nullopt;
    Eigen::SelfAdjointEigenSolver<Mat> eig(m.scatter);
    const Vec& evals = eig.eigenvalues();  // ascending
    const double top = evals[d - 1];
    if (!(evals[d - n] > 0.0) || evals[d - n] <= top * 1e-26) {
        // the n-th largest eigenvalue vanishes: atoms span < n dimensions
        if (n > 1 || !(top > 0.0)) return std::nullopt;
    }
    if (n == 1 && !(top > 0.0)) return std::nullopt;
    Mat frame = eig.eigenvectors().rightCols(n);
    canonicalize_sign(frame);
    if (residual) {
        double r = 0.0;
        for (int a = 0; a < d - n; ++a) r += std::max(0.0, evals[a]);
        *residual = r;
    }
    return AffinePlane(m.centroid, frame);
}

}  // namespace

std::optional<AffinePlane> try_fit_plane_atoms(const DiscreteMeasure& mu,
                                               const std::vector<int>& atoms) {
    Moments m = accumulate(mu, atoms);
    return plane_from_moments(m, mu.codim_n(), mu.dim());
}

AffinePlane fit_plane_atoms(const DiscreteMeasure& mu, const std::vector<int>& atoms) {
    auto plane = try_fit_plane_atoms(mu, atoms);
    if (!plane)
        throw std::invalid_argument("fit_plane: degenerate rank (atoms span < n dimensions)");
    return *plane;
}

AffinePlane fit_plane_l2(const DiscreteMeasure& mu, const Ball& region) {
    std::vector<int> atoms;
    mu.atoms_in_ball(region.center, region.radius, atoms);
    return fit_plane_atoms(mu, atoms);
}

AffinePlane perturb_plane(const AffinePlane& base, const Vec& params) {
    const int d = base.ambient_dim();
    const int n = base.plane_dim();
    const int codim = d - n;
    if (params.size() != static_cast<Eigen::Index>(codim * (n + 1)))
        throw std::invalid_argument("perturb_plane: params must have (d-n)(n+1) entries");
    Mat u = base.frame();
    const Mat& nor = base.normal_frame();
    for (int j = 0; j < n; ++j)
        for (int a = 0; a < codim; ++a) u.col(j) += params[j * codim + a] * nor.col(a);
    Vec b = base.base();
    for (int a = 0; a < codim; ++a) b += params[n * codim + a] * nor.col(a);
    return AffinePlane(std::move(b), std::move(u));
}

Vec nelder_mead(const std::function<double(const Vec&)>& objective, const Vec& start,
                double step, int max_iters, double tol) {
    const int k = static_cast<int>(start.size());
    std::vector<Vec> simplex(k + 1, start);
    std::vector<double> f(k + 1);
    for (int i = 1; i <= k; ++i) simplex[i][i - 1] += step;
    for (int i = 0; i <= k; ++i) f[i] = objective(simplex[i]);

    for (int iter = 0; iter < max_iters; ++iter) {
        // order: lowest first
        std::vector<int> ord(k + 1);
        for (int i = 0; i <= k; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](int a, int b) { return f[a] < f[b]; });
        std::vector<Vec> sx(k + 1);
        std::vector<double> sf(k + 1);
        for (int i = 0; i <= k; ++i) { sx[i] = simplex[ord[i]]; sf[i] = f[ord[i]]; }
        simplex = std::move(sx);
        f = std::move(sf);

        if (std::abs(f[k] - f[0]) <= tol * std::max(1.0, std::abs(f[0]))) break;

        Vec centroid = Vec::Zero(k);
        for (int i = 0; i < k; ++i) centroid += simplex[i];
        centroid /= k;

        Vec refl = centroid + (centroid - simplex[k]);
        double frefl = objective(refl);
        if (frefl < f[0]) {
            Vec expa = centroid + 2.0 * (centroid - simplex[k]);
            double fexpa = objective(expa);
            if (fexpa < frefl) { simplex[k] = expa; f[k] = fexpa; }
            else { simplex[k] = refl; f[k] = frefl; }
        } else if (frefl < f[k - 1]) {
            simplex[k] = refl;
            f[k] = frefl;
        } else {
            Vec contr = centroid + 0.5 * (simplex[k] - centroid);
            double fcontr = objective(contr);
            if (fcontr < f[k]) { simplex[k] = contr; f[k] = fcontr; }
            else {
                for (int i = 1; i <= k; ++i) {
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
                    f[i] = objective(simplex[i]);
                }
            }
        }
    }
    int best = 0;
    for (int i = 1; i <= k; ++i)
        if (f[i] < f[best]) best = i;
    return simplex[best];
}

namespace {

double beta_objective(const DiscreteMeasure& mu, const std::vector<int>& atoms,
                      const AffinePlane& plane, double ell, int n, BetaP p) {
    const double elln = std::pow(ell, n);
    if (p == BetaP::two) {
        double s = 0.0;
        for (int idx : atoms) {
            double dist = plane.distance(mu.point(idx));
            s += mu.weight(idx) * dist * dist;
        }
        return std::sqrt(s / (elln * ell * ell));
    }
    if (p == BetaP::one) {
        double s = 0.0;
        for (int idx : atoms) s += mu.weight(idx) * plane.distance(mu.point(idx));
        return s / (elln * ell);
    }
    double m = 0.0;
    for (int idx : atoms)
        if (mu.weight(idx) > 0.0) m = std::max(m, plane.distance(mu.point(idx)));
    return m / ell;
}

BetaResult beta_impl(const DiscreteMeasure& mu, const std::vector<int>& atoms, double ell,
                     BetaP p, bool refine) {
    if (atoms.empty()) throw std::invalid_argument("beta_number: empty 3Q");
    const int d = mu.dim(), n = mu.codim_n();

    Moments m = accumulate(mu, atoms);
    double residual = 0.0;
    auto fit = plane_from_moments(m, n, d, &residual);

    BetaResult out;
    if (!fit) {
        // fewer than n+1 spanning atoms: any plane through them is exact
        if (m.count >= 1) {
            // take the span padded with coordinate directions
            Mat frame = Mat::Zero(d, n);
            for (int j = 0; j < n; ++j) frame(j, j) = 1.0;
            out.plane = AffinePlane(m.centroid, frame);
            out.value = beta_objective(mu, atoms, out.plane, ell, n, p);
            if (out.value > 0.0)
                throw std::invalid_argument("beta_number: degenerate atom configuration");
            return out;
        }
        throw std::invalid_argument("beta_number: empty 3Q");
    }
    out.plane = *fit;

    if (p == BetaP::two) {
        // the L2 fit is the exact minimizer
        out.value = std::sqrt(residual / std::pow(ell, n + 2));
        return out;
    }

    out.value = beta_objective(mu, atoms, out.plane, ell, n, p);
    if (refine) {
        const int codim = d - n;
        const int k = codim * (n + 1);
        auto to_plane = [&](const Vec& s) {
            Vec raw(k);
            for (int j = 0; j < n * codim; ++j) raw[j] = s[j];
            for (int a = 0; a < codim; ++a) raw[n * codim + a] = s[n * codim + a] * ell;
            return perturb_plane(*fit, raw);
        };
        Vec best = nelder_mead(
            [&](const Vec& s) { return beta_objective(mu, atoms, to_plane(s), ell, n, p); },
            Vec::Zero(k), 0.25, 300, 1e-12);
        AffinePlane refined = to_plane(best);
        double fval = beta_objective(mu, atoms, refined, ell, n, p);
        if (fval < out.value) {
            out.value = fval;
            out.plane = refined;
            out.refined = true;
        }
    }
    return out;
}

}  // namespace

BetaResult beta_number(const DiscreteMeasure& mu, const DyadicCube& cube, BetaP p, bool refine) {
    return beta_impl(mu, cube.atoms3, cube.side, p, refine);
}

BetaResult beta_number_ball(const DiscreteMeasure& mu, const Vec& center, double t, BetaP p,
                            bool refine) {
    std::vector<int> atoms;
    mu.atoms_in_ball(center, 3.0 * t, atoms);
    return beta_impl(mu, atoms, t, p, refine);
}

}  // namespace riesz
