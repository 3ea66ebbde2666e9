#pragma once

#include "riesztool/graphfn.hpp"
#include "riesztool/kernels.hpp"
#include "riesztool/planefit.hpp"

#include <memory>

namespace riesz {

struct StoppingParams {
    Constants constants;
    Ball b0;                          // the reference ball B_0
    std::vector<int> f_atoms;         // atom indices forming the compact set F
    AffinePlane d0;                   // reference plane
    double scale_floor = 0.0;         // lowest dyadic scale (0: truncation floor)
    int levels_per_octave = 4;
    double plane_grid_spacing = 0.0;  // 0: r0 / 64
    double mollifier_floor = 0.0;     // min mollification scale (0: 4 * grid spacing)
};

/// n+1 balls of radius ~ t/C12 inside B(y,t) whose every transversal spans a
/// simplex of n-volume >= t^n / C14 (certified on sampled transversals).
struct SimplexBalls {
    std::vector<Ball> balls;
    double certified_volume = 0.0;  // min sampled transversal volume
    double achieved_c14 = 0.0;      // t^n / certified_volume
};

SimplexBalls select_simplex_balls(const DiscreteMeasure& mu, const Ball& b,
                                  double c11 = 10.0, double c12 = 8.0);

/// Affine span of max-weight representatives of the simplex balls, plus the
/// per-point geometric distance and the Riesz-difference bound evaluated at
/// the queried points.
struct PlaneFromRiesz {
    AffinePlane plane;
    std::vector<int> representatives;   // atom ids x_0..x_n
    std::vector<double> distances;      // dist(x, L) per queried atom
    std::vector<double> bounds;         // lemma right-hand side per queried atom
};

PlaneFromRiesz estimate_plane_from_riesz(const DiscreteMeasure& mu, const SimplexBalls& balls,
                                         double eps, const std::vector<int>& queries,
                                         double t);

/// Effective beta_infinity certificate from principal-value oscillation data:
/// sup over F cap 3B of dist(. , L)/r with L estimated from Riesz-transform
/// differences at a good radius.
struct FlatnessCertificate {
    double epsilon1 = 0.0;
    AffinePlane plane;
    double scale_used = 0.0;
};

FlatnessCertificate flatness_certificate(const DiscreteMeasure& mu,
                                         const std::vector<int>& f_atoms, const Ball& b,
                                         double delta);

/// Spatial index over the minimal-scale S pairs (X, t_min(X)): supports the
/// weighted nearest queries behind d, D and the Whitney blending. Pairs are
/// grouped by their (grid-valued) scale, one kd-tree per group, and queries
/// prune whole groups through the additive weight.
class SIndex {
public:
    struct Pair {
        Vec full;   // X in R^d
        Vec proj;   // Pi(X) in reference-plane coordinates
        double t;   // minimal S scale of X
        int row;    // table row
    };

    SIndex() = default;
    SIndex(std::vector<Pair> pairs, int d, int n);

    bool empty() const { return pairs_.empty(); }
    const std::vector<Pair>& pairs() const { return pairs_; }

    /// inf over pairs of |X - x| + t, capped.
    double d(const Vec& x, double cap) const;
    /// inf over pairs of |Pi(X) - p| + t, capped.
    double D(const Vec& p, double cap) const;
    /// all pairs with |Pi(X) - p| <= radius.
    void visit_proj_ball(const Vec& p, double radius, const std::function<void(int)>& fn) const;

private:
    std::vector<Pair> pairs_;
    std::vector<double> level_t_;
    std::vector<KdTree> level_full_, level_proj_;
    std::vector<std::vector<int>> level_pair_;  // kd order -> pair index
    KdTree all_proj_;
    std::vector<int> all_pair_;
};

/// Membership table of the stopping conditions over (atom of F) x (dyadic
/// scale). Values are stored for every F atom; S_total membership is only
/// meaningful on F cap B_0 (the region's domain).
class StoppingRegion {
public:
    const DiscreteMeasure* mu = nullptr;
    StoppingParams params;
    std::vector<double> scales;       // ascending dyadic grid
    std::vector<int> rows;            // F atom ids (table rows)
    std::vector<int> row_of_atom;     // atom id -> row or -1
    std::vector<uint8_t> in_b0;       // row is in F cap B_0
    std::vector<double> delta_f;      // rows x scales
    std::vector<double> beta1;        // rows x scales
    std::vector<double> angle;        // rows x scales (NaN when no plane)
    std::vector<uint8_t> has_plane;   // rows x scales
    std::vector<double> plane_data;   // rows x scales x (d + d*n): base, frame
    std::vector<uint8_t> member;      // rows x scales: (i) and (ii) and (iii)
    std::vector<double> h;            // per row (only meaningful on F cap B_0)
    std::vector<double> t_min;        // per row: min scale t >= h with membership (inf if none)
    std::shared_ptr<const SIndex> s_index;

    std::size_t cell(std::size_t row, std::size_t si) const { return row * scales.size() + si; }
    AffinePlane plane_at(std::size_t row, std::size_t si) const;
    bool s_empty() const { return s_index->empty(); }
};

StoppingRegion stopping_region(const DiscreteMeasure& mu, const StoppingParams& params);

/// h(x) for a table row: 4 * (largest excluded scale witnessed near x), the
/// grid sup of the paper's stopping height. Already cached on the region.
double stopping_height(const StoppingRegion& region, int atom);

/// d(x) = inf over (X,t) in S of |X-x| + t; capped at 16 r0 when S is empty.
double d_function(const StoppingRegion& region, const Vec& x);
/// D(p) = inf over (X,t) in S of |Pi(X)-p| + t on the reference plane.
double D_function(const StoppingRegion& region, const Vec& p);

enum class CoronaLabel : uint8_t { Z = 0, F1 = 1, F2 = 2, F3 = 3, unlabeled = 4 };

/// First-matching-rule labels in the order Z, F1, F2, F3 for F cap B_0.
std::vector<CoronaLabel> partition(const StoppingRegion& region);

struct CoronaGraph {
    GraphFunction a;                  // graph over the reference plane
    std::vector<uint8_t> f_tilde;     // per table row: in the good set
    std::vector<double> d_values;     // d(x) per row
    double grad_inf = 0.0;
    double hess_scale = 0.0;          // max |D2 A(p)| D(p) over the grid
    bool s_was_empty = false;
};

CoronaGraph construct_graph(const StoppingRegion& region);

/// Mollified pushforward density g(p) of mu restricted to the good set,
/// mollification scale eps^{1/4} D(p) (floored at the grid resolution).
struct MollifiedDensity {
    GraphFunction g;                 // scalar field on the same plane grid
    std::vector<uint8_t> g1;         // per node: p in Pi(8B0) and g > 1/2
};

MollifiedDensity mollified_density(const DiscreteMeasure& mu, const StoppingRegion& region,
                                   const CoronaGraph& graph);

/// One full run of the construction: table, graph, good set, density.
struct CoronaPipeline {
    StoppingRegion region;
    CoronaGraph graph;
    MollifiedDensity density;
    std::vector<CoronaLabel> labels;
};

CoronaPipeline run_corona_pipeline(const DiscreteMeasure& mu, const StoppingParams& params);

struct MainLemmaReport {
    double mass_8b0 = 0.0, mass_8b0_expected = 0.0;
    double mass_10b0_minus_f = 0.0, mass_b0 = 0.0;
    double growth_m1 = 0.0;          // max density over sampled (x, r), r >= floor
    double growth_cap = 0.0;         // max density for r <= 100 r0
    double op_norm = 0.0;            // truncated transform on L^2(mu|F) at the floor
    double osc_max = 0.0;            // max oscillation over sampled atoms/windows
    bool hyp_a = false, hyp_b = false, hyp_d = false;
    double frac_z = 0.0, frac_f1 = 0.0, frac_f2 = 0.0, frac_f3 = 0.0, frac_unlabeled = 0.0;
    double coverage = 0.0;           // mu(Ftilde cap B0 minus labels) / (c_n r0^n)
    bool coverage_pass = false;
    double grad_inf = 0.0;
    double mass_f_minus_ftilde_ratio = 0.0;
};

/// Hypothesis measurements plus the pipeline outcome. Reuses a precomputed
/// pipeline when one is supplied.
MainLemmaReport main_lemma_report(const DiscreteMeasure& mu, const StoppingParams& params,
                                  const CoronaPipeline* pipeline = nullptr);

}  // namespace riesz
