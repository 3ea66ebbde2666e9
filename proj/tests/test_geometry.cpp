#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riesztool/generators.hpp"
#include "riesztool/planefit.hpp"

using namespace riesz;

namespace {

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

}  // namespace

TEST_CASE("dyadic lattice examples") {
    DiscreteMeasure atom = build_measure({v2(0.0, 0.0)}, {1.0}, 1);
    DyadicLattice lat0 = dyadic_lattice(atom, 0, 0, LatticeMode::graph);
    REQUIRE(lat0.cubes.size() == 1);
    CHECK(lat0.cubes[0].mass == doctest::Approx(1.0));

    // uniform unit segment: 2^j cubes of mass 2^{-j} each
    DiscreteMeasure seg = gen_plane_sample(1, 2, 1.0, 1.0 / 4096);
    for (int level : {1, 3, 5}) {
        DyadicLattice lat = dyadic_lattice(seg, level, level, LatticeMode::graph);
        CHECK(static_cast<int>(lat.cubes.size()) == (1 << level));
        for (const DyadicCube& q : lat.cubes)
            CHECK(q.mass == doctest::Approx(std::pow(0.5, level)).epsilon(1e-12));
    }

    // 4-corner Cantor at ambient level 2g: 4^g nonempty cubes
    for (int g : {2, 3}) {
        DiscreteMeasure cantor = gen_cantor_four_corner(g);
        DyadicLattice lat = dyadic_lattice(cantor, 2 * g, 2 * g, LatticeMode::ambient);
        CHECK(lat.cubes.size() == static_cast<std::size_t>(std::pow(4.0, g)));
    }

    CHECK_THROWS_AS(dyadic_lattice(atom, 3, 1, LatticeMode::graph), std::invalid_argument);
}

TEST_CASE("children partition the parent") {
    DiscreteMeasure cantor = gen_cantor_four_corner(4);
    DyadicLattice lat = dyadic_lattice(cantor, 2, 3, LatticeMode::ambient);
    auto [b2, e2] = lat.level_ranges[0];
    auto [b3, e3] = lat.level_ranges[1];
    double parent_mass = 0.0, child_mass = 0.0;
    for (int c = b2; c < e2; ++c) parent_mass += lat.cubes[c].mass;
    for (int c = b3; c < e3; ++c) child_mass += lat.cubes[c].mass;
    CHECK(parent_mass == doctest::Approx(child_mass).epsilon(1e-14));
    // each child's index maps into its parent's cell
    for (int c = b3; c < e3; ++c) {
        const auto& child = lat.cubes[c];
        bool found = false;
        for (int pp = b2; pp < e2; ++pp) {
            const auto& par = lat.cubes[pp];
            bool inside = true;
            for (std::size_t a = 0; a < child.index.size(); ++a)
                if (par.index[a] != (child.index[a] >> 1)) inside = false;
            if (inside) found = true;
        }
        CHECK(found);
    }
}

TEST_CASE("b_q contains 3Q") {
    DiscreteMeasure cantor = gen_cantor_four_corner(4);
    DyadicLattice lat = dyadic_lattice(cantor, 3, 5, LatticeMode::ambient);
    for (const DyadicCube& q : lat.cubes)
        for (int idx : q.atoms3)
            CHECK(q.b_q.contains(cantor.point(idx)));
}

TEST_CASE("fit_plane_l2") {
    // exact plane data
    std::vector<Vec> pts;
    std::vector<double> w;
    for (int i = 0; i < 20; ++i) {
        pts.push_back(v2(0.1 * i, 0.05 * i + 2.0));
        w.push_back(1.0);
    }
    DiscreteMeasure mu = build_measure(pts, w, 1);
    AffinePlane plane = fit_plane_l2(mu, Ball(v2(1.0, 2.5), 10.0));
    for (const Vec& p : pts) CHECK(plane.distance(p) <= 1e-10);

    // two atoms: the line through them
    DiscreteMeasure two = build_measure({v2(0, 0), v2(1, 1)}, {1.0, 2.0}, 1);
    AffinePlane line = fit_plane_l2(two, Ball(v2(0.5, 0.5), 2.0));
    CHECK(line.distance(v2(0, 0)) <= 1e-12);
    CHECK(line.distance(v2(1, 1)) <= 1e-12);

    // degenerate: all atoms coincide
    DiscreteMeasure degen = build_measure({v2(0, 0), v2(0, 0)}, {1.0, 1.0}, 1);
    CHECK_THROWS_AS(fit_plane_l2(degen, Ball(v2(0, 0), 1.0)), std::invalid_argument);

    // square corners: residual sum of squares = 1 for any minimizing line
    DiscreteMeasure square =
        build_measure({v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1)}, {1, 1, 1, 1}, 1);
    AffinePlane sq = fit_plane_l2(square, Ball(v2(0.5, 0.5), 2.0));
    CHECK((sq.project(v2(0.5, 0.5)) - v2(0.5, 0.5)).norm() <= 1e-12);
    double rss = 0.0;
    for (int i = 0; i < 4; ++i) {
        Vec p = square.point(i);
        rss += sq.distance(p) * sq.distance(p);
    }
    // brute force over angles: rss(theta) = sum dist^2 is constant = 1
    double brute = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3600; ++k) {
        const double th = k * M_PI / 3600.0;
        Mat frame(2, 1);
        frame << std::cos(th), std::sin(th);
        AffinePlane cand(v2(0.5, 0.5), frame);
        double s = 0.0;
        for (int i = 0; i < 4; ++i) {
            Vec p = square.point(i);
            s += cand.distance(p) * cand.distance(p);
        }
        brute = std::min(brute, s);
    }
    CHECK(rss == doctest::Approx(brute).epsilon(1e-10));
    CHECK(rss == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("beta numbers") {
    // data on a plane: zero for all p
    std::vector<Vec> pts;
    std::vector<double> w;
    for (int i = 0; i < 64; ++i) {
        pts.push_back(v2(i / 64.0, 0.25 + 0.5 * (i / 64.0)));
        w.push_back(1.0 / 64);
    }
    DiscreteMeasure mu = build_measure(pts, w, 1);
    DyadicLattice lat = dyadic_lattice(mu, 0, 0, LatticeMode::graph);
    REQUIRE(!lat.cubes.empty());
    for (BetaP p : {BetaP::one, BetaP::two, BetaP::infinity})
        CHECK(beta_number(mu, lat.cubes[0], p).value <= 1e-10);

    // Cauchy-Schwarz ordering on random instances
    Rng rng(51);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Vec> rp;
        std::vector<double> rw;
        for (int i = 0; i < 40; ++i) {
            rp.push_back(v2(rng.uniform(), rng.uniform()));
            rw.push_back(0.2 + rng.uniform());
        }
        DiscreteMeasure rmu = build_measure(rp, rw, 1);
        DyadicLattice rlat = dyadic_lattice(rmu, 1, 2, LatticeMode::ambient);
        for (const DyadicCube& q : rlat.cubes) {
            const double b1 = beta_number(rmu, q, BetaP::one).value;
            const double b2 = beta_number(rmu, q, BetaP::two).value;
            CHECK(b1 <= b2 * std::sqrt(q.mass3 / q.side) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("beta_inf square corners against brute force") {
    DiscreteMeasure square =
        build_measure({v2(0, 0), v2(1, 0), v2(0, 1), v2(1, 1)}, {1, 1, 1, 1}, 1);
    // unit cube centered at (1/2, 1/2): lattice level 0 cell [0,1)^2 under
    // the ambient lattice contains all four corners... the 3Q window equals
    // the corner set, best line through the middle gives max distance 1/2
    DyadicLattice lat = dyadic_lattice(square, 0, 0, LatticeMode::ambient);
    bool checked = false;
    for (const DyadicCube& q : lat.cubes) {
        if (q.atoms3.size() == 4 && !checked) {
            BetaResult r = beta_number(square, q, BetaP::infinity);
            // brute force over a discretized line family
            double brute = std::numeric_limits<double>::infinity();
            for (int k = 0; k < 720; ++k) {
                const double th = k * M_PI / 720.0;
                for (int o = -40; o <= 40; ++o) {
                    Mat frame(2, 1);
                    frame << std::cos(th), std::sin(th);
                    Vec base = v2(0.5, 0.5);
                    Vec normal(2);
                    normal << -std::sin(th), std::cos(th);
                    AffinePlane cand(base + (o / 40.0) * normal, frame);
                    double m = 0.0;
                    for (int i = 0; i < 4; ++i)
                        m = std::max(m, cand.distance(square.point(i)));
                    brute = std::min(brute, m);
                }
            }
            CHECK(r.value == doctest::Approx(brute).epsilon(1e-3));
            CHECK(r.value == doctest::Approx(0.5).epsilon(1e-3));
            checked = true;
        }
    }
    CHECK(checked);
}

TEST_CASE("beta2 matches brute-force plane search on small instances") {
    Rng rng(61);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<Vec> pts;
        std::vector<double> w;
        for (int i = 0; i < 25; ++i) {
            pts.push_back(v2(rng.uniform(), rng.uniform()));
            w.push_back(0.5 + rng.uniform());
        }
        DiscreteMeasure mu = build_measure(pts, w, 1);
        DyadicLattice lat = dyadic_lattice(mu, 0, 0, LatticeMode::ambient);
        for (const DyadicCube& q : lat.cubes) {
            if (q.atoms3.size() < 3) continue;
            BetaResult r = beta_number(mu, q, BetaP::two);
            // dense scan over (angle, offset)
            double brute = std::numeric_limits<double>::infinity();
            for (int k = 0; k < 1800; ++k) {
                const double th = k * M_PI / 1800.0;
                Vec dir(2), nor(2);
                dir << std::cos(th), std::sin(th);
                nor << -std::sin(th), std::cos(th);
                // optimal offset given the direction: weighted mean of the
                // normal coordinates
                double num = 0.0, den = 0.0;
                for (int idx : q.atoms3) {
                    num += mu.weight(idx) * nor.dot(mu.point(idx));
                    den += mu.weight(idx);
                }
                const double off = num / den;
                double s = 0.0;
                for (int idx : q.atoms3) {
                    const double dist = std::abs(nor.dot(mu.point(idx)) - off);
                    s += mu.weight(idx) * dist * dist;
                }
                brute = std::min(brute, std::sqrt(s / std::pow(q.side, 3)));
            }
            CHECK(r.value <= brute * (1.0 + 1e-8) + 1e-12);
            CHECK(r.value >= brute * (1.0 - 1e-4) - 1e-12);
        }
    }
}

TEST_CASE("beta invariance under rigid motion") {
    Rng rng(71);
    std::vector<Vec> pts;
    std::vector<double> w;
    for (int i = 0; i < 50; ++i) {
        pts.push_back(v2(rng.uniform(), 0.3 + 0.1 * rng.uniform()));
        w.push_back(1.0 / 50);
    }
    DiscreteMeasure mu = build_measure(pts, w, 1);
    DyadicLattice lat = dyadic_lattice(mu, 0, 0, LatticeMode::ambient);
    REQUIRE(!lat.cubes.empty());
    const DyadicCube& q = lat.cubes[0];

    const double th = 0.37;
    Mat rot(2, 2);
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    Vec shift = v2(0.2, -0.1);
    std::vector<Vec> rpts;
    for (const Vec& p : pts) rpts.push_back(rot * p + shift);
    DiscreteMeasure rmu = build_measure(rpts, w, 1);

    // rotate the cube's window along with the data by rebuilding an
    // equivalent explicit ball query through beta_number_ball
    const double t = q.side;
    Vec c0 = q.center;
    Vec c1 = rot * c0 + shift;
    for (BetaP p : {BetaP::one, BetaP::two}) {
        const double a = beta_number_ball(mu, c0, t, p, true).value;
        const double b = beta_number_ball(rmu, c1, t, p, true).value;
        CHECK(a == doctest::Approx(b).epsilon(1e-6));
    }
}

TEST_CASE("level sums") {
    DiscreteMeasure seg = gen_plane_sample(1, 2, 1.0, 1.0 / 1024);
    DyadicLattice lat = dyadic_lattice(seg, 1, 4, LatticeMode::graph);
    std::vector<double> b2(lat.cubes.size());
    for (std::size_t c = 0; c < lat.cubes.size(); ++c)
        b2[c] = beta_number(seg, lat.cubes[c], BetaP::two).value;
    LevelSums s = level_sums(lat, b2);
    CHECK(s.total <= 1e-18);

    CHECK_THROWS_AS(level_sums(lat, std::vector<double>(3, 0.0)), std::invalid_argument);

    // additivity over disjoint branches: total = sum of per-level sums
    double acc = 0.0;
    for (double v : s.per_level) acc += v;
    CHECK(acc == doctest::Approx(s.total));
}

TEST_CASE("single-mode graph level sums scale like the gradient") {
    // total sum_Q beta2^2 mu(Q) ~ c ||A'||_2^2 with stable constant under
    // amplitude scaling (quadratic functional)
    std::vector<double> ratios;
    for (double amp : {0.01, 0.02, 0.04}) {
        std::vector<FourierMode> modes(1);
        modes[0].freq = Vec::Ones(1);
        modes[0].amp = Vec::Constant(1, amp);
        GraphFunction g = make_graph_function(modes, Vec::Zero(1), Vec::Ones(1), 1.0 / 2048, 0.0);
        DiscreteMeasure mu = sample_graph_measure(g);
        DyadicLattice lat = dyadic_lattice(mu, 1, 6, LatticeMode::graph);
        std::vector<double> b2(lat.cubes.size());
        for (std::size_t c = 0; c < lat.cubes.size(); ++c)
            b2[c] = beta_number(mu, lat.cubes[c], BetaP::two).value;
        LevelSums s = level_sums(lat, b2);
        const double analytic = 2.0 * M_PI * M_PI * amp * amp;  // ||A'||_2^2 on [0,1)
        ratios.push_back(s.total / analytic);
        MESSAGE("amp ", amp, " ratio ", s.total / analytic);
    }
    CHECK(ratios[0] == doctest::Approx(ratios[1]).epsilon(0.1));
    CHECK(ratios[1] == doctest::Approx(ratios[2]).epsilon(0.1));
}
