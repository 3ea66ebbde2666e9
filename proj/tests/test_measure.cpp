#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riesztool/generators.hpp"
#include "riesztool/measure.hpp"

#include <filesystem>

using namespace riesz;

namespace {

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

DiscreteMeasure segment_measure(int count, double length = 1.0) {
    // unit-density segment on the x-axis, midpoint sampling
    std::vector<Vec> pts;
    std::vector<double> w;
    const double h = length / count;
    for (int i = 0; i < count; ++i) {
        pts.push_back(v2((i + 0.5) * h, 0.0));
        w.push_back(h);
    }
    return build_measure(pts, w, 1);
}

}  // namespace

TEST_CASE("build_measure basics and errors") {
    DiscreteMeasure one = build_measure({v2(0, 0)}, {1.0}, 1);
    CHECK(one.total_mass() == doctest::Approx(1.0));
    CHECK(one.size() == 1);

    DiscreteMeasure empty = build_measure({}, {}, 1);
    CHECK(empty.total_mass() == 0.0);
    CHECK(empty.size() == 0);

    DiscreteMeasure cantor = gen_cantor_four_corner(3);
    CHECK(cantor.size() == 64);
    CHECK(cantor.total_mass() == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(build_measure({v2(0, 0)}, {1.0, 2.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_measure({v2(0, 0)}, {-1.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_measure({v2(0, 0)}, {1.0}, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_measure({v2(0, 0)}, {1.0}, 0), std::invalid_argument);
}

TEST_CASE("cantor generations are self-similar") {
    DiscreteMeasure g2 = gen_cantor_four_corner(2);
    DiscreteMeasure g3 = gen_cantor_four_corner(3);
    CHECK(g3.size() == 4 * g2.size());
    // every gen-3 point is a gen-2 point plus a corner offset at scale 4^{-2}
    std::vector<int> found;
    int hits = 0;
    for (std::size_t i = 0; i < g2.size(); ++i) {
        for (int c = 0; c < 4; ++c) {
            Vec p = g2.point(i);
            const double off = 0.75 * std::pow(0.25, 2);
            p[0] += (c & 1) ? off : 0.0;
            p[1] += (c & 2) ? off : 0.0;
            g3.atoms_in_ball(p, 1e-12, found);
            hits += found.size() == 1 ? 1 : 0;
        }
    }
    CHECK(hits == static_cast<int>(g3.size()));
}

TEST_CASE("index queries match linear scan") {
    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const int count = 200 + static_cast<int>(rng.below(800));
        std::vector<Vec> pts;
        std::vector<double> w;
        for (int i = 0; i < count; ++i) {
            pts.push_back(v2(rng.uniform(), rng.uniform()));
            w.push_back(rng.uniform() + 0.1);
        }
        DiscreteMeasure mu = build_measure(pts, w, 1);
        for (int q = 0; q < 20; ++q) {
            Vec c = v2(rng.uniform(), rng.uniform());
            const double r = 0.05 + 0.4 * rng.uniform();
            std::vector<int> got;
            mu.atoms_in_ball(c, r, got);
            std::sort(got.begin(), got.end());
            std::vector<int> want;
            for (int i = 0; i < count; ++i)
                if ((pts[i] - c).norm() <= r) want.push_back(i);
            CHECK(got == want);
        }
    }
}

TEST_CASE("density examples") {
    DiscreteMeasure atom = build_measure({v2(0.3, -0.2)}, {2.5}, 1);
    CHECK(density(atom, v2(0.3, -0.2), 0.5) == doctest::Approx(2.5 / 0.5));

    DiscreteMeasure seg = segment_measure(4096);
    // midpoint, r below half-length: mu(B) = 2r, density 2
    const double r = 0.25;
    CHECK(density(seg, v2(0.5, 0.0), r) ==
          doctest::Approx(2.0).epsilon((1.0 / 4096) / r + 1e-9));

    CHECK(density(seg, v2(10.0, 0.0), 0.5) == 0.0);
    CHECK_THROWS_AS(density(seg, v2(0, 0), 0.0), std::invalid_argument);
}

TEST_CASE("density scaling is exact") {
    DiscreteMeasure cantor = gen_cantor_four_corner(3);
    const double lambda = 3.5;
    DiscreteMeasure scaled = cantor.pushforward_affine(lambda, Vec::Zero(2));
    Vec x = cantor.point(17);
    const double r = 0.2;
    CHECK(density(scaled, lambda * x, lambda * r) ==
          doctest::Approx(density(cantor, x, r) / lambda).epsilon(1e-14));
}

TEST_CASE("poisson functionals") {
    // atom of mass w at distance a
    DiscreteMeasure atom = build_measure({v2(0.4, 0.0)}, {0.7}, 1);
    const double eps = 0.1;
    CHECK(poisson_p(atom, v2(0, 0), eps) ==
          doctest::Approx(0.7 * eps / std::pow(0.16 + eps * eps, 1.0)));
    CHECK(poisson_p(atom, v2(0.4, 0.0), eps) == doctest::Approx(0.7 / eps));
    // P2 at the atom itself: w eps^{-n}
    CHECK(poisson_p2(atom, v2(0.4, 0.0), eps) == doctest::Approx(0.7 / eps));

    CHECK_THROWS_AS(poisson_p(atom, v2(0, 0), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_p2(atom, v2(0, 0), -1.0), std::invalid_argument);

    // long unit-density segment through x: P -> pi (analytic oracle)
    DiscreteMeasure seg = segment_measure(200000, 20.0);
    const double p = poisson_p(seg, v2(10.0, 0.0), 0.05);
    CHECK(p == doctest::Approx(M_PI).epsilon(0.01));
}

TEST_CASE("poisson inequalities hold exactly") {
    DiscreteMeasure cantor = gen_cantor_four_corner(4);
    Rng rng(3);
    for (int t = 0; t < 30; ++t) {
        Vec x = v2(rng.uniform(), rng.uniform());
        const double eps = 0.01 + rng.uniform();
        const double p = poisson_p(cantor, x, eps);
        const double p2 = poisson_p2(cantor, x, eps);
        CHECK(p2 <= p * (1.0 + 1e-15));
        const double lower = std::pow(2.0, -1.0) * cantor.mass_in_ball(x, eps) / eps;
        CHECK(p >= lower * (1.0 - 1e-15));
    }
}

TEST_CASE("find_good_radius") {
    // plane sample: good radius immediately
    DiscreteMeasure seg = segment_measure(8192);
    const double r1 = find_good_radius(seg, v2(0.5, 0.0), 0.01, 4.0);
    CHECK(r1 == doctest::Approx(0.01));
    CHECK(poisson_p(seg, v2(0.5, 0.0), r1) <= 32.0 * density(seg, v2(0.5, 0.0), r1));

    // atom-only measure at x
    DiscreteMeasure atom = build_measure({v2(0, 0)}, {1.0}, 1);
    CHECK(find_good_radius(atom, v2(0, 0), 0.5, 8.0) == doctest::Approx(0.5));

    // adversarial growth violation: huge faraway mass makes P blow up at
    // every scanned dyadic radius while the local density stays flat
    std::vector<Vec> pts{v2(0, 0)};
    std::vector<double> w{1e-6};
    for (int i = 0; i < 400; ++i) {
        pts.push_back(v2(1.0 + 1e-4 * i, 0.0));
        w.push_back(50.0);
    }
    DiscreteMeasure bad = build_measure(pts, w, 1);
    CHECK_THROWS_AS(find_good_radius(bad, v2(0, 0), 1e-4, 1.0, 1.0), std::runtime_error);
}

TEST_CASE("csv round trip validates header") {
    DiscreteMeasure cantor = gen_cantor_four_corner(2);
    const std::string path = std::filesystem::temp_directory_path() / "rt_cloud.csv";
    save_measure_csv(cantor, path);
    DiscreteMeasure back = load_measure_csv(path, 1);
    REQUIRE(back.size() == cantor.size());
    CHECK(back.total_mass() == doctest::Approx(cantor.total_mass()).epsilon(1e-15));
    for (std::size_t i = 0; i < back.size(); ++i)
        CHECK((back.point(i) - cantor.point(i)).norm() == 0.0);
    std::filesystem::remove(path);
}
