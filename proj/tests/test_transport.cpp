#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riesztool/generators.hpp"
#include "riesztool/transport.hpp"

#include "oracles.hpp"

using namespace riesz;

namespace {

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

using riesz::oracles::bl_oracle;

double flow_value(const std::vector<Vec>& pts, const std::vector<double>& supply,
                  const std::vector<double>& bound) {
    std::vector<double> flat;
    for (const Vec& p : pts)
        for (int a = 0; a < p.size(); ++a) flat.push_back(p[a]);
    return lipschitz_dual_flow(static_cast<int>(pts[0].size()), flat, supply, bound);
}

}  // namespace

TEST_CASE("bl_distance closed forms") {
    Ball b(v2(0, 0), 1.0);

    DiscreteMeasure sigma = build_measure({v2(0.1, 0.0), v2(-0.2, 0.3)}, {0.5, 0.25}, 1);
    CHECK(bl_distance(sigma, sigma, b) == doctest::Approx(0.0).epsilon(1e-15));

    // unit atoms deep inside: tent-function optimum |a-b|
    Vec a = v2(-0.2, 0.0), c = v2(0.25, 0.1);
    DiscreteMeasure ma = build_measure({a}, {1.0}, 1);
    DiscreteMeasure mc = build_measure({c}, {1.0}, 1);
    CHECK(bl_distance(ma, mc, b) == doctest::Approx((a - c).norm()).epsilon(1e-12));

    // 2 delta_a vs delta_a: distance-to-boundary cone
    DiscreteMeasure m2a = build_measure({a}, {2.0}, 1);
    CHECK(bl_distance(m2a, ma, b) == doctest::Approx(1.0 - a.norm()).epsilon(1e-12));
}

TEST_CASE("flow solver agrees with the exhaustive-LP oracle") {
    Rng rng(101);
    for (int trial = 0; trial < 40; ++trial) {
        const int m = 2 + static_cast<int>(rng.below(13));
        std::vector<Vec> pts;
        std::vector<double> supply, bound;
        for (int i = 0; i < m; ++i) {
            Vec p = v2(rng.uniform(-1, 1), rng.uniform(-1, 1));
            pts.push_back(p);
            supply.push_back(rng.uniform(-1, 1));
            bound.push_back(std::max(0.0, 1.5 - p.norm()));
        }
        const double want = bl_oracle(pts, supply, bound);
        const double got = flow_value(pts, supply, bound);
        CHECK(got == doctest::Approx(want).epsilon(1e-8));
    }
}

TEST_CASE("metric-like properties on random triples") {
    Rng rng(103);
    Ball b(v2(0, 0), 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        auto random_measure = [&](int count) {
            std::vector<Vec> pts;
            std::vector<double> w;
            for (int i = 0; i < count; ++i) {
                pts.push_back(v2(rng.uniform(-1, 1), rng.uniform(-1, 1)));
                w.push_back(rng.uniform() + 0.05);
            }
            return build_measure(pts, w, 1);
        };
        DiscreteMeasure x = random_measure(4 + static_cast<int>(rng.below(8)));
        DiscreteMeasure y = random_measure(4 + static_cast<int>(rng.below(8)));
        DiscreteMeasure z = random_measure(4 + static_cast<int>(rng.below(8)));

        const double dxy = bl_distance(x, y, b);
        const double dyx = bl_distance(y, x, b);
        const double dxz = bl_distance(x, z, b);
        const double dzy = bl_distance(z, y, b);
        CHECK(dxy >= 0.0);
        CHECK(dxy == doctest::Approx(dyx).epsilon(1e-10));
        CHECK(dxy <= dxz + dzy + 1e-10);
    }
}

TEST_CASE("mass scaling is exact") {
    Rng rng(107);
    Ball b(v2(0, 0), 1.5);
    std::vector<Vec> pa, pb;
    std::vector<double> wa, wb;
    for (int i = 0; i < 12; ++i) {
        pa.push_back(v2(rng.uniform(-1, 1), rng.uniform(-1, 1)));
        wa.push_back(rng.uniform() + 0.1);
        pb.push_back(v2(rng.uniform(-1, 1), rng.uniform(-1, 1)));
        wb.push_back(rng.uniform() + 0.1);
    }
    DiscreteMeasure sa = build_measure(pa, wa, 1);
    DiscreteMeasure sb = build_measure(pb, wb, 1);
    const double base = bl_distance(sa, sb, b);

    const double lambda = 2.75;
    std::vector<double> wa2 = wa, wb2 = wb;
    for (double& w : wa2) w *= lambda;
    for (double& w : wb2) w *= lambda;
    const double scaled =
        bl_distance(build_measure(pa, wa2, 1), build_measure(pb, wb2, 1), b);
    CHECK(scaled == doctest::Approx(lambda * base).epsilon(1e-12));
}

TEST_CASE("atoms outside or on the ball boundary cannot contribute") {
    Ball b(v2(0, 0), 1.0);
    DiscreteMeasure inside = build_measure({v2(0.5, 0)}, {1.0}, 1);
    DiscreteMeasure outside = build_measure({v2(2.0, 0), v2(0.5, 0)}, {5.0, 1.0}, 1);
    CHECK(bl_distance(inside, outside, b) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("node cap aggregation stays within the reported bias") {
    Rng rng(113);
    Ball b(v2(0, 0), 1.0);
    std::vector<Vec> pa, pb;
    std::vector<double> wa, wb;
    for (int i = 0; i < 300; ++i) {
        pa.push_back(v2(rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)));
        wa.push_back(rng.uniform());
        pb.push_back(v2(rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)));
        wb.push_back(rng.uniform());
    }
    DiscreteMeasure sa = build_measure(pa, wa, 1);
    DiscreteMeasure sb = build_measure(pb, wb, 1);
    BlDiagnostics d1, d2;
    const double exact = bl_distance(sa, sb, b, &d1, 10000);
    const double capped = bl_distance(sa, sb, b, &d2, 200);
    CHECK(d1.aggregation_bias == 0.0);
    CHECK(d2.aggregation_bias > 0.0);
    CHECK(std::abs(exact - capped) <= d2.aggregation_bias);
}
