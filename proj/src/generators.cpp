#include "riesztool/generators.hpp"

namespace riesz {

DiscreteMeasure gen_cantor_four_corner(int generation) {
    if (generation < 1) throw std::invalid_argument("gen_cantor_four_corner: generation >= 1");
    if (generation > 12) throw std::invalid_argument("gen_cantor_four_corner: generation > 12");

    std::vector<double> xs{0.0}, ys{0.0};
    double side = 1.0;
    for (int g = 0; g < generation; ++g) {
        const double off = 0.75 * side;
        std::vector<double> nx, ny;
        nx.reserve(xs.size() * 4);
        ny.reserve(ys.size() * 4);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            for (int c = 0; c < 4; ++c) {
                nx.push_back(xs[i] + ((c & 1) ? off : 0.0));
                ny.push_back(ys[i] + ((c & 2) ? off : 0.0));
            }
        }
        xs = std::move(nx);
        ys = std::move(ny);
        side *= 0.25;
    }
    const double w = std::pow(0.25, generation);
    std::vector<double> coords(xs.size() * 2);
    std::vector<double> weights(xs.size(), w);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        coords[2 * i] = xs[i];
        coords[2 * i + 1] = ys[i];
    }
    DiscreteMeasure mu = build_measure_flat(std::move(coords), std::move(weights), 2, 1);
    mu.set_truncation_floor(std::pow(0.25, generation));
    return mu;
}

DiscreteMeasure gen_plane_sample(int n, int d, double extent, double h) {
    if (!(h > 0.0) || !(extent > 0.0)) throw std::invalid_argument("gen_plane_sample: bad params");
    const int count = static_cast<int>(std::round(extent / h));
    std::vector<double> coords;
    std::vector<double> weights;
    const double cell = std::pow(h, n);
    std::vector<int> idx(n, 0);
    while (true) {
        for (int a = 0; a < n; ++a) coords.push_back((idx[a] + 0.5) * h);
        for (int a = n; a < d; ++a) coords.push_back(0.0);
        weights.push_back(cell);
        int axis = 0;
        while (axis < n && idx[axis] == count - 1) { idx[axis] = 0; ++axis; }
        if (axis == n) break;
        ++idx[axis];
    }
    DiscreteMeasure mu = build_measure_flat(std::move(coords), std::move(weights), d, n);
    mu.set_truncation_floor(2.0 * h);
    return mu;
}

DiscreteMeasure gen_perturbed_graph(const GraphFunction& a, double noise_amplitude,
                                    std::uint64_t seed, const GraphMeasureSpec& spec) {
    if (noise_amplitude < 0.0)
        throw std::invalid_argument("gen_perturbed_graph: noise must be >= 0");
    DiscreteMeasure base = sample_graph_measure(a, spec);
    if (noise_amplitude == 0.0) return base;

    Rng rng(seed);
    const int n = a.n(), d = a.d();
    std::vector<double> coords = base.coords();
    for (std::size_t i = 0; i < base.size(); ++i)
        for (int k = n; k < d; ++k)
            coords[i * d + k] += rng.uniform(-noise_amplitude, noise_amplitude);
    DiscreteMeasure mu = build_measure_flat(std::move(coords), base.weights(), d, n);
    mu.set_truncation_floor(base.truncation_floor());
    return mu;
}

}  // namespace riesz
