#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace riesz {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Volume of the unit n-ball, pi^{n/2} / Gamma(n/2 + 1).
inline double unit_ball_volume(int n) {
    return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// q^{-twice/2} with the small half-integer exponents of the Riesz kernels
/// special-cased (the generic pow dominates the kernel loops otherwise).
inline double inv_pow_half(double q, int twice) {
    switch (twice) {
        case 1: return 1.0 / std::sqrt(q);
        case 2: return 1.0 / q;
        case 3: return 1.0 / (q * std::sqrt(q));
        case 4: return 1.0 / (q * q);
        case 5: return 1.0 / (q * q * std::sqrt(q));
        case 6: return 1.0 / (q * q * q);
        default: return std::pow(q, -0.5 * twice);
    }
}

/// Global configuration scalars shared by the multiscale machinery.
/// The hierarchy 0 < eps << alpha << delta0 < 1 is enforced as
/// eps <= alpha^3 and alpha <= delta0^2.
struct Constants {
    double M1 = 10.0;       // growth bound mu(B(x,r)) <= M1 r^n
    double M2 = 10.0;       // L2 operator norm budget
    double delta0 = 0.25;   // density threshold in the stopping conditions
    double delta1 = 0.05;   // mass defect allowance
    double delta2 = 1e-3;   // principal-value oscillation budget
    double eps = 1e-4;      // beta threshold in the stopping conditions
    double alpha = 0.05;    // angle threshold in the stopping conditions
    double eps0 = 0.1;      // Lipschitz-slope smallness threshold
    int N0 = 8;             // band-separation parameter

    void validate() const {
        if (!(delta0 > 0.0 && delta0 < 1.0))
            throw std::invalid_argument("Constants: need 0 < delta0 < 1");
        if (!(alpha > 0.0 && alpha <= delta0 * delta0))
            throw std::invalid_argument("Constants: need 0 < alpha <= delta0^2");
        if (!(eps > 0.0 && eps <= alpha * alpha * alpha))
            throw std::invalid_argument("Constants: need 0 < eps <= alpha^3");
    }
};

/// Deterministic RNG helpers. std::uniform_real_distribution is
/// implementation-defined, so bits are mapped to doubles by hand to keep
/// seeded outputs byte-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        // xorshift* generator
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    /// Uniform in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [a,b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Uniform integer in [0, m).
    std::uint64_t below(std::uint64_t m) { return next_u64() % m; }

private:
    std::uint64_t state_;
};

/// Runs fn(i) for i in [0,count) across hardware threads. Falls back to the
/// calling thread for small workloads.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         std::size_t grain = 64) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw <= 1 || count <= grain) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    unsigned nthreads = std::min<std::size_t>(hw, (count + grain - 1) / grain);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    std::size_t chunk = (count + nthreads - 1) / nthreads;
    for (unsigned t = 0; t < nthreads; ++t) {
        std::size_t lo = t * chunk, hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

/// Prints a double with 17 significant digits (round-trip exact).
std::string format_g17(double x);

}  // namespace riesz
