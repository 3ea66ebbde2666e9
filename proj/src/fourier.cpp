#include "riesztool/fourier.hpp"

#include "riesztool/bumps.hpp"

#include <algorithm>
#include <numeric>

namespace riesz {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr double kGlNode[16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGlWeight[16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <typename F>
double gl_integrate(F&& f, double a, double b, int panels) {
    double sum = 0.0;
    const double hp = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * hp;
        for (int q = 0; q < 16; ++q) sum += kGlWeight[q] * f(mid + 0.5 * hp * kGlNode[q]);
        // scale applied after loop
    }
    return sum * 0.5 * hp;
}

double radial_kernel(int n, double r, double z) {
    // angular integral of e^{-2 pi i xi . s} over the sphere of radius r,
    // normalized so that eta_hat(z) = int eta(r) kernel(r,z) r^{n-1} dr
    const double arg = 2.0 * M_PI * r * z;
    switch (n) {
        case 1: return 2.0 * std::cos(arg);
        case 2: return 2.0 * M_PI * std::cyl_bessel_j(0, arg);
        case 3:
            return arg < 1e-8 ? 4.0 * M_PI * (1.0 - arg * arg / 6.0)
                              : 4.0 * M_PI * std::sin(arg) / arg;
        default: throw std::invalid_argument("radial_kernel: n in {1,2,3} supported");
    }
}

}  // namespace

EtaHat::EtaHat(int n) : n_(n) {
    if (n < 1 || n > 3) throw std::invalid_argument("EtaHat: n in {1,2,3} supported");
    const double rin = kBandInner, rout = kBandOuter;
    auto eta_r = [n](double r) { return phi_band(r) / std::pow(r, n + 1); };

    eta0_ = gl_integrate([&](double r) { return eta_r(r) * std::pow(r, n - 1); }, rin, rout, 64) *
            (n == 1 ? 2.0 : (n == 2 ? 2.0 * M_PI : 4.0 * M_PI));

    // int |s|^2 eta ds = surface(S^{n-1}) * int phi(r) dr
    const double surface = n * unit_ball_volume(n);
    m2_full_ = surface * gl_integrate([&](double r) { return phi_band(r); }, rin, rout, 64);

    // directional even moments m_{2k} = surface * a_{n,k} * int phi r^{2k-2} dr
    double ank = 1.0;
    for (int k = 1; k <= 14; ++k) {
        ank *= (2.0 * k - 1.0) / (n + 2.0 * k - 2.0);
        const double radial =
            gl_integrate([&](double r) { return phi_band(r) * std::pow(r, 2 * k - 2); }, rin,
                         rout, 64);
        series_.push_back(surface * ank * radial);
    }

    // dense tables for z >= 1/4 (6-point Lagrange interpolation, ~1e-12 on
    // the fine tier; the far tier rides the decayed amplitude)
    const int near_count = static_cast<int>((near_end_ - near_z0_) / near_dz_) + 8;
    near_table_.resize(near_count);
    parallel_for(near_table_.size(), [&](std::size_t i) {
        near_table_[i] = quadrature(near_z0_ + (static_cast<int>(i) - 3) * near_dz_);
    });
    const int far_count = static_cast<int>((far_end_ - near_end_) / far_dz_) + 8;
    far_table_.resize(far_count);
    parallel_for(far_table_.size(), [&](std::size_t i) {
        far_table_[i] = quadrature(near_end_ + (static_cast<int>(i) - 3) * far_dz_);
    });
}

double EtaHat::quadrature(double z) const {
    const double rin = kBandInner, rout = kBandOuter;
    // ~4 radians of phase per 16-point panel keeps the error near rounding
    const int panels = std::max(6, static_cast<int>(0.12 * std::abs(z)) + 1);
    return gl_integrate(
        [&](double r) {
            return phi_band(r) / std::pow(r, n_ + 1) * radial_kernel(n_, r, z) *
                   std::pow(r, n_ - 1);
        },
        rin, rout, panels);
}

double EtaHat::operator()(double z) const {
    z = std::abs(z);
    if (z < near_z0_) {
        // series for eta_hat(0) - eta_hat(z), then subtract
        double diff = 0.0, term;
        const double w = 2.0 * M_PI * z;
        double wpow = w * w;
        double fact = 2.0;
        for (std::size_t k = 0; k < series_.size(); ++k) {
            term = wpow / fact * series_[k];
            diff += (k % 2 == 0) ? term : -term;
            wpow *= w * w;
            fact *= (2.0 * k + 3.0) * (2.0 * k + 4.0);
        }
        return eta0_ - diff;
    }
    if (z < near_end_) return interpolate(near_table_, near_z0_, near_dz_, z);
    if (z < far_end_) return interpolate(far_table_, near_end_, far_dz_, z);
    return quadrature(z);
}

double EtaHat::interpolate(const std::vector<double>& table, double z0, double dz,
                           double z) const {
    const double pos = (z - z0) / dz + 3.0;
    const int i0 = static_cast<int>(std::floor(pos));
    if (i0 + 3 >= static_cast<int>(table.size()) || i0 < 3) return quadrature(z);
    // 6-point Lagrange on the uniform table
    const int base = i0 - 2;
    const double t = pos - base;
    double result = 0.0;
    for (int m = 0; m < 6; ++m) {
        double lm = 1.0;
        for (int q = 0; q < 6; ++q)
            if (q != m) lm *= (t - q) / (m - q);
        result += lm * table[base + m];
    }
    return result;
}

double EtaHat::f_delta(double delta, double xi_norm) const {
    if (!(delta > 0.0)) throw std::invalid_argument("f_delta: delta must be > 0");
    const double z = delta * std::abs(xi_norm);
    if (z == 0.0) return 0.0;
    if (z < near_z0_) {
        double diff = 0.0, term;
        const double w = 2.0 * M_PI * z;
        double wpow = w * w;
        double fact = 2.0;
        for (std::size_t k = 0; k < series_.size(); ++k) {
            term = wpow / fact * series_[k];
            diff += (k % 2 == 0) ? term : -term;
            wpow *= w * w;
            fact *= (2.0 * k + 3.0) * (2.0 * k + 4.0);
        }
        return diff / delta;
    }
    return (eta0_ - (*this)(z)) / delta;
}

// ---------------------------------------------------------------------------
// FFT and spectral profile

void fft_pow2(std::vector<std::complex<double>>& data) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft_pow2: size not a power of 2");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t q = 0; q < len / 2; ++q) {
                const auto u = data[i + q];
                const auto v = data[i + q + len / 2] * w;
                data[i + q] = u + v;
                data[i + q + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

double SpectralProfile::frequency(std::size_t flat, int axis) const {
    std::size_t rem = flat;
    for (int a = n - 1; a > axis; --a) rem /= dims[a];
    const long long m = static_cast<long long>(rem % dims[axis]);
    const long long half = dims[axis] / 2;
    return dxi * static_cast<double>(m >= half ? m - dims[axis] : m);
}

double SpectralProfile::plancherel_l2_sq() const {
    double s = std::accumulate(power.begin(), power.end(), 0.0);
    return s * std::pow(dxi, n);
}

SpectralProfile spectral_profile(const GraphFunction& a, double dxi_target) {
    const int n = a.n();
    const int codim = a.d() - n;
    const double h = a.spacing();

    std::size_t pad = 1;
    while (pad * h * dxi_target < 1.0 ||
           pad < static_cast<std::size_t>(*std::max_element(a.grid_dims().begin(),
                                                            a.grid_dims().end())))
        pad <<= 1;

    SpectralProfile prof;
    prof.n = n;
    prof.dxi = 1.0 / (static_cast<double>(pad) * h);
    prof.dims.assign(n, static_cast<int>(pad));
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= pad;
    prof.power.assign(total, 0.0);
    prof.max_abs_freq = std::sqrt(static_cast<double>(n)) * 0.5 / h;

    const double cell = std::pow(h, n);
    prof.a_l2_sq = a.value_l2_sq();

    std::vector<std::complex<double>> grid(total);
    std::vector<std::complex<double>> line(pad);
    for (int comp = 0; comp < codim; ++comp) {
        std::fill(grid.begin(), grid.end(), std::complex<double>(0.0));
        // scatter the graph grid into the padded lattice
        const auto& dims = a.grid_dims();
        const std::size_t nodes = a.grid_size();
        for (std::size_t node = 0; node < nodes; ++node) {
            std::size_t rem = node, flat = 0;
            for (int axis = 0; axis < n; ++axis) {
                std::size_t stride = 1;
                for (int b = axis + 1; b < n; ++b) stride *= dims[b];
                const std::size_t idx = rem / stride;
                rem %= stride;
                flat = flat * pad + idx;
            }
            grid[flat] = a.value_at_node(node)[comp];
        }
        // FFT along each axis
        for (int axis = n - 1; axis >= 0; --axis) {
            std::size_t stride = 1;
            for (int b = axis + 1; b < n; ++b) stride *= pad;
            const std::size_t block = stride * pad;
            for (std::size_t start = 0; start < total; ++start) {
                // iterate each 1-d line exactly once
                if ((start / block) * block + (start % stride) != start) continue;
                for (std::size_t q = 0; q < pad; ++q) line[q] = grid[start + q * stride];
                fft_pow2(line);
                for (std::size_t q = 0; q < pad; ++q) grid[start + q * stride] = line[q];
            }
        }
        for (std::size_t i = 0; i < total; ++i) {
            const double mag = std::abs(grid[i]) * cell;
            prof.power[i] += mag * mag;
        }
    }
    return prof;
}

double frequency_side(const SpectralProfile& a_hat, double delta, double eps) {
    if (!(delta <= eps)) throw std::invalid_argument("frequency_side: need delta <= eps");
    if (1.0 / delta > a_hat.max_abs_freq)
        throw std::invalid_argument("frequency_side: frequency grid does not reach 1/delta");
    const double inv_eps = 1.0 / eps, inv_delta = 1.0 / delta;
    double low = 0.0, mid = 0.0, high = 0.0;
    const std::size_t total = a_hat.power.size();
    for (std::size_t i = 0; i < total; ++i) {
        const double p = a_hat.power[i];
        if (p == 0.0) continue;
        double r2 = 0.0;
        for (int axis = 0; axis < a_hat.n; ++axis) {
            const double f = a_hat.frequency(i, axis);
            r2 += f * f;
        }
        const double r = std::sqrt(r2);
        if (r <= inv_eps) low += p * r2 * r2;
        else if (r <= inv_delta) mid += p * r2;
        else high += p;
    }
    const double cell = std::pow(a_hat.dxi, a_hat.n);
    return delta * eps * low * cell + delta / eps * mid * cell + high * cell / (delta * eps);
}

double exact_band_product(const SpectralProfile& a_hat, double delta, double eps,
                          const EtaHat& eta) {
    if (!(delta <= eps)) throw std::invalid_argument("exact_band_product: need delta <= eps");
    if (1.0 / delta > a_hat.max_abs_freq)
        throw std::invalid_argument("exact_band_product: frequency grid does not reach 1/delta");
    double sum = 0.0;
    const std::size_t total = a_hat.power.size();
    for (std::size_t i = 0; i < total; ++i) {
        const double p = a_hat.power[i];
        if (p == 0.0) continue;
        double r2 = 0.0;
        for (int axis = 0; axis < a_hat.n; ++axis) {
            const double f = a_hat.frequency(i, axis);
            r2 += f * f;
        }
        const double r = std::sqrt(r2);
        sum += p * eta.f_delta(delta, r) * eta.f_delta(eps, r);
    }
    return sum * std::pow(a_hat.dxi, a_hat.n);
}

// ---------------------------------------------------------------------------
// direct-space triple integral

namespace {

// u_j(x) = int phi_j(s) (A(x) - A(x+s)) / |s|^2 ds for n = 1
Vec band_average_1d(const GraphFunction& a, double x, int j, int panels) {
    const double scale = std::ldexp(1.0, j);
    const double rin = kBandInner / scale, rout = kBandOuter / scale;
    const int codim = a.d() - 1;
    Vec out = Vec::Zero(codim);
    Vec x_vec(1), y_vec(1);
    x_vec[0] = x;
    const Vec ax = a.eval(x_vec);
    for (int side = -1; side <= 1; side += 2) {
        const double hp = (rout - rin) / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = rin + (p + 0.5) * hp;
            for (int q = 0; q < 16; ++q) {
                const double s = mid + 0.5 * hp * kGlNode[q];
                y_vec[0] = x + side * s;
                const Vec diff = ax - a.eval(y_vec);
                out += (kGlWeight[q] * 0.5 * hp * phi_band(scale * s) / (s * s)) * diff;
            }
        }
    }
    return out;
}

TripleResult triple_quadrature_1d(const GraphFunction& a, int j, int k, double hx, int panels) {
    const double outer_margin = kBandOuter / std::ldexp(1.0, std::min(j, k));
    const double x0 = a.box_lo()[0] - outer_margin;
    const double x1 = a.box_hi()[0] + outer_margin;
    const long long count = static_cast<long long>(std::ceil((x1 - x0) / hx));

    // Simpson over the x grid of u_j(x) . u_k(x)
    double sum = 0.0;
    std::vector<double> vals(count + 1);
    parallel_for(static_cast<std::size_t>(count + 1), [&](std::size_t idx) {
        const double x = x0 + static_cast<double>(idx) * hx;
        const Vec uj = band_average_1d(a, x, j, panels);
        const Vec uk = (j == k) ? uj : band_average_1d(a, x, k, panels);
        vals[idx] = uj.dot(uk);
    });
    for (long long i = 0; i <= count; ++i) {
        double w = (i == 0 || i == count) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += w * vals[i];
    }
    TripleResult res;
    res.value = sum * hx / 3.0;
    return res;
}

TripleResult triple_montecarlo(const GraphFunction& a, int j, int k, std::uint64_t seed) {
    const int n = a.n();
    const double sj = std::ldexp(1.0, j), sk = std::ldexp(1.0, k);
    const double rinj = kBandInner / sj, routj = kBandOuter / sj;
    const double rink = kBandInner / sk, routk = kBandOuter / sk;
    const double margin = std::max(routj, routk);

    Vec lo = a.box_lo(), hi = a.box_hi();
    double vx = 1.0;
    for (int i = 0; i < n; ++i) {
        lo[i] -= margin;
        hi[i] += margin;
        vx *= hi[i] - lo[i];
    }
    const double cn = unit_ball_volume(n);
    const double vj = cn * (std::pow(routj, n) - std::pow(rinj, n));
    const double vk = cn * (std::pow(routk, n) - std::pow(rink, n));

    Rng rng(seed);
    auto sample_annulus = [&](double rin, double rout, Vec& out) {
        // direction via normalized gaussian (Box-Muller), radius ~ r^{n-1}
        double norm2 = 0.0;
        for (int i = 0; i < n; ++i) {
            double u1 = std::max(rng.uniform(), 1e-300), u2 = rng.uniform();
            out[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
            norm2 += out[i] * out[i];
        }
        const double u = rng.uniform();
        const double r = std::pow(u * (std::pow(rout, n) - std::pow(rin, n)) + std::pow(rin, n),
                                  1.0 / n);
        out *= r / std::sqrt(std::max(norm2, 1e-300));
    };

    const long samples = 200000;
    double mean = 0.0, m2 = 0.0;
    Vec x(n), s(n), t(n), y(n), z(n);
    for (long it = 0; it < samples; ++it) {
        for (int i = 0; i < n; ++i) x[i] = rng.uniform(lo[i], hi[i]);
        sample_annulus(rinj, routj, s);
        sample_annulus(rink, routk, t);
        y = x + s;
        z = x + t;
        const Vec ax = a.eval(x);
        const Vec hj = (ax - a.eval(y)) * (phi_band(sj * s.norm()) / std::pow(s.norm(), n + 1));
        const Vec hk = (ax - a.eval(z)) * (phi_band(sk * t.norm()) / std::pow(t.norm(), n + 1));
        const double val = hj.dot(hk);
        const double delta = val - mean;
        mean += delta / static_cast<double>(it + 1);
        m2 += delta * (val - mean);
    }
    TripleResult res;
    const double scale = vx * vj * vk;
    res.value = mean * scale;
    res.error = scale * std::sqrt(m2 / (static_cast<double>(samples) - 1.0) /
                                  static_cast<double>(samples));
    return res;
}

}  // namespace

TripleResult triple_integral(const GraphFunction& a, int j, int k, TripleMethod method,
                             std::uint64_t seed) {
    if (a.n() == 1 && method == TripleMethod::quadrature) {
        const double fine = kBandInner / std::ldexp(1.0, std::max(j, k));
        const double hx = fine / 12.0;
        if (a.spacing() > fine && !a.analytic())
            throw std::invalid_argument("triple_integral: grid too coarse for the inner annulus");
        TripleResult fine_res = triple_quadrature_1d(a, j, k, hx, 12);
        TripleResult coarse_res = triple_quadrature_1d(a, j, k, 2.0 * hx, 6);
        fine_res.error = std::abs(fine_res.value - coarse_res.value);
        return fine_res;
    }
    if (method == TripleMethod::quadrature)
        throw std::invalid_argument("triple_integral: full quadrature requires n = 1");
    return triple_montecarlo(a, j, k, seed);
}

ComparabilityReport comparability_report(const GraphFunction& a,
                                         const std::vector<BandPair>& pairs) {
    ComparabilityReport rep;
    EtaHat eta(a.n());
    SpectralProfile prof = spectral_profile(a);
    bool first = true;
    for (const BandPair& p : pairs) {
        const double delta = std::ldexp(1.0, -p.j), eps = std::ldexp(1.0, -p.k);
        if (!(delta <= eps))
            throw std::invalid_argument("comparability_report: pair violates delta <= eps");
        ComparabilityRow row;
        row.pair = p;
        row.lhs = exact_band_product(prof, delta, eps, eta);
        row.rhs = frequency_side(prof, delta, eps);
        if (row.rhs <= 0.0 || row.lhs <= 0.0) {
            row.degenerate = true;
        } else {
            row.ratio = row.lhs / row.rhs;
            if (first || row.ratio < rep.min_ratio) rep.min_ratio = row.ratio;
            if (first || row.ratio > rep.max_ratio) rep.max_ratio = row.ratio;
            first = false;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace riesz
