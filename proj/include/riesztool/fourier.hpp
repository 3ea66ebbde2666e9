#pragma once

#include "riesztool/graphfn.hpp"

#include <complex>

namespace riesz {

/// Cached radial Fourier transform of eta(x) = phi_band(|x|) / |x|^{n+1} on
/// R^n, the profile behind the dyadic band kernels. f_delta is evaluated
/// from a power series below z = 1/4 (the direct difference cancels
/// catastrophically there) and from a dense interpolation table above.
class EtaHat {
public:
    explicit EtaHat(int n);

    int n() const { return n_; }
    double at_zero() const { return eta0_; }
    /// \hat eta at radius z = |xi|.
    double operator()(double z) const;
    /// f_delta(xi) = (1/delta) (\hat eta(0) - \hat eta(delta |xi|)); real,
    /// nonnegative, zero only at xi = 0.
    double f_delta(double delta, double xi_norm) const;
    /// int |s|^2 eta(s) ds, the curvature of f_delta at the origin:
    /// f_delta(xi) ~ delta |xi|^2 2 pi^2 m2 / n as xi -> 0.
    double second_moment() const { return m2_full_; }

private:
    double quadrature(double z) const;

    int n_ = 1;
    double eta0_ = 0.0;
    double m2_full_ = 0.0;
    std::vector<double> series_;  // directional even moments for the small-z series
    // two-tier interpolation table: fine step where the transform is large,
    // coarser step out to the Nyquist range of the spectral profiles
    double near_z0_ = 0.25, near_dz_ = 1.0 / 64.0, near_end_ = 64.0;
    double far_dz_ = 1.0 / 16.0, far_end_ = 2304.0;
    std::vector<double> near_table_, far_table_;

    double interpolate(const std::vector<double>& table, double z0, double dz, double z) const;
};

/// |\hat A|^2 sampled on a frequency lattice (per-axis spacing dxi), built by
/// zero-padded FFT of the graph grid. The lattice covers [-Nyq, Nyq)^n.
struct SpectralProfile {
    int n = 0;
    double dxi = 0.0;
    std::vector<int> dims;        // padded lattice dims per axis
    std::vector<double> power;    // |\hat A(xi)|^2, flat, axis-major
    double a_l2_sq = 0.0;         // grid-quadrature ||A||_2^2
    double max_abs_freq = 0.0;

    double frequency(std::size_t flat, int axis) const;
    /// sum of power * dxi^n  (Plancherel estimate of ||A||_2^2)
    double plancherel_l2_sq() const;
};

/// Builds the spectral profile with the requested frequency resolution; the
/// grid is zero-padded until 1/(P h) <= dxi_target.
SpectralProfile spectral_profile(const GraphFunction& a, double dxi_target = 1.0 / 64.0);

/// Right-hand side of the band comparability estimate:
/// delta e int_{|xi|<=1/e} P |xi|^4 + (delta/e) int_{1/e<|xi|<=1/delta} P |xi|^2
/// + 1/(delta e) int_{|xi|>1/delta} P, with band-edge ties to the lower band.
double frequency_side(const SpectralProfile& a_hat, double delta, double eps);

/// Plancherel form of the triple band integral:
/// int |\hat A|^2 f_delta f_eps dxi. Nonnegative by construction.
double exact_band_product(const SpectralProfile& a_hat, double delta, double eps,
                          const EtaHat& eta);

enum class TripleMethod { quadrature, montecarlo };

struct TripleResult {
    double value = 0.0;
    double error = 0.0;  // refinement difference (quadrature) or stderr (MC)
};

/// Direct-space triple integral
/// iiint H_j(x,y) H_k(x,z) dx dy dz with
/// H_j(x,y) = phi_j(x-y) (A(x)-A(y)) / |x-y|^{n+1}, exploiting the
/// factorization over y and z. Full quadrature requires n = 1; higher n uses
/// Monte Carlo with a reported standard error.
TripleResult triple_integral(const GraphFunction& a, int j, int k,
                             TripleMethod method = TripleMethod::quadrature,
                             std::uint64_t seed = 1);

struct BandPair {
    int j = 0, k = 0;  // delta = 2^{-j} <= eps = 2^{-k}, i.e. j >= k
};

struct ComparabilityRow {
    BandPair pair;
    double lhs = 0.0;   // exact_band_product
    double rhs = 0.0;   // frequency_side
    double ratio = 0.0;
    bool degenerate = false;
};

struct ComparabilityReport {
    std::vector<ComparabilityRow> rows;
    double min_ratio = 0.0, max_ratio = 0.0;
};

ComparabilityReport comparability_report(const GraphFunction& a,
                                         const std::vector<BandPair>& pairs);

/// In-place radix-2 FFT (forward, unnormalized). Size must be a power of 2.
void fft_pow2(std::vector<std::complex<double>>& data);

}  // namespace riesz
