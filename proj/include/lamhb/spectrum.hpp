#pragma once

// Periodic signals as two-sided Fourier coefficients c_n, n >= 0, with
//   x(t) = c_0 + 2 Re sum_{n>=1} c_n exp(j n w t).
// A coefficient c_1 = 1 therefore reconstructs as 2 cos(w t).

#include <complex>
#include <memory>
#include <vector>

#include "lamhb/material.hpp"

namespace lamhb {

using cplx = std::complex<double>;

/// Real FFT of fixed length backed by FFTW. Plans are created once per
/// instance; an instance is not safe for concurrent use.
class RealFft {
public:
    explicit RealFft(int n);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    [[nodiscard]] int size() const { return n_; }

    /// c_k = (1/n) sum_j x_j exp(-2 pi i j k / n), k = 0..n/2
    [[nodiscard]] std::vector<cplx> forward(const std::vector<double>& x);

    /// Samples x_j at t_j = j T / n from c_0..c_K, K < n/2.
    [[nodiscard]] std::vector<double> inverse(const std::vector<cplx>& c);

private:
    struct Impl;
    int n_;
    std::unique_ptr<Impl> impl_;
};

/// True when n is a power of two and n >= 4 (2m + 1).
bool valid_sample_count(int n, int m);

struct ReluctivityHarmonics {
    int k_max = 0;                          // 2m
    std::vector<std::vector<cplx>> nu;      // [element][k], k = 0..k_max
    std::vector<double> b_max;              // max over the grid of the scaled |B|
};

/// For each spectrum (orders 0..m) reconstruct B(t) on n_samples points,
/// evaluate nu(t) = H(|s B|) / |s B| with s = flux_scale and return its
/// coefficients up to order 2m.
ReluctivityHarmonics reluctivity_harmonics(const std::vector<std::vector<cplx>>& b_spectra,
                                           const BHCurve& curve, int m, int n_samples,
                                           double flux_scale = 1.0);

/// Value of the series at time t.
double evaluate_series(const std::vector<cplx>& c, double omega, double t);

}  // namespace lamhb
