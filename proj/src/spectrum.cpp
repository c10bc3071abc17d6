#include "lamhb/spectrum.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace lamhb {

namespace {
// FFTW planning is not thread safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct RealFft::Impl {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
};

RealFft::RealFft(int n) : n_(n), impl_(std::make_unique<Impl>()) {
    if (n < 2) throw std::invalid_argument("FFT length must be >= 2");
    std::lock_guard<std::mutex> lock(planner_mutex());
    impl_->real = fftw_alloc_real(n);
    impl_->spec = fftw_alloc_complex(n / 2 + 1);
    impl_->fwd = fftw_plan_dft_r2c_1d(n, impl_->real, impl_->spec, FFTW_ESTIMATE);
    impl_->inv = fftw_plan_dft_c2r_1d(n, impl_->spec, impl_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(impl_->fwd);
    fftw_destroy_plan(impl_->inv);
    fftw_free(impl_->real);
    fftw_free(impl_->spec);
}

std::vector<cplx> RealFft::forward(const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("FFT input length mismatch");
    std::copy(x.begin(), x.end(), impl_->real);
    fftw_execute(impl_->fwd);
    std::vector<cplx> c(n_ / 2 + 1);
    for (int k = 0; k <= n_ / 2; ++k) c[k] = cplx{impl_->spec[k][0], impl_->spec[k][1]} / double(n_);
    return c;
}

std::vector<double> RealFft::inverse(const std::vector<cplx>& c) {
    if (c.empty() || static_cast<int>(c.size()) > n_ / 2) {
        throw std::invalid_argument("inverse FFT needs 1..n/2 coefficients");
    }
    for (int k = 0; k <= n_ / 2; ++k) {
        const cplx v = k < static_cast<int>(c.size()) ? c[k] : cplx{};
        impl_->spec[k][0] = v.real();
        impl_->spec[k][1] = k == 0 ? 0.0 : v.imag();
    }
    fftw_execute(impl_->inv);
    return std::vector<double>(impl_->real, impl_->real + n_);
}

bool valid_sample_count(int n, int m) {
    return n >= 4 * (2 * m + 1) && (n & (n - 1)) == 0;
}

ReluctivityHarmonics reluctivity_harmonics(const std::vector<std::vector<cplx>>& b_spectra,
                                           const BHCurve& curve, int m, int n_samples,
                                           double flux_scale) {
    if (m < 1) throw std::invalid_argument("harmonic order m must be >= 1");
    if (!valid_sample_count(n_samples, m)) {
        throw std::invalid_argument("n_time_samples = " + std::to_string(n_samples) +
                                    " violates the aliasing guard (power of two >= 4(2m+1) = " +
                                    std::to_string(4 * (2 * m + 1)) + ")");
    }
    RealFft fft(n_samples);
    ReluctivityHarmonics out;
    out.k_max = 2 * m;
    out.nu.reserve(b_spectra.size());
    out.b_max.reserve(b_spectra.size());
    std::vector<double> nu_t(n_samples);
    for (const auto& spec : b_spectra) {
        if (static_cast<int>(spec.size()) != m + 1) throw std::invalid_argument("spectrum must hold orders 0..m");
        const auto b = fft.inverse(spec);
        double bmax = 0.0;
        for (int j = 0; j < n_samples; ++j) {
            const double mag = std::abs(flux_scale * b[j]);
            bmax = std::max(bmax, mag);
            nu_t[j] = curve.reluctivity(mag);
        }
        auto c = fft.forward(nu_t);
        c.resize(out.k_max + 1);
        c[0] = c[0].real();
        out.nu.push_back(std::move(c));
        out.b_max.push_back(bmax);
    }
    return out;
}

double evaluate_series(const std::vector<cplx>& c, double omega, double t) {
    if (c.empty()) return 0.0;
    double x = c[0].real();
    for (std::size_t n = 1; n < c.size(); ++n) {
        x += 2.0 * (c[n] * std::exp(cplx{0.0, double(n) * omega * t})).real();
    }
    return x;
}

}  // namespace lamhb
