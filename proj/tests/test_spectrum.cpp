#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "lamhb/spectrum.hpp"

using namespace lamhb;

namespace {

std::vector<cplx> direct_dft(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<cplx> c(n / 2 + 1);
    for (int k = 0; k <= n / 2; ++k) {
        for (int j = 0; j < n; ++j) c[k] += x[j] * std::polar(1.0, -2.0 * M_PI * j * k / n);
        c[k] /= n;
    }
    return c;
}

double series_at(const std::vector<cplx>& c, double phase) {
    double x = c[0].real();
    for (std::size_t k = 1; k < c.size(); ++k) x += 2.0 * (c[k] * std::polar(1.0, k * phase)).real();
    return x;
}

}  // namespace

TEST_CASE("forward transform matches a direct Fourier sum") {
    std::mt19937 g(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n : {8, 64, 256}) {
        RealFft fft(n);
        std::vector<double> x(n);
        for (auto& v : x) v = u(g);
        const auto c = fft.forward(x);
        const auto ref = direct_dft(x);
        REQUIRE(c.size() == ref.size());
        for (std::size_t k = 0; k < c.size(); ++k) CHECK(std::abs(c[k] - ref[k]) < 1e-13);
    }
}

TEST_CASE("inverse transform samples the two-sided series") {
    const int n = 32;
    RealFft fft(n);
    std::vector<cplx> c{{0.3, 0.0}, {0.5, -0.2}, {0.0, 0.1}, {0.05, 0.0}};
    const auto x = fft.inverse(c);
    for (int j = 0; j < n; ++j) CHECK(x[j] == doctest::Approx(series_at(c, 2 * M_PI * j / n)).epsilon(1e-13));
    // round trip
    const auto back = fft.forward(x);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(std::abs(back[k] - c[k]) < 1e-14);
    for (std::size_t k = c.size(); k < back.size(); ++k) CHECK(std::abs(back[k]) < 1e-14);
    // a unit first coefficient is 2 cos(wt)
    const auto cosx = fft.inverse({cplx{}, cplx{1.0, 0.0}});
    CHECK(cosx[0] == doctest::Approx(2.0));
    CHECK(std::abs(cosx[n / 4]) < 1e-14);
}

TEST_CASE("sample count guard") {
    CHECK(valid_sample_count(64, 5));
    CHECK(valid_sample_count(64, 7));
    CHECK_FALSE(valid_sample_count(32, 5));  // 32 < 44
    CHECK_FALSE(valid_sample_count(48, 2));  // not a power of two
    CHECK_FALSE(valid_sample_count(2, 0));
    CHECK_THROWS(RealFft(0));
}

TEST_CASE("evaluate_series") {
    const std::vector<cplx> c{{1.0, 0.0}, {0.0, -0.5}};
    // 1 + 2 Re(-0.5j e^{jwt}) = 1 + sin(wt)
    CHECK(evaluate_series(c, 2.0, 0.3) == doctest::Approx(1.0 + std::sin(0.6)));
}

TEST_CASE("reluctivity harmonics of a linear law are a constant") {
    const auto lin = BHCurve::linear(350.0);
    const auto r = reluctivity_harmonics({{cplx{0.2, 0}, cplx{0.4, 0.1}, cplx{}, cplx{0.05, 0}}}, lin, 3, 32);
    REQUIRE(r.nu.size() == 1);
    REQUIRE(r.nu[0].size() == 7);
    CHECK(r.nu[0][0].real() == doctest::Approx(350.0));
    for (int k = 1; k <= 6; ++k) CHECK(std::abs(r.nu[0][k]) < 1e-10);
}

TEST_CASE("reluctivity harmonics agree with direct evaluation") {
    const BHCurve steel(cold_rolled_steel(), CurveMode::modified_brauer);
    const int m = 5, n = 64;
    const std::vector<cplx> b{{0.8, 0.0}, {0.35, -0.1}, {0.0, 0.0}, {0.04, 0.02}, {}, {0.01, 0.0}};
    for (double scale : {1.0, 1.0 / 0.985}) {
        const auto r = reluctivity_harmonics({b}, steel, m, n, scale);
        std::vector<double> nu(n);
        double bmax = 0.0;
        for (int j = 0; j < n; ++j) {
            const double bj = std::abs(scale * series_at(b, 2 * M_PI * j / n));
            bmax = std::max(bmax, bj);
            nu[j] = steel.reluctivity(bj);
        }
        const auto ref = direct_dft(nu);
        for (int k = 0; k <= 2 * m; ++k) CHECK(std::abs(r.nu[0][k] - ref[k]) < 1e-9 * ref[0].real());
        CHECK(r.b_max[0] == doctest::Approx(bmax).epsilon(1e-14));
    }
    CHECK_THROWS(reluctivity_harmonics({b}, steel, m, 32));
}
