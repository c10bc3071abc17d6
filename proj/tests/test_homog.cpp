#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "lamhb/analytic.hpp"
#include "lamhb/homog.hpp"
#include "lamhb/material.hpp"

using namespace lamhb;

namespace {

HomogenizationParams stack() {
    return HomogenizationParams::from_thicknesses(5e-4, 5e-4 * (1.0 / 0.985 - 1.0), 10.4e6, kNuVacuum);
}

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

}  // namespace

TEST_CASE("stacking factor and parameter validation") {
    const auto p = stack();
    CHECK(p.gamma == doctest::Approx(0.985).epsilon(1e-14));
    CHECK(p.period() == doctest::Approx(5e-4 / 0.985).epsilon(1e-14));
    auto bad = p;
    bad.gamma = 1.2;
    CHECK_THROWS(bad.validate());
    bad = p;
    bad.d = -1.0;
    CHECK_THROWS(bad.validate());
    CHECK_THROWS(HomogenizationParams::from_thicknesses(5e-4, -1e-6, 1e7, kNuVacuum));
}

TEST_CASE("static mixing rules") {
    const auto p = stack();
    const double nu = 500.0;
    const double xy = 1.0 / ((1 - p.gamma) / p.nu_ins + p.gamma / nu);
    const double z = p.gamma * nu + (1 - p.gamma) * p.nu_ins;
    CHECK(mixed_reluctivity_xy(p, nu) == doctest::Approx(xy).epsilon(1e-14));
    CHECK(mixed_reluctivity_z(p, nu) == doctest::Approx(z).epsilon(1e-14));
    const auto t = simple_reluctivity_tensor(p, nu);
    CHECK(t.xy == doctest::Approx(xy));
    CHECK(t.z == doctest::Approx(z));
    const auto s = effective_conductivity(p);
    CHECK(s.in_plane == doctest::Approx(p.gamma * p.sigma));
    CHECK(s.normal == 0.0);
    // full stacking factor reduces to the bare material
    auto solid = p;
    solid.gamma = 1.0;
    solid.d_ins = 0.0;
    CHECK(mixed_reluctivity_xy(solid, nu) == doctest::Approx(nu));
}

TEST_CASE("frequency-domain tensor equals nu (kd/2) coth(kd/2)") {
    const auto p = stack();
    for (double f : {10.0, 1e3, 1e5}) {
        const double omega = 2 * M_PI * f;
        const double delta = analytic::skin_depth(400.0, p.sigma, omega);
        const cplx x = cplx{1.0, 1.0} / delta * p.d * 0.5;
        const cplx expect = 400.0 * x * std::cosh(x) / std::sinh(x);
        CHECK(close(original_reluctivity_xy(p, 400.0, omega, InsulationCorrection::off), expect, 1e-12));
    }
}

TEST_CASE("frequency-domain tensor limits") {
    const auto p = stack();
    const double nu = 800.0;
    // low frequency: static mixing
    const cplx lo = original_reluctivity_xy(p, nu, 2 * M_PI * 1e-3);
    CHECK(lo.real() == doctest::Approx(mixed_reluctivity_xy(p, nu)).epsilon(1e-8));
    CHECK(lo.imag() > 0.0);
    // high frequency: magnitude grows like d / delta
    const cplx hi1 = original_reluctivity_xy(p, nu, 2 * M_PI * 1e7);
    const cplx hi2 = original_reluctivity_xy(p, nu, 2 * M_PI * 4e7);
    CHECK(std::abs(hi2) / std::abs(hi1) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::isfinite(std::abs(original_reluctivity_xy(p, nu, 1e15))));
    CHECK_THROWS(original_reluctivity_xy(p, nu, 0.0));
}

TEST_CASE("modified tensor with linear depths reduces to the frequency-domain tensor") {
    const auto p = stack();
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> lf(0.0, 6.0), lnu(2.3, 4.0);
    for (auto corr : {InsulationCorrection::off, InsulationCorrection::on}) {
        for (int i = 0; i < 50; ++i) {
            const double omega = 2 * M_PI * std::pow(10.0, lf(rng));
            const double nu = std::pow(10.0, lnu(rng));
            const double delta = frame_skin_depth(p, nu, omega, corr);
            const auto w = ModifiedWavenumbers::from_depths(delta, delta);
            CHECK(close(modified_reluctivity_xy(p, nu, omega, w, corr), original_reluctivity_xy(p, nu, omega, corr),
                        1e-12));
        }
    }
}

TEST_CASE("laminate depth maps to the tensor frame with kd preserved") {
    const auto p = stack();
    const double delta = 3e-4;
    CHECK(laminate_depth_to_frame(p, delta, InsulationCorrection::off) == delta);
    const double framed = laminate_depth_to_frame(p, delta, InsulationCorrection::on);
    CHECK(p.period() / framed == doctest::Approx(p.d / delta).epsilon(1e-14));
    CHECK_THROWS(laminate_depth_to_frame(p, 0.0, InsulationCorrection::on));
}

TEST_CASE("modified terms: flux-density and current parts") {
    const double nu = 600.0, sigma = 1e7, d = 5e-4, omega = 2 * M_PI * 2e3;
    const cplx k = analytic::wavenumber(analytic::skin_depth(nu, sigma, omega));
    const auto t = modified_reluctivity_terms_raw(nu, sigma, d, omega, k, k);
    CHECK((t.f_b + t.j_omega_f_j).imag() > 0.0);
    // vanishing induced current: the flux part tends to nu
    const cplx k_small = analytic::wavenumber(1e3 * d);
    const auto s = modified_reluctivity_terms_raw(nu, sigma, d, omega, k_small, k_small);
    CHECK(std::abs(s.f_b - nu) < 1e-5 * nu);
}

TEST_CASE("homogenized loss equals the single-lamination loss for a linear material") {
    HomogenizationParams p{5e-4, 0.0, 1.0, 10.4e6, kNuVacuum};
    const double nu = 400.0;
    for (double f : {50.0, 1e3, 2e4}) {
        const double omega = 2 * M_PI * f;
        const cplx tensor = original_reluctivity_xy(p, nu, omega, InsulationCorrection::off);
        const double h0 = 750.0;
        const cplx b_peak = h0 / tensor;  // average flux driven by a surface field h0
        const double p_hom = homogenized_loss_density({{1, 0.5 * b_peak}, {-1, std::conj(0.5 * b_peak)}},
                                                      {tensor, std::conj(tensor)}, omega);
        const double p_ref = analytic::eddy_loss_density_linear(h0, p.sigma, p.d, analytic::skin_depth(nu, p.sigma, omega));
        CHECK(p_hom == doctest::Approx(p_ref).epsilon(1e-10));
    }
}

TEST_CASE("homogenized loss is non-negative and rejects active tensors") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto p = stack();
    for (int i = 0; i < 50; ++i) {
        std::vector<std::pair<int, cplx>> b;
        std::vector<cplx> t;
        for (int n = 1; n <= 9; n += 2) {
            b.emplace_back(n, cplx{u(rng), u(rng)});
            t.push_back(original_reluctivity_xy(p, 500.0, 2 * M_PI * 50.0 * n));
        }
        CHECK(homogenized_loss_density(b, t, 2 * M_PI * 50.0) >= 0.0);
    }
    CHECK_THROWS_AS(homogenized_loss_density({{1, cplx{1.0, 0.0}}}, {cplx{400.0, -10.0}}, 1.0), std::domain_error);
    CHECK_THROWS_AS(homogenized_loss_density({{1, cplx{1.0, 0.0}}}, {}, 1.0), std::invalid_argument);
    // dc and negative orders carry no loss
    CHECK(homogenized_loss_density({{0, cplx{1.0, 0.0}}}, {cplx{400.0, -10.0}}, 1.0) == 0.0);
}
