#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "lamhb/material.hpp"

using namespace lamhb;

namespace {

BHCurve steel() { return BHCurve(cold_rolled_steel(), CurveMode::modified_brauer); }

// Composite Simpson, independent of the closed form used by the library.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("brauer law matches its defining expression") {
    const auto p = cold_rolled_steel();
    for (double b : {0.0, 0.3, 1.0, 1.5}) {
        const double expect = (p.k1 * std::exp(p.k2 * b * b) + p.k3) * b;
        CHECK(brauer_H(b, p) == doctest::Approx(expect).epsilon(1e-14));
    }
    // about 429.5 A/m at 1 T
    CHECK(brauer_H(1.0, p) == doctest::Approx(3.8 * std::exp(2.17) + 396.2).epsilon(1e-14));
}

TEST_CASE("saturation point has slope nu_vac") {
    const auto p = cold_rolled_steel();
    const double bs = saturation_flux_density(p);
    const double h = 1e-6;
    const double slope = (brauer_H(bs + h, p) - brauer_H(bs - h, p)) / (2 * h);
    CHECK(slope == doctest::Approx(kNuVacuum).epsilon(1e-6));
    CHECK(bs > 1.5);
    CHECK(bs < 3.0);
}

TEST_CASE("modified curve is C1 at the saturation point and tends to nu_vac") {
    const auto c = steel();
    const double bs = *c.b_sat();
    const double e = 1e-9;
    CHECK(c.field(bs + e) == doctest::Approx(c.field(bs - e)).epsilon(1e-7));
    CHECK(c.differential_reluctivity(bs + e) == doctest::Approx(c.differential_reluctivity(bs - e)).epsilon(1e-4));
    CHECK(c.differential_reluctivity(bs + 1.0) == doctest::Approx(kNuVacuum).epsilon(1e-12));
    CHECK(c.reluctivity(1e4) == doctest::Approx(kNuVacuum).epsilon(1e-2));
    // unmodified law keeps growing
    BHCurve raw(cold_rolled_steel(), CurveMode::brauer);
    CHECK(raw.reluctivity(3.0) > 1e6);
}

TEST_CASE("reluctivity limit at zero flux") {
    const auto c = steel();
    CHECK(c.reluctivity(0.0) == doctest::Approx(3.8 + 396.2));
    CHECK(c.initial_reluctivity() == doctest::Approx(400.0));
    CHECK(c.reluctivity(1e-15) == doctest::Approx(400.0));
}

TEST_CASE("differential reluctivity agrees with finite differences") {
    const auto c = steel();
    for (double b : {0.05, 0.5, 1.0, 1.4, 1.8, 2.5, 4.0}) {
        const double h = 1e-6;
        const double fd = (c.field(b + h) - c.field(b - h)) / (2 * h);
        CHECK(c.differential_reluctivity(b) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("energy density equals the integral of H dB") {
    const auto c = steel();
    for (double b : {0.2, 1.0, 1.7, *c.b_sat(), 2.6}) {
        const double ref = simpson([&](double x) { return c.field(x); }, 0.0, b, 20000);
        CHECK(c.energy_density(b) == doctest::Approx(ref).epsilon(1e-9));
    }
    const auto lin = BHCurve::linear(500.0);
    CHECK(lin.energy_density(2.0) == doctest::Approx(0.5 * 500.0 * 4.0));
}

TEST_CASE("curve is strictly increasing with reluctivity >= initial value") {
    const auto c = steel();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int i = 0; i < 500; ++i) {
        const double a = u(rng);
        const double b = a + 1e-3 + u(rng);
        CHECK(c.field(b) > c.field(a));
        CHECK(c.reluctivity(a) >= c.initial_reluctivity() - 1e-9);
        CHECK(c.differential_reluctivity(a) >= c.reluctivity(a) - 1e-6);
    }
}

TEST_CASE("negative magnitudes are rejected") {
    CHECK_THROWS_AS((void)steel().field(-1.0), std::domain_error);
}

TEST_CASE("invalid parameters") {
    CHECK_THROWS(BHCurve::linear(0.0));
    BrauerParams bad{-1.0, 2.17, 396.2, kNuVacuum};
    CHECK_THROWS(BHCurve(bad, CurveMode::brauer));
    CHECK_THROWS(curve_mode_from_string("soft"));
    CHECK(curve_mode_from_string(to_string(CurveMode::modified_brauer)) == CurveMode::modified_brauer);
}

TEST_CASE("power law fit recovers an exact power law") {
    const PowerLawParams truth{1.7, 7.5};
    const auto fit = fit_power_law([&](double b) { return truth.field(b); }, {0.2, 1.8});
    CHECK(fit.k == doctest::Approx(1.7).epsilon(1e-10));
    CHECK(fit.n == doctest::Approx(7.5).epsilon(1e-10));
    const auto f2 = fit_power_law(steel(), {1.0, 1.8});
    CHECK(f2.n > 1.0);
}

TEST_CASE("hash is stable and parameter sensitive") {
    CHECK(steel().hash() == steel().hash());
    auto p = cold_rolled_steel();
    p.k3 = 396.3;
    CHECK(BHCurve(p, CurveMode::modified_brauer).hash() != steel().hash());
    CHECK(BHCurve::linear(400).hash() != BHCurve::linear(401).hash());
}
