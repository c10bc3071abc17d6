#include "lamhb/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace lamhb::analytic {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw std::domain_error(std::string(name) + " must be > 0");
}

void require_inside(double z, double d) {
    if (std::abs(z) > 0.5 * d * (1.0 + 1e-12)) {
        throw std::domain_error("coordinate lies outside the lamination (|z| > d/2)");
    }
}

// cosh(k z) / cosh(k d/2) written with decaying exponentials only.
cplx cosh_ratio(cplx k, double z, double d) {
    const cplx num = std::exp(k * (z - 0.5 * d)) + std::exp(-k * (z + 0.5 * d));
    return num / (1.0 + std::exp(-k * d));
}

cplx sinh_over_cosh(cplx k, double z, double d) {
    const cplx num = std::exp(k * (z - 0.5 * d)) - std::exp(-k * (z + 0.5 * d));
    return num / (1.0 + std::exp(-k * d));
}

}  // namespace

cplx stable_coth(cplx x) {
    if (std::abs(x) < 1.0) return std::cosh(x) / std::sinh(x);
    const cplx s = x.real() >= 0.0 ? x : -x;
    const cplx e = std::exp(-2.0 * s);
    const cplx c = (1.0 + e) / (1.0 - e);
    return x.real() >= 0.0 ? c : -c;
}

cplx stable_csch2(cplx x) {
    if (std::abs(x) < 1.0) {
        const cplx s = std::sinh(x);
        return 1.0 / (s * s);
    }
    const cplx s = x.real() >= 0.0 ? x : -x;
    const cplx e = std::exp(-2.0 * s);
    return 4.0 * e / ((1.0 - e) * (1.0 - e));
}

cplx sinhc_minus_one(cplx x) {
    if (std::abs(x) < 0.5) {
        // x^2/3! + x^4/5! + ... ; truncation error below 1e-17 for |x| < 0.5
        const cplx x2 = x * x;
        cplx term = x2 / 6.0;
        cplx sum = term;
        for (int k = 2; k <= 7; ++k) {
            term *= x2 / static_cast<double>((2 * k) * (2 * k + 1));
            sum += term;
        }
        return sum;
    }
    return std::sinh(x) / x - 1.0;
}

double skin_depth(double nu, double sigma, double omega) {
    require_positive(nu, "reluctivity");
    require_positive(sigma, "conductivity");
    require_positive(omega, "angular frequency");
    return std::sqrt(2.0 * nu / (sigma * omega));
}

cplx wavenumber(double delta) {
    require_positive(delta, "skin depth");
    return cplx{1.0, 1.0} / delta;
}

cplx linear_H_profile(double z, const LinearProfileParams& p) {
    require_positive(p.d, "thickness");
    require_inside(z, p.d);
    return p.surface_value * cosh_ratio(p.k, z, p.d);
}

cplx linear_B_profile(double z, const LinearProfileParams& p) { return linear_H_profile(z, p); }

cplx linear_J_profile(double z, const LinearProfileParams& p) {
    require_positive(p.d, "thickness");
    require_inside(z, p.d);
    return -p.k * p.surface_value * sinh_over_cosh(p.k, z, p.d);
}

double eddy_loss_density_linear(double h0, double sigma, double d, double delta) {
    require_positive(h0, "field amplitude");
    require_positive(sigma, "conductivity");
    require_positive(d, "thickness");
    require_positive(delta, "skin depth");
    const double x = d / delta;
    double ratio;
    if (x < 1.0) {
        // sinh x - sin x = 2 (x^3/3! + x^7/7! + x^11/11! + ...)
        const double x4 = x * x * x * x;
        double term = x * x * x / 6.0;
        double num = term;
        for (int k = 1; k <= 5; ++k) {
            const double a = 4.0 * k;
            term *= x4 / ((a) * (a + 1.0) * (a + 2.0) * (a + 3.0));
            num += term;
        }
        ratio = 2.0 * num / (std::cosh(x) + std::cos(x));
    } else if (x < 30.0) {
        ratio = (std::sinh(x) - std::sin(x)) / (std::cosh(x) + std::cos(x));
    } else {
        const double e = std::exp(-x);
        ratio = (1.0 - e * e - 2.0 * std::sin(x) * e) / (1.0 + e * e + 2.0 * std::cos(x) * e);
    }
    return h0 * h0 / (sigma * d * delta) * ratio;
}

double penetration_depth_z0(const PowerLawSolutionParams& p) {
    if (!(p.n > 1.0)) throw std::domain_error("power-law exponent must be > 1");
    require_positive(p.mu_s, "surface permeability");
    require_positive(p.omega, "angular frequency");
    require_positive(p.sigma, "conductivity");
    const double n = p.n;
    const double num = std::pow(2.0 * n * (n + 1.0) * (3.0 * n + 1.0) * (3.0 * n + 1.0), 0.25);
    return num / ((n - 1.0) * std::sqrt(p.omega * p.sigma * p.mu_s));
}

PowerLawProfileValue mayergoyz_B_magnitude(double z, const PowerLawSolutionParams& p) {
    require_positive(p.d, "thickness");
    require_inside(z, p.d);
    const double z0 = penetration_depth_z0(p);
    const double half = 0.5 * p.d;
    const bool valid = z0 <= half;
    const double z0_eff = valid ? z0 : half;
    const double b_s = p.mu_s * p.h_s;
    const double expo = 2.0 / (p.n - 1.0);
    const double dist = half - std::abs(z);  // distance to the nearer surface
    if (dist >= z0_eff) return {0.0, valid};
    return {b_s * std::pow(1.0 - dist / z0_eff, expo), valid};
}

cplx local_flux_from_average_k(cplx b_avg, double z_local, cplx k, double d) {
    require_positive(d, "thickness");
    require_inside(z_local, d);
    const cplx kd = k * d;
    if (std::abs(kd) == 0.0) return b_avg;
    if (std::abs(kd) < 1.0) {
        return b_avg * kd / (2.0 * std::sinh(0.5 * kd)) * std::cosh(k * z_local);
    }
    const cplx num = std::exp(k * (z_local - 0.5 * d)) + std::exp(-k * (z_local + 0.5 * d));
    return b_avg * kd * num / (2.0 * (1.0 - std::exp(-kd)));
}

cplx local_flux_from_average(cplx b_avg, double z_local, double nu0, double sigma, double omega,
                             double d) {
    return local_flux_from_average_k(b_avg, z_local, wavenumber(skin_depth(nu0, sigma, omega)), d);
}

}  // namespace lamhb::analytic
