#include "lamhb/homog.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lamhb/analytic.hpp"

namespace lamhb {

namespace {

void require_omega(double omega) {
    if (!(omega > 0.0)) {
        throw std::domain_error("frequency-domain tensor requires omega > 0; use the static tensor");
    }
}

void require_nu(double nu) {
    if (!(nu > 0.0)) throw std::domain_error("reluctivity must be > 0");
}

// csch^2(x/2) (sinh(x)/x + 1)
cplx weight_b(cplx x) {
    if (std::abs(x) >= 1.0) {
        return 2.0 * analytic::stable_coth(0.5 * x) / x + analytic::stable_csch2(0.5 * x);
    }
    return analytic::stable_csch2(0.5 * x) * (2.0 + analytic::sinhc_minus_one(x));
}

// csch^2(x/2) (sinh(x)/x - 1)
cplx weight_j(cplx x) {
    if (std::abs(x) >= 1.0) {
        return 2.0 * analytic::stable_coth(0.5 * x) / x - analytic::stable_csch2(0.5 * x);
    }
    return analytic::stable_csch2(0.5 * x) * analytic::sinhc_minus_one(x);
}

}  // namespace

HomogenizationParams HomogenizationParams::from_thicknesses(double d, double d_ins, double sigma,
                                                            double nu_ins) {
    HomogenizationParams p{d, d_ins, d / (d + d_ins), sigma, nu_ins};
    p.validate();
    return p;
}

void HomogenizationParams::validate() const {
    if (!(d > 0.0)) throw std::invalid_argument("laminate thickness must be > 0");
    if (!(d_ins >= 0.0)) throw std::invalid_argument("insulation thickness must be >= 0");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("stacking factor must lie in (0, 1]");
    if (!(sigma > 0.0)) throw std::invalid_argument("conductivity must be > 0");
    if (gamma < 1.0 && !(nu_ins > 0.0)) {
        throw std::invalid_argument("insulation reluctivity must be > 0 when gamma < 1");
    }
    const double geometric = d / (d + d_ins);
    if (std::abs(gamma - geometric) > 1e-9) {
        throw std::invalid_argument("stacking factor inconsistent with d / (d + d_ins)");
    }
}

EffectiveConductivity effective_conductivity(const HomogenizationParams& p) {
    return {p.gamma * p.sigma, 0.0};
}

double mixed_reluctivity_xy(const HomogenizationParams& p, double nu) {
    require_nu(nu);
    if (p.gamma >= 1.0) return nu;
    if (p.gamma <= 0.0) return p.nu_ins;
    return 1.0 / ((1.0 - p.gamma) / p.nu_ins + p.gamma / nu);
}

double mixed_reluctivity_z(const HomogenizationParams& p, double nu) {
    require_nu(nu);
    return p.gamma * nu + (1.0 - p.gamma) * p.nu_ins;
}

SimpleReluctivity simple_reluctivity_tensor(const HomogenizationParams& p, double nu) {
    return {mixed_reluctivity_xy(p, nu), mixed_reluctivity_z(p, nu)};
}

TensorFrame tensor_frame(const HomogenizationParams& p, double nu, InsulationCorrection corr) {
    require_nu(nu);
    if (corr == InsulationCorrection::off) return {nu, p.sigma, p.d};
    return {mixed_reluctivity_xy(p, nu), p.gamma * p.sigma, p.period()};
}

double frame_skin_depth(const HomogenizationParams& p, double nu, double omega,
                        InsulationCorrection corr) {
    const auto f = tensor_frame(p, nu, corr);
    return analytic::skin_depth(f.nu, f.sigma, omega);
}

double laminate_depth_to_frame(const HomogenizationParams& p, double delta,
                               InsulationCorrection corr) {
    if (!(delta > 0.0)) throw std::domain_error("skin depth must be > 0");
    return corr == InsulationCorrection::off ? delta : delta * p.period() / p.d;
}

cplx original_reluctivity_xy(const HomogenizationParams& p, double nu, double omega,
                             InsulationCorrection corr) {
    require_omega(omega);
    const auto f = tensor_frame(p, nu, corr);
    const double delta = analytic::skin_depth(f.nu, f.sigma, omega);
    const cplx k = cplx{1.0, 1.0} / delta;
    // sinh(kd) / sinh^2(kd/2) = 2 coth(kd/2)
    return f.sigma * f.d * delta * omega * cplx{1.0, 1.0} / 8.0 * 2.0 *
           analytic::stable_coth(0.5 * k * f.d);
}

ModifiedWavenumbers ModifiedWavenumbers::from_depths(double delta_B, double delta_H) {
    if (!(delta_B > 0.0) || !(delta_H > 0.0)) throw std::domain_error("skin depths must be > 0");
    return {cplx{1.0, 1.0} / delta_B, cplx{1.0, 1.0} / delta_H, delta_B, delta_H};
}

ModifiedTerms modified_reluctivity_terms_raw(double nu, double sigma, double d, double omega,
                                             cplx k_B, cplx k_H) {
    require_omega(omega);
    require_nu(nu);
    const cplx xb = k_B * d;
    const cplx xh = k_H * d;
    const cplx f_b = nu * xb * xb / 8.0 * weight_b(xb);
    const cplx xh2 = xh * xh;
    // -j nu^2 k_H^4 d^2 / (8 sigma omega) * csch^2 (sinh(x)/x - 1)
    const cplx jwfj = cplx{0.0, -1.0} * nu * nu * xh2 * xh2 / (8.0 * sigma * omega * d * d) *
                      weight_j(xh);
    return {f_b, jwfj};
}

ModifiedTerms modified_reluctivity_terms(const HomogenizationParams& p, double nu, double omega,
                                         const ModifiedWavenumbers& w, InsulationCorrection corr) {
    const auto f = tensor_frame(p, nu, corr);
    return modified_reluctivity_terms_raw(f.nu, f.sigma, f.d, omega, w.k_B, w.k_H);
}

cplx modified_reluctivity_xy(const HomogenizationParams& p, double nu, double omega,
                             const ModifiedWavenumbers& w, InsulationCorrection corr) {
    const auto t = modified_reluctivity_terms(p, nu, omega, w, corr);
    return t.f_b + t.j_omega_f_j;
}

double homogenized_loss_density(const std::vector<std::pair<int, cplx>>& b_avg,
                                const std::vector<cplx>& tensor, double omega_f) {
    if (b_avg.size() != tensor.size()) {
        throw std::invalid_argument("one tensor entry per harmonic is required");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < b_avg.size(); ++i) {
        const auto [n, b] = b_avg[i];
        if (n < 1) continue;
        // peak amplitude is 2|b_n|: p = (n w / 2) Im(nu) |2 b_n|^2
        const double term = 2.0 * n * omega_f * tensor[i].imag() * std::norm(b);
        const double scale = 2.0 * n * omega_f * std::abs(tensor[i]) * std::norm(b);
        if (term < -1e-12 * scale) {
            throw std::domain_error("tensor at order " + std::to_string(n) + " is not dissipative");
        }
        total += std::max(term, 0.0);
    }
    return total;
}

}  // namespace lamhb
