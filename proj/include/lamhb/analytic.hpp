#pragma once

// Closed-form single-lamination solutions. Time convention e^{+j w t};
// phasors are peak values unless stated otherwise.

#include <complex>

namespace lamhb::analytic {

using cplx = std::complex<double>;

/// sqrt(2 nu / (sigma omega))
double skin_depth(double nu, double sigma, double omega);

/// (1 + j) / delta
cplx wavenumber(double delta);

struct LinearProfileParams {
    cplx surface_value;  // H_s (A/m) or B_s (T)
    cplx k;              // 1/m
    double d;            // lamination thickness, m
};

/// surface_value * cosh(k z) / cosh(k d / 2), |z| <= d/2
cplx linear_H_profile(double z, const LinearProfileParams& p);
cplx linear_B_profile(double z, const LinearProfileParams& p);

/// Induced current density -dH/dz for the cosh field profile.
cplx linear_J_profile(double z, const LinearProfileParams& p);

/// Time-averaged eddy-current loss density of a lamination driven by a surface
/// field of peak amplitude h0 (W/m^3).
double eddy_loss_density_linear(double h0, double sigma, double d, double delta);

struct PowerLawSolutionParams {
    double mu_s;   // surface permeability, H/m
    double h_s;    // surface field magnitude, A/m
    double n;      // power-law exponent
    double omega;  // rad/s
    double sigma;  // S/m
    double d;      // m
};

/// Penetration depth of the circularly polarised power-law solution.
double penetration_depth_z0(const PowerLawSolutionParams& p);

struct PowerLawProfileValue {
    double magnitude;
    /// false when z0 > d/2, i.e. the two penetration fronts overlap and the
    /// core plateau has been clamped to zero width.
    bool valid;
};

PowerLawProfileValue mayergoyz_B_magnitude(double z, const PowerLawSolutionParams& p);

/// Local flux density in a lamination recovered from its thickness average:
/// b_avg * k d / (2 sinh(k d / 2)) * cosh(k z), k = (1 + j) / delta(nu0, sigma, omega).
cplx local_flux_from_average(cplx b_avg, double z_local, double nu0, double sigma, double omega,
                             double d);

/// Same transformation with an explicit wavenumber (k = 0 returns b_avg).
cplx local_flux_from_average_k(cplx b_avg, double z_local, cplx k, double d);

// Overflow-safe hyperbolic helpers for Re(x) >= 0.
cplx stable_coth(cplx x);
/// 1 / sinh(x)^2
cplx stable_csch2(cplx x);
/// sinh(x) / x - 1, accurate for small |x|
cplx sinhc_minus_one(cplx x);

}  // namespace lamhb::analytic
