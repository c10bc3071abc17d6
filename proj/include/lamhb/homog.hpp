#pragma once

// Homogenized material tensors for a lamination stack whose laminates are
// parallel to the field. Only the in-plane (xy) and stack-normal (z) entries
// are represented; the tensors are diagonal.

#include <complex>
#include <utility>
#include <vector>

namespace lamhb {

using cplx = std::complex<double>;

struct HomogenizationParams {
    double d = 5e-4;      // laminate thickness, m
    double d_ins = 0.0;   // insulation thickness, m
    double gamma = 1.0;   // stacking factor
    double sigma = 1.0;   // laminate conductivity, S/m
    double nu_ins = 0.0;  // insulation reluctivity, m/H

    /// gamma = d / (d + d_ins)
    static HomogenizationParams from_thicknesses(double d, double d_ins, double sigma, double nu_ins);

    /// Period of the stack d + d_ins.
    [[nodiscard]] double period() const { return d + d_ins; }

    void validate() const;
};

struct EffectiveConductivity {
    double in_plane;
    double normal;  // always 0
};

EffectiveConductivity effective_conductivity(const HomogenizationParams& p);

/// Harmonic mixing 1 / ((1 - gamma)/nu_ins + gamma/nu).
double mixed_reluctivity_xy(const HomogenizationParams& p, double nu);
/// Arithmetic mixing gamma nu + (1 - gamma) nu_ins.
double mixed_reluctivity_z(const HomogenizationParams& p, double nu);

struct SimpleReluctivity {
    double xy;
    double z;
};

/// Static (omega = 0) tensor.
SimpleReluctivity simple_reluctivity_tensor(const HomogenizationParams& p, double nu);

/// Whether stacking-factor corrections (sigma -> gamma sigma, nu -> mixed
/// reluctivity inside the skin depth, d -> d + d_ins) are applied.
enum class InsulationCorrection { off, on };

/// In-plane entry of the complex frequency-domain tensor (requires omega > 0).
cplx original_reluctivity_xy(const HomogenizationParams& p, double nu, double omega,
                             InsulationCorrection corr = InsulationCorrection::on);

struct ModifiedWavenumbers {
    cplx k_B;
    cplx k_H;
    double delta_B;
    double delta_H;

    /// k_X = (1 + j) / delta_X
    static ModifiedWavenumbers from_depths(double delta_B, double delta_H);
};

/// Material values that actually enter the tensor formula once the
/// correction switch has been applied.
struct TensorFrame {
    double nu;
    double sigma;
    double d;
};

TensorFrame tensor_frame(const HomogenizationParams& p, double nu, InsulationCorrection corr);

/// Skin depth in the tensor frame, sqrt(2 nu / (sigma omega)).
double frame_skin_depth(const HomogenizationParams& p, double nu, double omega,
                        InsulationCorrection corr);

/// Rescales a depth calibrated on a bare laminate of thickness d to the
/// tensor frame (multiplies by d_frame / d so that k d is unchanged).
double laminate_depth_to_frame(const HomogenizationParams& p, double delta,
                               InsulationCorrection corr);

struct ModifiedTerms {
    cplx f_b;       // thickness average of the flux-density weighting
    cplx j_omega_f_j;  // j omega times the average of the current weighting
};

/// Both contributions of the modified in-plane entry; `w` holds the
/// wavenumbers of the tensor frame.
ModifiedTerms modified_reluctivity_terms(const HomogenizationParams& p, double nu, double omega,
                                         const ModifiedWavenumbers& w,
                                         InsulationCorrection corr = InsulationCorrection::on);

cplx modified_reluctivity_xy(const HomogenizationParams& p, double nu, double omega,
                             const ModifiedWavenumbers& w,
                             InsulationCorrection corr = InsulationCorrection::on);

/// Raw formula with explicit frame values, no corrections applied.
ModifiedTerms modified_reluctivity_terms_raw(double nu, double sigma, double d, double omega,
                                             cplx k_B, cplx k_H);

/// Time-averaged loss density of a homogenized region, W/m^3.
/// `b_avg` holds (order, two-sided coefficient) pairs; `tensor[i]` is the
/// in-plane entry at order b_avg[i].first. Orders < 1 are ignored.
/// Throws std::domain_error if a harmonic would generate energy.
double homogenized_loss_density(const std::vector<std::pair<int, cplx>>& b_avg,
                                const std::vector<cplx>& tensor, double omega_f);

}  // namespace lamhb
