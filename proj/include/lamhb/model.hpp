#pragma once

// Material assignment and boundary drive shared by the transient and the
// harmonic-balance solvers.

#include <complex>
#include <string>
#include <vector>

#include "lamhb/homog.hpp"
#include "lamhb/material.hpp"
#include "lamhb/mesh.hpp"

namespace lamhb {

struct Materials {
    BHCurve curve;            // laminate law
    double sigma;             // laminate conductivity, S/m
    double nu_ins = kNuVacuum;
    double nu_air = kNuVacuum;
    HomogenizationParams hom; // used by homogenized elements

    Materials(BHCurve c, double sigma_, double nu_ins_, const StackGeometry& g);
};

/// Conductivity per element: sigma in laminates, 0 elsewhere. Homogenized
/// regions carry no macroscopic mass in 1-D (eddy currents close within
/// each laminate plane), so they get 0 as well.
std::vector<double> element_conductivity(const Mesh1D& mesh, const Materials& mat);

/// Reluctivity of a linear element (insulation or air); throws for others.
double linear_element_reluctivity(const Mesh1D& mesh, const Materials& mat, std::size_t e);

[[nodiscard]] bool is_nonlinear_region(RegionKind kind);

enum class BoundaryKind {
    symmetric_neumann,  // H = h_dc + h_ac cos(wt) on both faces
    dirichlet_flux,     // total flux (b_dc + b_ac cos(wt)) * L prescribed
    magnetic_circuit,   // H_face = H_src - (r / L) * flux, source h_dc + h_ac cos(wt)
};

std::string to_string(BoundaryKind kind);
BoundaryKind boundary_kind_from_string(const std::string& s);

struct Drive {
    double h_dc = 0.0;  // A/m
    double h_ac = 0.0;  // A/m, peak of the fundamental
    double f = 50.0;    // Hz
    BoundaryKind boundary = BoundaryKind::symmetric_neumann;
    double b_dc = 0.0;  // T, flux drive only
    double b_ac = 0.0;  // T, flux drive only
    double gap_reluctivity = 0.1 * kNuVacuum;  // r, m/H; magnetic_circuit only

    [[nodiscard]] double omega() const;
    [[nodiscard]] double period() const { return 1.0 / f; }

    /// Face field (neumann) or source field (circuit) at time t.
    [[nodiscard]] double field(double t) const;
    /// Prescribed total flux per unit width at time t (flux drive).
    [[nodiscard]] double flux(double t, double length) const;

    /// Two-sided coefficient of order n >= 0 of field(t) or flux(t)/length.
    [[nodiscard]] std::complex<double> field_harmonic(int n) const;
    [[nodiscard]] std::complex<double> flux_density_harmonic(int n) const;

    /// Coupling kappa = r / L added to the last diagonal entry (circuit).
    [[nodiscard]] double circuit_coupling(double length) const;

    [[nodiscard]] bool has_ac() const;
    [[nodiscard]] bool is_zero() const;

    void validate() const;
};

}  // namespace lamhb
