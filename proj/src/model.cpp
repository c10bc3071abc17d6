#include "lamhb/model.hpp"

#include <cmath>
#include <stdexcept>

namespace lamhb {

Materials::Materials(BHCurve c, double sigma_, double nu_ins_, const StackGeometry& g)
    : curve(std::move(c)), sigma(sigma_), nu_ins(nu_ins_),
      hom(HomogenizationParams::from_thicknesses(g.d, g.d_ins, sigma_, nu_ins_)) {
    if (!(sigma > 0.0)) throw std::invalid_argument("laminate conductivity must be > 0");
    if (!(nu_ins > 0.0)) throw std::invalid_argument("insulation reluctivity must be > 0");
}

std::vector<double> element_conductivity(const Mesh1D& mesh, const Materials& mat) {
    std::vector<double> s(mesh.n_elements(), 0.0);
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        if (mesh.region_of(e).kind == RegionKind::laminate) s[e] = mat.sigma;
    }
    return s;
}

bool is_nonlinear_region(RegionKind kind) {
    return kind == RegionKind::laminate || kind == RegionKind::homogenized;
}

double linear_element_reluctivity(const Mesh1D& mesh, const Materials& mat, std::size_t e) {
    switch (mesh.region_of(e).kind) {
        case RegionKind::insulation: return mat.nu_ins;
        case RegionKind::air: return mat.nu_air;
        default: throw std::logic_error("element is not linear");
    }
}

std::string to_string(BoundaryKind kind) {
    switch (kind) {
        case BoundaryKind::symmetric_neumann: return "symmetric_neumann";
        case BoundaryKind::dirichlet_flux: return "dirichlet_flux";
        case BoundaryKind::magnetic_circuit: return "magnetic_circuit";
    }
    return "unknown";
}

BoundaryKind boundary_kind_from_string(const std::string& s) {
    if (s == "symmetric_neumann") return BoundaryKind::symmetric_neumann;
    if (s == "dirichlet_flux") return BoundaryKind::dirichlet_flux;
    if (s == "magnetic_circuit") return BoundaryKind::magnetic_circuit;
    throw std::invalid_argument("unknown boundary kind '" + s + "'");
}

double Drive::omega() const { return 2.0 * M_PI * f; }

double Drive::field(double t) const { return h_dc + h_ac * std::cos(omega() * t); }

double Drive::flux(double t, double length) const {
    return (b_dc + b_ac * std::cos(omega() * t)) * length;
}

std::complex<double> Drive::field_harmonic(int n) const {
    if (n == 0) return h_dc;
    if (n == 1) return 0.5 * h_ac;
    return 0.0;
}

std::complex<double> Drive::flux_density_harmonic(int n) const {
    if (n == 0) return b_dc;
    if (n == 1) return 0.5 * b_ac;
    return 0.0;
}

double Drive::circuit_coupling(double length) const {
    return boundary == BoundaryKind::magnetic_circuit ? gap_reluctivity / length : 0.0;
}

bool Drive::has_ac() const {
    return boundary == BoundaryKind::dirichlet_flux ? b_ac != 0.0 : h_ac != 0.0;
}

bool Drive::is_zero() const {
    return boundary == BoundaryKind::dirichlet_flux ? (b_dc == 0.0 && b_ac == 0.0)
                                                    : (h_dc == 0.0 && h_ac == 0.0);
}

void Drive::validate() const {
    if (!(f > 0.0)) throw std::invalid_argument("drive frequency must be > 0");
    if (!(h_dc >= 0.0) || !(h_ac >= 0.0)) throw std::invalid_argument("drive fields must be >= 0");
    if (!(b_dc >= 0.0) || !(b_ac >= 0.0)) throw std::invalid_argument("drive flux densities must be >= 0");
    if (boundary == BoundaryKind::magnetic_circuit && !(gap_reluctivity > 0.0)) {
        throw std::invalid_argument("gap reluctivity must be > 0");
    }
}

}  // namespace lamhb
