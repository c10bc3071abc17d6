#pragma once

// 1-D slab meshes across a lamination stack. The coordinate z runs through
// the stack; A is the in-plane vector potential and B = dA/dz.

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "lamhb/linalg.hpp"

namespace lamhb {

enum class RegionKind { laminate, insulation, homogenized, air };

std::string to_string(RegionKind kind);
RegionKind region_kind_from_string(const std::string& s);

struct Region {
    RegionKind kind;
    int lamination = -1;  // index for laminate regions
};

struct Mesh1D {
    std::vector<double> nodes;
    std::vector<int> element_region;  // element e spans nodes e and e+1
    std::vector<Region> regions;

    [[nodiscard]] std::size_t n_nodes() const { return nodes.size(); }
    [[nodiscard]] std::size_t n_elements() const { return element_region.size(); }
    [[nodiscard]] double element_length(std::size_t e) const { return nodes[e + 1] - nodes[e]; }
    [[nodiscard]] const Region& region_of(std::size_t e) const { return regions[element_region[e]]; }
    [[nodiscard]] double length() const { return nodes.back() - nodes.front(); }
    [[nodiscard]] int n_laminations() const;

    /// Element indices of lamination k, in increasing z.
    [[nodiscard]] std::vector<std::size_t> lamination_elements(int k) const;

    /// Throws std::invalid_argument when an invariant is broken.
    void validate() const;
};

struct StackGeometry {
    int n_laminations = 10;
    double d = 5e-4;
    double d_ins = 0.0;
    double padding = 0.0;  // air on each side

    [[nodiscard]] double gamma() const { return d / (d + d_ins); }
    [[nodiscard]] double stack_thickness() const { return n_laminations * (d + d_ins); }
    void validate() const;
};

struct MeshRefinement {
    enum class Kind { resolve_skin_depth, uniform } kind = Kind::resolve_skin_depth;
    // resolve_skin_depth: laminate element size <= fraction * sqrt(2 nu_in / (sigma omega))
    double freq = 50.0;
    double nu_in = 400.0;
    double sigma = 1.0;
    double fraction = 1.0;
    int min_elements_per_lamination = 1;
    // uniform: target element size in every region
    double h = 1.0;

    static MeshRefinement skin_depth(double freq, double nu_in, double sigma, double fraction = 1.0,
                                     int min_elements = 1);
    static MeshRefinement uniform(double h);
};

/// Air | insulation d_ins/2 | laminate | insulation d_ins | ... | insulation d_ins/2 | air.
Mesh1D build_stack_mesh(const StackGeometry& g, const MeshRefinement& refine);

/// The stack as one homogenized region with `n_elements` equal elements.
Mesh1D build_homogenized_mesh(const StackGeometry& g, int n_elements, int padding_elements = 1);

/// Stiffness matrix of sum_e nu_e * int A' v' dz.
template <class T>
Tridiagonal<T> assemble_stiffness(const Mesh1D& mesh, const std::vector<T>& nu_per_element);

/// Consistent P1 mass matrix weighted by sigma_e.
Tridiagonal<double> assemble_mass(const Mesh1D& mesh, const std::vector<double>& sigma_per_element);

/// Mass-weighted indicator w_k = M 1_k of lamination k and its integral of sigma.
struct LaminationConstraint {
    int lamination;
    std::vector<double> w;
    double sigma_d;  // integral of sigma over the lamination
};

std::vector<LaminationConstraint> lamination_constraints(const Mesh1D& mesh,
                                                         const std::vector<double>& sigma);

void write_mesh(std::ostream& os, const Mesh1D& mesh);
Mesh1D read_mesh(std::istream& is);

extern template Tridiagonal<double> assemble_stiffness(const Mesh1D&, const std::vector<double>&);
extern template Tridiagonal<std::complex<double>> assemble_stiffness(
    const Mesh1D&, const std::vector<std::complex<double>>&);

}  // namespace lamhb
