#include "lamhb/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lamhb/errors.hpp"

namespace lamhb {

std::string to_string(RegionKind kind) {
    switch (kind) {
        case RegionKind::laminate: return "laminate";
        case RegionKind::insulation: return "insulation";
        case RegionKind::homogenized: return "homogenized";
        case RegionKind::air: return "air";
    }
    return "unknown";
}

RegionKind region_kind_from_string(const std::string& s) {
    if (s == "laminate") return RegionKind::laminate;
    if (s == "insulation") return RegionKind::insulation;
    if (s == "homogenized") return RegionKind::homogenized;
    if (s == "air") return RegionKind::air;
    throw std::invalid_argument("unknown region kind '" + s + "'");
}

int Mesh1D::n_laminations() const {
    int n = 0;
    for (const auto& r : regions) {
        if (r.kind == RegionKind::laminate) n = std::max(n, r.lamination + 1);
    }
    return n;
}

std::vector<std::size_t> Mesh1D::lamination_elements(int k) const {
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < n_elements(); ++e) {
        const auto& r = region_of(e);
        if (r.kind == RegionKind::laminate && r.lamination == k) out.push_back(e);
    }
    if (out.empty()) throw std::out_of_range("lamination index " + std::to_string(k) + " not in mesh");
    return out;
}

void Mesh1D::validate() const {
    if (nodes.size() < 2) throw std::invalid_argument("mesh needs at least two nodes");
    if (element_region.size() + 1 != nodes.size()) {
        throw std::invalid_argument("mesh element count must be node count - 1");
    }
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (!(nodes[i + 1] > nodes[i])) throw std::invalid_argument("mesh nodes must be strictly increasing");
    }
    std::vector<bool> used(regions.size(), false);
    for (int r : element_region) {
        if (r < 0 || static_cast<std::size_t>(r) >= regions.size()) {
            throw std::invalid_argument("element refers to a missing region");
        }
        used[r] = true;
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) {
        throw std::invalid_argument("region ids must be dense");
    }
}

void StackGeometry::validate() const {
    if (n_laminations < 1) throw std::invalid_argument("at least one lamination is required");
    if (!(d > 0.0)) throw std::invalid_argument("laminate thickness must be > 0");
    if (!(d_ins >= 0.0)) throw std::invalid_argument("insulation thickness must be >= 0");
    if (!(padding >= 0.0)) throw std::invalid_argument("padding must be >= 0");
}

MeshRefinement MeshRefinement::skin_depth(double freq, double nu_in, double sigma, double fraction,
                                          int min_elements) {
    MeshRefinement r;
    r.kind = Kind::resolve_skin_depth;
    r.freq = freq;
    r.nu_in = nu_in;
    r.sigma = sigma;
    r.fraction = fraction;
    r.min_elements_per_lamination = min_elements;
    return r;
}

MeshRefinement MeshRefinement::uniform(double h) {
    MeshRefinement r;
    r.kind = Kind::uniform;
    r.h = h;
    return r;
}

namespace {

class MeshBuilder {
public:
    explicit MeshBuilder(double z0) { mesh_.nodes.push_back(z0); }

    void add_segment(double length, int n_elements, Region region) {
        if (length <= 0.0) return;
        const int id = static_cast<int>(mesh_.regions.size());
        mesh_.regions.push_back(region);
        const double z0 = mesh_.nodes.back();
        for (int i = 1; i <= n_elements; ++i) {
            mesh_.nodes.push_back(i == n_elements ? z0 + length : z0 + length * i / n_elements);
            mesh_.element_region.push_back(id);
        }
    }

    Mesh1D finish() {
        mesh_.validate();
        return std::move(mesh_);
    }

private:
    Mesh1D mesh_;
};

int count_for(double length, double h) {
    return std::max(1, static_cast<int>(std::ceil(length / h - 1e-9)));
}

}  // namespace

Mesh1D build_stack_mesh(const StackGeometry& g, const MeshRefinement& refine) {
    g.validate();
    int n_lam = 1;
    int n_ins_half = 1;
    int n_ins_full = 1;
    int n_air = 1;
    if (refine.kind == MeshRefinement::Kind::resolve_skin_depth) {
        if (!(refine.freq > 0.0) || !(refine.nu_in > 0.0) || !(refine.sigma > 0.0) ||
            !(refine.fraction > 0.0)) {
            throw std::invalid_argument("skin-depth refinement needs positive freq, nu_in, sigma, fraction");
        }
        const double delta =
            std::sqrt(2.0 * refine.nu_in / (refine.sigma * 2.0 * M_PI * refine.freq));
        const double h = refine.fraction * delta;
        n_lam = std::max(count_for(g.d, h), refine.min_elements_per_lamination);
    } else {
        if (!(refine.h > 0.0)) throw std::invalid_argument("uniform element size must be > 0");
        n_lam = count_for(g.d, refine.h);
        n_ins_half = count_for(0.5 * g.d_ins, refine.h);
        n_ins_full = count_for(g.d_ins, refine.h);
        n_air = count_for(g.padding, refine.h);
    }

    const double total = g.stack_thickness() + 2.0 * g.padding;
    MeshBuilder b(-0.5 * total);
    b.add_segment(g.padding, n_air, {RegionKind::air});
    for (int k = 0; k < g.n_laminations; ++k) {
        b.add_segment(k == 0 ? 0.5 * g.d_ins : g.d_ins, k == 0 ? n_ins_half : n_ins_full,
                      {RegionKind::insulation});
        b.add_segment(g.d, n_lam, {RegionKind::laminate, k});
    }
    b.add_segment(0.5 * g.d_ins, n_ins_half, {RegionKind::insulation});
    b.add_segment(g.padding, n_air, {RegionKind::air});
    return b.finish();
}

Mesh1D build_homogenized_mesh(const StackGeometry& g, int n_elements, int padding_elements) {
    g.validate();
    if (n_elements < 1) throw std::invalid_argument("homogenized region needs >= 1 element");
    const double total = g.stack_thickness() + 2.0 * g.padding;
    MeshBuilder b(-0.5 * total);
    b.add_segment(g.padding, std::max(1, padding_elements), {RegionKind::air});
    b.add_segment(g.stack_thickness(), n_elements, {RegionKind::homogenized});
    b.add_segment(g.padding, std::max(1, padding_elements), {RegionKind::air});
    return b.finish();
}

template <class T>
Tridiagonal<T> assemble_stiffness(const Mesh1D& mesh, const std::vector<T>& nu) {
    if (nu.size() != mesh.n_elements()) throw std::invalid_argument("one reluctivity per element required");
    Tridiagonal<T> k(mesh.n_nodes());
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        const T c = nu[e] / mesh.element_length(e);
        k.add_element(e, c, -c, c);
    }
    return k;
}

Tridiagonal<double> assemble_mass(const Mesh1D& mesh, const std::vector<double>& sigma) {
    if (sigma.size() != mesh.n_elements()) throw std::invalid_argument("one conductivity per element required");
    Tridiagonal<double> m(mesh.n_nodes());
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        const double c = sigma[e] * mesh.element_length(e) / 6.0;
        m.add_element(e, 2.0 * c, c, 2.0 * c);
    }
    return m;
}

std::vector<LaminationConstraint> lamination_constraints(const Mesh1D& mesh,
                                                         const std::vector<double>& sigma) {
    if (sigma.size() != mesh.n_elements()) throw std::invalid_argument("one conductivity per element required");
    std::vector<LaminationConstraint> out;
    for (int k = 0; k < mesh.n_laminations(); ++k) {
        LaminationConstraint c{k, std::vector<double>(mesh.n_nodes(), 0.0), 0.0};
        for (auto e : mesh.lamination_elements(k)) {
            const double half = 0.5 * sigma[e] * mesh.element_length(e);
            c.w[e] += half;
            c.w[e + 1] += half;
            c.sigma_d += 2.0 * half;
        }
        if (c.sigma_d > 0.0) out.push_back(std::move(c));
    }
    return out;
}

void write_mesh(std::ostream& os, const Mesh1D& mesh) {
    os << "# lamhb mesh v1\n";
    os << "regions " << mesh.regions.size() << '\n';
    for (const auto& r : mesh.regions) os << to_string(r.kind) << ' ' << r.lamination << '\n';
    os << "nodes " << mesh.n_nodes() << '\n';
    os << std::setprecision(17);
    for (double z : mesh.nodes) os << z << '\n';
    os << "elements " << mesh.n_elements() << '\n';
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        os << e << ' ' << e + 1 << ' ' << mesh.element_region[e] << '\n';
    }
}

Mesh1D read_mesh(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "# lamhb mesh v1") throw IoError("mesh file: missing header");
    auto expect = [&](const std::string& key) {
        std::string word;
        std::size_t n = 0;
        if (!(is >> word >> n) || word != key) throw IoError("mesh file: expected '" + key + "'");
        return n;
    };
    Mesh1D m;
    const auto nr = expect("regions");
    for (std::size_t i = 0; i < nr; ++i) {
        std::string kind;
        int lam = -1;
        if (!(is >> kind >> lam)) throw IoError("mesh file: truncated region list");
        m.regions.push_back({region_kind_from_string(kind), lam});
    }
    const auto nn = expect("nodes");
    m.nodes.resize(nn);
    for (auto& z : m.nodes) {
        if (!(is >> z)) throw IoError("mesh file: truncated node list");
    }
    const auto ne = expect("elements");
    for (std::size_t e = 0; e < ne; ++e) {
        std::size_t a = 0, b = 0;
        int r = 0;
        if (!(is >> a >> b >> r)) throw IoError("mesh file: truncated element list");
        if (a != e || b != e + 1) throw IoError("mesh file: elements must connect consecutive nodes");
        m.element_region.push_back(r);
    }
    try {
        m.validate();
    } catch (const std::invalid_argument& ex) {
        throw IoError(std::string("mesh file: ") + ex.what());
    }
    return m;
}

template Tridiagonal<double> assemble_stiffness(const Mesh1D&, const std::vector<double>&);
template Tridiagonal<std::complex<double>> assemble_stiffness(const Mesh1D&,
                                                              const std::vector<std::complex<double>>&);

}  // namespace lamhb
