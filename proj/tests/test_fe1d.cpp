#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <sstream>

#include "lamhb/analytic.hpp"
#include "lamhb/errors.hpp"
#include "lamhb/linalg.hpp"
#include "lamhb/mesh.hpp"
#include "lamhb/model.hpp"
#include "lamhb/transient.hpp"
#include "oracles.hpp"

using namespace lamhb;
using cplx = std::complex<double>;

namespace {

template <class T>
T rnd(std::mt19937& g);
template <>
double rnd<double>(std::mt19937& g) {
    return std::uniform_real_distribution<double>(-1.0, 1.0)(g);
}
template <>
cplx rnd<cplx>(std::mt19937& g) {
    return {rnd<double>(g), rnd<double>(g)};
}

template <class T>
using Dense = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <class T>
Dense<T> to_dense(const Tridiagonal<T>& t) {
    const auto n = static_cast<Eigen::Index>(t.size());
    Dense<T> a = Dense<T>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = t.diag[i];
        if (i + 1 < n) {
            a(i, i + 1) = t.upper[i];
            a(i + 1, i) = t.lower[i];
        }
    }
    return a;
}

template <class T>
void check_low_rank(std::mt19937& g) {
    const std::size_t n = 40;
    LowRankSystem<T> s(n);
    for (std::size_t i = 0; i < n; ++i) s.tri.diag[i] = T(4.0) + rnd<T>(g);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        s.tri.upper[i] = rnd<T>(g);
        s.tri.lower[i] = s.tri.upper[i];
    }
    for (int k = 0; k < 3; ++k) {
        std::vector<double> u(n, 0.0);
        for (std::size_t i = 10 * k; i < 10 * k + 12; ++i) u[i] = std::abs(rnd<double>(g));
        s.columns.push_back(u);
        s.coeffs.push_back(T(2.0) + rnd<T>(g));
    }
    Dense<T> a = to_dense(s.tri);
    for (std::size_t k = 0; k < s.columns.size(); ++k) {
        Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(s.columns[k].data(), n);
        a += s.coeffs[k] * (u * u.transpose()).template cast<T>();
    }
    std::vector<T> rhs(n);
    for (auto& v : rhs) v = rnd<T>(g);

    // apply() agrees with the dense matrix
    Vec<T> xr(n);
    for (std::size_t i = 0; i < n; ++i) xr(i) = rhs[i];
    const Vec<T> ax = a * xr;
    const auto ap = s.apply(rhs);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ap[i] - ax(i)) < 1e-12);

    const auto x = s.solve(rhs);
    const Vec<T> ref = a.fullPivLu().solve(Eigen::Map<const Vec<T>>(rhs.data(), n));
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x[i] - ref(i)) < 1e-10 * (1.0 + std::abs(ref(i))));

    // constraining a node: the solution takes the value and the rest solves the reduced system
    auto c = s;
    auto rhs2 = rhs;
    c.constrain(0, T(0.5), rhs2);
    const auto y = c.solve(rhs2);
    CHECK(std::abs(y[0] - T(0.5)) < 1e-12);
    const auto ay = s.apply(y);
    for (std::size_t i = 1; i < n; ++i) CHECK(std::abs(ay[i] - rhs[i]) < 1e-10);
}

Materials linear_materials(const StackGeometry& g, double nu = 400.0, double sigma = 10.4e6) {
    return Materials(BHCurve::linear(nu), sigma, kNuVacuum, g);
}

std::vector<double> element_nu_linear(const Mesh1D& mesh, const Materials& mat, double nu) {
    std::vector<double> out;
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        out.push_back(mesh.region_of(e).kind == RegionKind::laminate ? nu : linear_element_reluctivity(mesh, mat, e));
    }
    return out;
}

}  // namespace

TEST_CASE("thomas solver matches a dense LU") {
    std::mt19937 g(1);
    for (int trial = 0; trial < 5; ++trial) {
        Tridiagonal<double> t(30);
        for (auto& v : t.diag) v = 3.0 + rnd<double>(g);
        for (auto& v : t.upper) v = rnd<double>(g);
        for (auto& v : t.lower) v = rnd<double>(g);
        std::vector<double> b(30);
        for (auto& v : b) v = rnd<double>(g);
        const auto x = thomas_solve(t, b);
        const Eigen::VectorXd ref = to_dense(t).fullPivLu().solve(Eigen::Map<Eigen::VectorXd>(b.data(), 30));
        for (int i = 0; i < 30; ++i) CHECK(x[i] == doctest::Approx(ref(i)).epsilon(1e-12));
    }
    Tridiagonal<double> singular(3);
    CHECK_THROWS_AS(thomas_solve(singular, std::vector<double>(3, 1.0)), NumericalError);
}

TEST_CASE("low-rank corrected systems match a dense LU") {
    std::mt19937 g(2);
    for (int trial = 0; trial < 5; ++trial) {
        check_low_rank<double>(g);
        check_low_rank<cplx>(g);
    }
}

TEST_CASE("stack mesh layout") {
    StackGeometry g{3, 5e-4, 1e-5, 2e-4};
    const auto m = build_stack_mesh(g, MeshRefinement::uniform(5e-5));
    CHECK(m.n_laminations() == 3);
    CHECK(m.length() == doctest::Approx(g.stack_thickness() + 2 * g.padding).epsilon(1e-14));
    CHECK(m.nodes.front() == doctest::Approx(-0.5 * m.length()));
    for (int k = 0; k < 3; ++k) {
        const auto els = m.lamination_elements(k);
        CHECK(els.size() == 10);
        double len = 0.0;
        for (auto e : els) len += m.element_length(e);
        CHECK(len == doctest::Approx(g.d).epsilon(1e-12));
    }
    // symmetric about the origin
    for (std::size_t i = 0; i < m.n_nodes(); ++i) {
        CHECK(m.nodes[i] == doctest::Approx(-m.nodes[m.n_nodes() - 1 - i]).epsilon(1e-12).scale(1e-9));
    }
    CHECK_THROWS((void)m.lamination_elements(3));

    const auto fine = build_stack_mesh(g, MeshRefinement::skin_depth(1e4, 400.0, 10.4e6, 0.25, 4));
    const double delta = analytic::skin_depth(400.0, 10.4e6, 2 * M_PI * 1e4);
    CHECK(fine.element_length(fine.lamination_elements(0)[0]) <= 0.25 * delta * (1 + 1e-12));
    const auto low = build_stack_mesh(g, MeshRefinement::skin_depth(1.0, 400.0, 10.4e6, 0.25, 16));
    CHECK(low.lamination_elements(1).size() == 16);

    const auto h = build_homogenized_mesh(g, 7, 2);
    CHECK(h.n_elements() == 11);
    CHECK(h.n_laminations() == 0);
    StackGeometry bare{3, 5e-4, 0.0, 0.0};
    CHECK(build_homogenized_mesh(bare, 7).n_elements() == 7);
    CHECK_THROWS(build_homogenized_mesh(bare, 0));
}

TEST_CASE("mesh text round trip") {
    StackGeometry g{2, 5e-4, 1e-5, 1e-4};
    const auto m = build_stack_mesh(g, MeshRefinement::uniform(1e-4));
    std::stringstream ss;
    write_mesh(ss, m);
    const auto r = read_mesh(ss);
    CHECK(r.nodes == m.nodes);
    CHECK(r.element_region == m.element_region);
    REQUIRE(r.regions.size() == m.regions.size());
    for (std::size_t i = 0; i < r.regions.size(); ++i) {
        CHECK(r.regions[i].kind == m.regions[i].kind);
        CHECK(r.regions[i].lamination == m.regions[i].lamination);
    }
    std::stringstream bad("# lamhb mesh v1\nregions 1\nlaminate 0\nnodes 2\n0\n");
    CHECK_THROWS(read_mesh(bad));
}

TEST_CASE("assembled operators") {
    StackGeometry g{2, 5e-4, 2e-5, 0.0};
    const auto m = build_stack_mesh(g, MeshRefinement::uniform(1e-4));
    const auto mat = linear_materials(g);
    const auto sigma = element_conductivity(m, mat);
    const auto mass = assemble_mass(m, sigma);
    const std::vector<double> ones(m.n_nodes(), 1.0);
    double total = 0.0;
    for (double v : mass.apply(ones)) total += v;
    CHECK(total == doctest::Approx(mat.sigma * 2 * g.d).epsilon(1e-12));
    const auto k = assemble_stiffness(m, element_nu_linear(m, mat, 400.0));
    for (double v : k.apply(ones)) CHECK(std::abs(v) < 1e-6);
    const auto cons = lamination_constraints(m, sigma);
    REQUIRE(cons.size() == 2);
    double s = 0.0;
    for (double v : cons[1].w) s += v;
    CHECK(s == doctest::Approx(cons[1].sigma_d));
    CHECK(cons[1].sigma_d == doctest::Approx(mat.sigma * g.d));
}

TEST_CASE("phasor oracle reproduces the closed-form lamination loss") {
    StackGeometry g{1, 5e-4, 0.0, 0.0};
    const auto m = build_stack_mesh(g, MeshRefinement::uniform(g.d / 400));
    const auto mat = linear_materials(g);
    for (double f : {50.0, 1e3, 1e4}) {
        const double omega = 2 * M_PI * f;
        const auto sol = oracle::linear_phasor(m, element_nu_linear(m, mat, 400.0), element_conductivity(m, mat), omega,
                                               cplx{1000.0, 0.0});
        const double ref = analytic::eddy_loss_density_linear(1000.0, mat.sigma, g.d,
                                                              analytic::skin_depth(400.0, mat.sigma, omega)) *
                           g.d;
        CHECK(sol.loss == doctest::Approx(ref).epsilon(1e-3));
    }
}

TEST_CASE("linear transient settles onto the phasor solution of the same mesh") {
    StackGeometry g{2, 5e-4, 1e-5, 0.0};
    const auto m = build_stack_mesh(g, MeshRefinement::uniform(g.d / 24));
    const auto mat = linear_materials(g);
    Drive drive;
    drive.h_ac = 800.0;
    drive.f = 1e3;
    const auto sol = oracle::linear_phasor(m, element_nu_linear(m, mat, 400.0), element_conductivity(m, mat),
                                           drive.omega(), cplx{drive.h_ac, 0.0});
    TransientOptions opt;
    opt.steps_per_period = 2000;
    opt.n_periods = default_period_count(mat, g.d, drive.f);
    opt.record_periods = 1;
    const auto r = transient_solve(m, mat, drive, opt);
    CHECK(compute_losses_transient(r) == doctest::Approx(sol.loss).epsilon(5e-3));

    // field at the last sample, relative L2 over elements
    const double t = r.t.back();
    const cplx rot = std::exp(cplx{0.0, drive.omega() * t});
    double num = 0.0, den = 0.0;
    for (std::size_t e = 0; e < m.n_elements(); ++e) {
        const double ref = (sol.b[e] * rot).real();
        num += std::pow(r.b.back()[e] - ref, 2) * m.element_length(e);
        den += std::pow(std::abs(sol.b[e]), 2) * m.element_length(e);
    }
    CHECK(std::sqrt(num / den) < 0.01);
}

TEST_CASE("implicit Euler loss error is first order in the step") {
    StackGeometry g{1, 5e-4, 0.0, 0.0};
    const auto m = build_stack_mesh(g, MeshRefinement::uniform(g.d / 16));
    const auto mat = linear_materials(g);
    Drive drive;
    drive.h_ac = 500.0;
    drive.f = 2e3;
    const double ref = oracle::linear_phasor(m, element_nu_linear(m, mat, 400.0), element_conductivity(m, mat),
                                             drive.omega(), cplx{drive.h_ac, 0.0})
                           .loss;
    std::vector<double> err;
    for (int steps : {100, 200, 400}) {
        TransientOptions opt;
        opt.steps_per_period = steps;
        opt.n_periods = default_period_count(mat, g.d, drive.f);
        opt.record_periods = 1;
        err.push_back(std::abs(compute_losses_transient(transient_solve(m, mat, drive, opt)) - ref));
    }
    for (std::size_t i = 1; i < err.size(); ++i) {
        const double order = std::log2(err[i - 1] / err[i]);
        CHECK(order > 0.9);
        CHECK(order < 1.1);
    }
}

TEST_CASE("magnetostatic solution of a dc drive") {
    StackGeometry g{2, 5e-4, 2e-5, 0.0};
    const auto m = build_stack_mesh(g, MeshRefinement::uniform(1e-4));
    const auto mat = linear_materials(g, 500.0);
    Drive drive;
    drive.h_dc = 300.0;
    const auto a = static_solve(m, mat, drive);
    for (std::size_t e = 0; e < m.n_elements(); ++e) {
        const double b = (a[e + 1] - a[e]) / m.element_length(e);
        const bool lam = m.region_of(e).kind == RegionKind::laminate;
        CHECK(b == doctest::Approx(300.0 / (lam ? 500.0 : kNuVacuum)).epsilon(1e-9));
    }
    // nonlinear law: every laminate element sits on H = h_dc
    Materials steel(BHCurve(cold_rolled_steel(), CurveMode::modified_brauer), 10.4e6, kNuVacuum, g);
    drive.h_dc = 2000.0;
    const auto an = static_solve(m, steel, drive);
    for (auto e : m.lamination_elements(0)) {
        const double b = (an[e + 1] - an[e]) / m.element_length(e);
        CHECK(steel.curve.field(b) == doctest::Approx(2000.0).epsilon(1e-8));
    }
}

TEST_CASE("zero drive gives a zero solution") {
    StackGeometry g{1, 5e-4, 0.0, 0.0};
    const auto m = build_stack_mesh(g, MeshRefinement::uniform(1e-4));
    Materials steel(BHCurve(cold_rolled_steel(), CurveMode::modified_brauer), 10.4e6, kNuVacuum, g);
    Drive drive;
    TransientOptions opt;
    opt.steps_per_period = 20;
    opt.n_periods = 2;
    const auto r = transient_solve(m, steel, drive, opt);
    CHECK(compute_losses_transient(r) == 0.0);
    for (double e : compute_energy_transient(r, m, steel)) CHECK(e == 0.0);
}

TEST_CASE("nonlinear transient: Newton and Picard agree and the energy is bounded") {
    StackGeometry g{1, 5e-4, 0.0, 0.0};
    const auto m = build_stack_mesh(g, MeshRefinement::uniform(g.d / 16));
    Materials steel(BHCurve(cold_rolled_steel(), CurveMode::modified_brauer), 10.4e6, kNuVacuum, g);
    Drive drive;
    drive.h_dc = 200.0;
    drive.h_ac = 400.0;
    drive.f = 200.0;
    TransientOptions opt;
    opt.steps_per_period = 100;
    opt.n_periods = 3;
    opt.tol = 1e-6;
    const auto rn = transient_solve(m, steel, drive, opt);
    opt.method = NonlinearMethod::picard;
    opt.max_iter = 500;
    const auto rp = transient_solve(m, steel, drive, opt);
    CHECK(compute_losses_transient(rn) == doctest::Approx(compute_losses_transient(rp)).epsilon(1e-4));
    const auto flux = average_flux_density(rn, m, 0);
    CHECK(flux.b_max > 0.5);
    CHECK(flux.b_max < 2.0);
    for (double e : compute_energy_transient(rn, m, steel)) CHECK(e >= 0.0);
}
