#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lamhb/analytic.hpp"
#include "lamhb/hbsolver.hpp"
#include "lamhb/transient.hpp"
#include "oracles.hpp"

using namespace lamhb;

namespace {

BHCurve steel() { return BHCurve(cold_rolled_steel(), CurveMode::modified_brauer); }

Drive ac(double h, double f) {
    Drive d;
    d.h_ac = h;
    d.f = f;
    return d;
}

std::vector<double> element_nu(const Mesh1D& m, const Materials& mat, double nu) {
    std::vector<double> out;
    for (std::size_t e = 0; e < m.n_elements(); ++e) {
        out.push_back(m.region_of(e).kind == RegionKind::laminate ? nu : linear_element_reluctivity(m, mat, e));
    }
    return out;
}

}  // namespace

TEST_CASE("harmonic sets") {
    CHECK(HarmonicSet{5, Parity::odd_only}.orders() == std::vector<int>{1, 3, 5});
    CHECK(HarmonicSet{3, Parity::all}.orders() == std::vector<int>{0, 1, 2, 3});
    CHECK(HarmonicSet{5, Parity::odd_only}.contains(3));
    CHECK_FALSE(HarmonicSet{5, Parity::odd_only}.contains(2));
    CHECK_THROWS(HarmonicSet{0, Parity::all}.validate());
    CHECK(solver_mode_from_string(to_string(SolverMode::hom_naive_dc)) == SolverMode::hom_naive_dc);
    CHECK(parity_from_string("odd_only") == Parity::odd_only);
    CHECK_THROWS(solver_mode_from_string("hom"));
}

TEST_CASE("linear homogenized loss equals the closed-form lamination loss") {
    StackGeometry g{3, 5e-4, 0.0, 0.0};
    Materials mat(BHCurve::linear(400.0), 10.4e6, kNuVacuum, g);
    const auto mesh = build_homogenized_mesh(g, 6);
    for (auto mode : {SolverMode::hom_original, SolverMode::hom_naive_dc}) {
        for (double f : {50.0, 1e3, 1e4}) {
            SolverOptions opt;
            opt.mode = mode;
            const auto sol = hb_solve(mesh, mat, ac(700.0, f), HarmonicSet{3, Parity::odd_only}, opt);
            const double ref =
                3 * g.d * analytic::eddy_loss_density_linear(700.0, mat.sigma, g.d, analytic::skin_depth(400.0, mat.sigma, 2 * M_PI * f));
            CHECK(sol.converged);
            CHECK(sol.loss == doctest::Approx(ref).epsilon(1e-8));
        }
    }
}

TEST_CASE("linear resolved solve equals the dense phasor oracle") {
    StackGeometry g{2, 5e-4, 1e-5, 0.0};
    Materials mat(BHCurve::linear(400.0), 10.4e6, kNuVacuum, g);
    const auto mesh = build_stack_mesh(g, MeshRefinement::uniform(g.d / 20));
    const Drive drive = ac(900.0, 2e3);
    SolverOptions opt;
    const auto sol = hb_solve(mesh, mat, drive, HarmonicSet{1, Parity::odd_only}, opt);
    const auto ref = oracle::linear_phasor(mesh, element_nu(mesh, mat, 400.0), element_conductivity(mesh, mat),
                                           drive.omega(), cplx{drive.h_ac, 0.0});
    // two-sided coefficient: the phasor is twice the order-1 entry
    for (std::size_t i = 0; i < mesh.n_nodes(); ++i) {
        CHECK(std::abs(2.0 * sol.a[1][i] - ref.a[i]) < 1e-9 * std::abs(ref.a.back()));
    }
    CHECK(sol.loss == doctest::Approx(ref.loss).epsilon(1e-9));
    CHECK(sol.dofs == mesh.n_nodes() - 1);  // nodal unknowns per harmonic
}

TEST_CASE("dc and ac parts superpose for a linear material") {
    StackGeometry g{2, 5e-4, 0.0, 0.0};
    Materials mat(BHCurve::linear(400.0), 10.4e6, kNuVacuum, g);
    const auto mesh = build_homogenized_mesh(g, 4);
    SolverOptions opt;
    opt.mode = SolverMode::hom_naive_dc;
    Drive d = ac(500.0, 400.0);
    const auto a = hb_solve(mesh, mat, d, HarmonicSet{3, Parity::all}, opt);
    d.h_dc = 800.0;
    const auto b = hb_solve(mesh, mat, d, HarmonicSet{3, Parity::all}, opt);
    CHECK(b.loss == doctest::Approx(a.loss).epsilon(1e-10));
    CHECK(b.b[0][0].real() == doctest::Approx(800.0 / 400.0).epsilon(1e-10));
}

TEST_CASE("symmetric ac drive produces no even harmonics") {
    StackGeometry g{1, 5e-4, 0.0, 0.0};
    Materials mat(steel(), 10.4e6, kNuVacuum, g);
    const auto mesh = build_stack_mesh(g, MeshRefinement::uniform(g.d / 12));
    SolverOptions opt;
    opt.tol_energy = 1e-8;
    opt.max_iter = 400;
    const auto sol = hb_solve(mesh, mat, ac(600.0, 200.0), HarmonicSet{4, Parity::all}, opt);
    double odd = 0.0, even = 0.0;
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        odd = std::max({odd, std::abs(sol.b[1][e]), std::abs(sol.b[3][e])});
        even = std::max({even, std::abs(sol.b[0][e]), std::abs(sol.b[2][e]), std::abs(sol.b[4][e])});
    }
    CHECK(even < 1e-10 * odd);
    // the third harmonic is present for a nonlinear law
    double third = 0.0;
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) third = std::max(third, std::abs(sol.b[3][e]));
    CHECK(third > 1e-3 * odd);
}

TEST_CASE("results do not depend on the thread count") {
    StackGeometry g{2, 5e-4, 1e-5, 0.0};
    Materials mat(steel(), 10.4e6, kNuVacuum, g);
    const auto mesh = build_stack_mesh(g, MeshRefinement::uniform(g.d / 10));
    Drive d = ac(300.0, 500.0);
    d.h_dc = 300.0;
    SolverOptions opt;
    opt.max_iter = 400;
    const auto s1 = hb_solve(mesh, mat, d, HarmonicSet{3, Parity::all}, opt);
    opt.threads = 4;
    const auto s4 = hb_solve(mesh, mat, d, HarmonicSet{3, Parity::all}, opt);
    CHECK(s1.iterations == s4.iterations);
    CHECK(s1.loss == s4.loss);
    for (std::size_t n = 0; n < s1.a.size(); ++n) CHECK(s1.a[n] == s4.a[n]);
}

TEST_CASE("time reconstruction of the harmonic solution") {
    StackGeometry g{1, 5e-4, 0.0, 0.0};
    Materials mat(steel(), 10.4e6, kNuVacuum, g);
    const auto mesh = build_stack_mesh(g, MeshRefinement::uniform(g.d / 8));
    Drive d = ac(400.0, 100.0);
    d.h_dc = 100.0;
    SolverOptions opt;
    const auto sol = hb_solve(mesh, mat, d, HarmonicSet{3, Parity::all}, opt);
    const double omega = d.omega();
    for (double t : {0.0, 1.3e-3, 7.7e-3}) {
        std::vector<cplx> c;
        for (const auto& bn : sol.b) c.push_back(bn[2]);
        CHECK(reconstruct_time_signal(sol, 2, t) == doctest::Approx(evaluate_series(c, omega, t)).epsilon(1e-12));
        const double a = reconstruct_node_signal(sol, 3, t);
        CHECK(std::isfinite(a));
    }
    // periodic in T
    CHECK(reconstruct_time_signal(sol, 1, 2e-3) == doctest::Approx(reconstruct_time_signal(sol, 1, 2e-3 + d.period())));
    // energy is positive and its series is periodic
    const auto e = hb_energy_series(sol, mesh, mat, {0.0, d.period()});
    CHECK(e[0] > 0.0);
    CHECK(e[0] == doctest::Approx(e[1]).epsilon(1e-10));
}

TEST_CASE("nonlinear harmonic balance approaches the transient reference") {
    StackGeometry g{1, 5e-4, 0.0, 0.0};
    Materials mat(steel(), 10.4e6, kNuVacuum, g);
    const auto mesh = build_stack_mesh(g, MeshRefinement::uniform(g.d / 16));
    const Drive d = ac(400.0, 100.0);
    SolverOptions opt;
    opt.tol_energy = 1e-7;
    opt.max_iter = 400;
    const auto sol = hb_solve(mesh, mat, d, HarmonicSet{7, Parity::odd_only}, opt);
    TransientOptions topt;
    topt.steps_per_period = 1000;
    topt.n_periods = default_period_count(mat, g.d, d.f);
    topt.record_periods = 1;
    const double ref = compute_losses_transient(transient_solve(mesh, mat, d, topt));
    CHECK(sol.loss == doctest::Approx(ref).epsilon(0.02));
}

TEST_CASE("input validation") {
    StackGeometry g{1, 5e-4, 0.0, 0.0};
    Materials mat(steel(), 10.4e6, kNuVacuum, g);
    const auto hom = build_homogenized_mesh(g, 4);
    const auto fine = build_stack_mesh(g, MeshRefinement::uniform(1e-4));
    SolverOptions opt;
    opt.mode = SolverMode::hom_refined_dc;
    CHECK_THROWS_AS(hb_solve(hom, mat, ac(100.0, 50.0), HarmonicSet{3, Parity::all}, opt), std::invalid_argument);
    opt.mode = SolverMode::hom_original;
    Drive dc = ac(100.0, 50.0);
    dc.h_dc = 50.0;
    CHECK_THROWS_AS(hb_solve(hom, mat, dc, HarmonicSet{3, Parity::all}, opt), std::invalid_argument);
    opt.mode = SolverMode::fine_hbfem;
    CHECK_THROWS_AS(hb_solve(hom, mat, ac(100.0, 50.0), HarmonicSet{3, Parity::all}, opt), std::invalid_argument);
    CHECK_THROWS_AS(hb_solve(fine, mat, dc, HarmonicSet{3, Parity::odd_only}, opt), std::invalid_argument);
    opt.n_time_samples = 16;
    CHECK_THROWS_AS(hb_solve(fine, mat, ac(100.0, 50.0), HarmonicSet{3, Parity::all}, opt), std::invalid_argument);
}

TEST_CASE("non-convergence reports the iteration trace") {
    StackGeometry g{1, 5e-4, 0.0, 0.0};
    Materials mat(steel(), 10.4e6, kNuVacuum, g);
    const auto mesh = build_stack_mesh(g, MeshRefinement::uniform(g.d / 8));
    SolverOptions opt;
    opt.max_iter = 2;
    opt.tol_energy = 1e-12;
    try {
        (void)hb_solve(mesh, mat, ac(3000.0, 1e3), HarmonicSet{5, Parity::odd_only}, opt);
        FAIL("expected a convergence error");
    } catch (const HbConvergenceError& e) {
        CHECK(e.trace().size() == 2);
    }
}
