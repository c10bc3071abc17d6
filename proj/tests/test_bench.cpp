#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "lamhb/bench.hpp"
#include "lamhb/io.hpp"

using namespace lamhb;
namespace fs = std::filesystem;

namespace {

Scenario tiny(const std::string& out) {
    Scenario s;
    s.name = "tiny";
    s.geometry = StackGeometry{2, 5e-4, 1e-5, 0.0};
    s.drive.h_dc = 100.0;
    s.drive.h_ac = 150.0;
    s.freqs = {50.0, 400.0};
    s.modes = {SolverMode::fine_hbfem, SolverMode::hom_naive_dc};
    s.set = HarmonicSet{3, Parity::all};
    s.solver.max_iter = 400;
    s.hom_elements = 4;
    s.oracle.min_elements = 8;
    s.oracle.transient.steps_per_period = 64;
    s.output_dir = out;
    return s;
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("lamhb_bench_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("energy error of identical series is zero") {
    const std::vector<double> w{1.0, 2.0, 3.0};
    const auto e = energy_error_series(w, w);
    CHECK(e.max_pct == 0.0);
    CHECK(e.avg_pct == 0.0);
    CHECK(e.skipped == 0);
}

TEST_CASE("energy error of a uniform 5 percent offset") {
    const std::vector<double> ref{1.0, 2.0, 4.0, 8.0};
    std::vector<double> w;
    for (double v : ref) w.push_back(1.05 * v);
    const auto e = energy_error_series(w, ref);
    CHECK(e.max_pct == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(e.avg_pct == doctest::Approx(5.0).epsilon(1e-12));
    // max and mean differ when the offset varies
    const auto f = energy_error_series({1.1, 2.0}, {1.0, 2.0});
    CHECK(f.max_pct == doctest::Approx(10.0));
    CHECK(f.avg_pct == doctest::Approx(5.0));
    CHECK_THROWS_AS(energy_error_series({1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("zero reference energy samples are skipped") {
    const auto e = energy_error_series({0.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
    CHECK(e.max_pct == 0.0);
    CHECK(e.avg_pct == 0.0);
    CHECK(e.skipped == 3);
    const auto g = energy_error_series({0.0, 1.2}, {0.0, 1.0});
    CHECK(g.skipped == 1);
    CHECK(g.max_pct == doctest::Approx(20.0));
}

TEST_CASE("loss error") {
    CHECK(loss_error_pct(0.0, 0.0) == 0.0);
    CHECK(loss_error_pct(11.0, 10.0) == doctest::Approx(10.0));
    CHECK(loss_error_pct(9.0, 10.0) == doctest::Approx(10.0));
    CHECK(std::isinf(loss_error_pct(1.0, 0.0)));
}

TEST_CASE("zero drive scenario reports zero losses and errors") {
    auto s = tiny("");
    s.drive = Drive{};
    s.drive.f = 50.0;
    s.freqs = {50.0};
    s.modes = {SolverMode::hom_naive_dc};
    const auto rep = run_scenario(s);
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].oracle.ok);
    CHECK(rep.rows[0].oracle.loss == 0.0);
    const auto* c = rep.find(50.0, SolverMode::hom_naive_dc);
    REQUIRE(c != nullptr);
    CHECK(c->ok);
    CHECK(c->loss == 0.0);
    CHECK(c->loss_err_pct == 0.0);
    CHECK(c->energy.max_pct == 0.0);
}

TEST_CASE("scenario run writes every report file") {
    const auto dir = scratch("files");
    auto s = tiny(dir.string());
    s.dof_study = DofStudySettings{400.0, MeshLadder{{1, 2, 4, 8}, {1, 2, 4, 8}}, SolverMode::hom_naive_dc};
    const auto rep = run_scenario(s);
    for (const auto& row : rep.rows) {
        CHECK(row.oracle.ok);
        for (const auto& c : row.modes) {
            CHECK(c.ok);
            CHECK(c.loss > 0.0);
        }
    }
    // the resolved harmonic-balance solve tracks the transient closely
    const auto* fine = rep.find(400.0, SolverMode::fine_hbfem);
    REQUIRE(fine != nullptr);
    CHECK(fine->loss_err_pct < 5.0);

    for (const char* f : {"report.csv", "profiles_50.csv", "profiles_400.csv", "energy_50.csv", "energy_400.csv",
                          "convergence.csv"}) {
        const auto p = dir / f;
        REQUIRE(fs::exists(p));
        const auto text = read_text_file(p.string());
        CHECK(text.rfind("# lamhb v1; kind=", 0) == 0);
        CHECK(text.find("created=") == std::string::npos);
    }
    const auto report = read_text_file((dir / "report.csv").string());
    CHECK(report.find("f_hz,mode,status,loss_w_per_m2,loss_err_pct") != std::string::npos);
    CHECK(report.find("hom_naive_dc") != std::string::npos);
    REQUIRE(rep.dof_study.has_value());
    CHECK(rep.dof_study->converged_dofs("transient") > 0);
    CHECK(rep.dof_study->converged_dofs("hom_naive_dc") > 0);
    fs::remove_all(dir);
}

TEST_CASE("reports are reproducible") {
    const auto a = scratch("rep_a"), b = scratch("rep_b");
    auto s = tiny(a.string());
    s.freqs = {400.0};
    (void)run_scenario(s);
    s.output_dir = b.string();
    s.threads = 2;
    (void)run_scenario(s);
    for (const char* f : {"report.csv", "profiles_400.csv", "energy_400.csv"}) {
        CHECK(read_text_file((a / f).string()) == read_text_file((b / f).string()));
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("drive calibration hits the target flux") {
    auto s = tiny("");
    s.calibration = Calibration{1.2, 0.5, 50.0, 1e-3, 60};
    const auto c = calibrate_drive(s);
    CHECK(c.b_avg_max == doctest::Approx(1.2).epsilon(1e-3));
    CHECK(c.h_ac == doctest::Approx(0.5 * c.h_dc).epsilon(1e-12));
    s.drive.h_dc = c.h_dc;
    s.drive.h_ac = c.h_ac;
    s.drive.f = 50.0;
    const auto mesh = reference_mesh(s, 50.0);
    const auto r = run_reference(s, mesh, s.drive);
    CHECK(reference_peak_flux(r, mesh, 2) == doctest::Approx(c.b_avg_max).epsilon(1e-12));
}

TEST_CASE("invalid scenarios are rejected") {
    auto s = tiny("");
    s.freqs.clear();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = tiny("");
    s.modes.clear();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = tiny("");
    s.modes = {SolverMode::hom_refined_dc};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("header helpers") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(csv_header("report", "abc", false) == "# lamhb v1; kind=report; config=abc");
    CHECK(csv_header("report", "abc", true).find("; created=") != std::string::npos);
    CHECK(fmt_double(0.1) == "0.10000000000000001");
}
