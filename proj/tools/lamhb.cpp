// lamhb command-line driver.
//
//   lamhb lut-gen       --config cfg.json [--out dir] [--threads n]
//   lamhb run-transient --config cfg.json
//   lamhb run-hb        --config cfg.json
//   lamhb scenario      --config cfg.json
//   lamhb selftest
//
// Exit codes: 0 ok, 1 numerical failure, 2 config error, 3 I/O error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lamhb/analytic.hpp"
#include "lamhb/bench.hpp"
#include "lamhb/config.hpp"
#include "lamhb/errors.hpp"
#include "lamhb/homog.hpp"
#include "lamhb/io.hpp"
#include "lamhb/lut.hpp"
#include "lamhb/parallel.hpp"

using namespace lamhb;
using namespace lamhb::analytic;

namespace {

struct Flags {
    std::string config;
    std::string out;
    int threads = 1;
    bool no_timestamp = false;
    bool verbose = false;
};

Flags g_flags;

void note(const std::string& msg) {
    if (g_flags.verbose) std::cerr << "lamhb: " << msg << '\n';
}

int fail(int code, const std::string& message, const nlohmann::json& context = nlohmann::json::object()) {
    nlohmann::json j{{"code", code}, {"message", message}, {"context", context}};
    std::cerr << j.dump() << '\n';
    return code;
}

RunConfig load() {
    if (g_flags.config.empty()) throw ConfigError("--config", "a config file is required");
    if (!std::filesystem::exists(g_flags.config)) throw IoError("config file not found: " + g_flags.config);
    auto cfg = load_config(g_flags.config);
    if (!g_flags.out.empty()) cfg.output_dir = g_flags.out;
    return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) { return cfg.output_dir + "/" + name; }

std::string header(const RunConfig& cfg, const std::string& kind) {
    return csv_header(kind, cfg.hash, !g_flags.no_timestamp) + "\n";
}

void write_summary(const RunConfig& cfg, const nlohmann::json& summary) {
    write_text_file(out_path(cfg, "summary.json"), summary.dump(2) + "\n");
}

std::vector<double> lut_frequencies(const RunConfig& cfg) {
    if (!cfg.lut.freqs.empty()) return cfg.lut.freqs;
    std::vector<double> f = cfg.scenario.freqs;
    if (cfg.scenario.dof_study) f.push_back(cfg.scenario.dof_study->f);
    if (f.empty()) f.push_back(cfg.drive.f);
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    return f;
}

LookupTable build_lut(const RunConfig& cfg) {
    const auto curve = cfg.material.curve();
    auto opt = cfg.lut.generation;
    opt.threads = resolve_threads(g_flags.threads);
    const auto freqs = lut_frequencies(cfg);
    std::map<double, std::vector<double>> levels;
    for (double f : freqs) {
        if (!cfg.lut.levels.empty()) {
            levels[f] = cfg.lut.levels;
        } else {
            note("drive ladder at f = " + fmt_double(f));
            levels[f] = default_drive_ladder(curve, cfg.material.sigma, cfg.geometry.d, f, opt, cfg.lut.n_levels,
                                             cfg.lut.b_lo, cfg.lut.b_hi);
        }
    }
    std::vector<std::string> warnings;
    auto lut = generate_lut(curve, cfg.material.sigma, cfg.geometry.d, freqs, levels, opt, &warnings);
    for (const auto& w : warnings) std::cerr << "lamhb: warning: " << w << '\n';
    return lut;
}

std::shared_ptr<const LookupTable> attach_lut(const RunConfig& cfg, bool needed) {
    if (!needed) return nullptr;
    if (cfg.lut.path.empty()) throw ConfigError("/lut/path", "hom_refined_dc needs a look-up table path");
    if (!std::filesystem::exists(cfg.lut.path)) throw IoError("look-up table not found: " + cfg.lut.path);
    auto lut = std::make_shared<LookupTable>(load_lut(cfg.lut.path));
    const auto curve = cfg.material.curve();
    for (const auto& m : lut_metadata_mismatches(*lut, cfg.material.sigma, cfg.geometry.d, curve.hash())) {
        std::cerr << "lamhb: warning: " << m << '\n';
    }
    return lut;
}

int cmd_lut_gen() {
    const auto cfg = load();
    ensure_directory(cfg.output_dir);
    const auto lut = build_lut(cfg);
    const std::string path = cfg.lut.path.empty() ? out_path(cfg, "lut.csv") : cfg.lut.path;
    save_lut(lut, path);
    note("wrote " + path);
    return 0;
}

int cmd_run_transient() {
    const auto cfg = load();
    ensure_directory(cfg.output_dir);
    const auto mat = cfg.materials();
    const auto mesh = build_stack_mesh(
        cfg.geometry, MeshRefinement::skin_depth(cfg.drive.f, mat.curve.initial_reluctivity(), mat.sigma,
                                                 cfg.mesh.skin_depth_fraction, cfg.mesh.min_elements));
    auto opt = cfg.transient;
    if (opt.n_periods <= 0) opt.n_periods = default_period_count(mat, cfg.geometry.d, cfg.drive.f);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = transient_solve(mesh, mat, cfg.drive, opt);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double loss = compute_losses_transient(r);
    std::ofstream os(out_path(cfg, "transient.csv"));
    if (!os) throw IoError("cannot write " + out_path(cfg, "transient.csv"));
    write_transient_csv(os, r, header(cfg, "transient"));
    nlohmann::json s{{"command", "run-transient"},
                     {"config", cfg.hash},
                     {"f_hz", cfg.drive.f},
                     {"n_periods", r.n_periods},
                     {"steps_per_period", r.steps_per_period},
                     {"dofs", mesh.n_nodes() - 1},
                     {"loss_w_per_m2", loss},
                     {"b_avg_max_t", reference_peak_flux(r, mesh, cfg.geometry.n_laminations)}};
    if (!g_flags.no_timestamp) s["wall_s"] = wall;
    write_summary(cfg, s);
    note("loss " + fmt_double(loss) + " W/m^2");
    return 0;
}

int cmd_run_hb() {
    const auto cfg = load();
    ensure_directory(cfg.output_dir);
    const auto mat = cfg.materials();
    auto opt = cfg.solver;
    opt.threads = resolve_threads(g_flags.threads);
    opt.lut = attach_lut(cfg, opt.mode == SolverMode::hom_refined_dc);
    const auto mesh = is_homogenized(opt.mode)
                          ? build_homogenized_mesh(cfg.geometry, cfg.mesh.hom_elements, cfg.geometry.padding > 0.0)
                          : build_stack_mesh(cfg.geometry,
                                             MeshRefinement::skin_depth(cfg.drive.f, mat.curve.initial_reluctivity(),
                                                                        mat.sigma, cfg.mesh.skin_depth_fraction,
                                                                        cfg.mesh.min_elements));
    const auto t0 = std::chrono::steady_clock::now();
    HarmonicSolution sol;
    try {
        sol = hb_solve(mesh, mat, cfg.drive, cfg.set, opt);
    } catch (const HbConvergenceError& e) {
        std::ofstream tr(out_path(cfg, "trace.csv"));
        write_trace_csv(tr, e.trace(), header(cfg, "trace"));
        throw;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
        std::ofstream os(out_path(cfg, "solution.csv"));
        if (!os) throw IoError("cannot write " + out_path(cfg, "solution.csv"));
        write_solution_csv(os, sol, header(cfg, "solution"));
        std::ofstream tr(out_path(cfg, "trace.csv"));
        write_trace_csv(tr, sol.trace, header(cfg, "trace"));
    }
    nlohmann::json s{{"command", "run-hb"},
                     {"config", cfg.hash},
                     {"mode", to_string(sol.mode)},
                     {"f_hz", sol.f},
                     {"m", sol.set.m},
                     {"parity", to_string(sol.set.parity)},
                     {"dofs", sol.dofs},
                     {"iterations", sol.iterations},
                     {"lut_clamps", sol.lut_clamps},
                     {"loss_w_per_m2", sol.loss},
                     {"energy_j_per_m2", sol.energy}};
    if (!g_flags.no_timestamp) s["wall_s"] = wall;
    write_summary(cfg, s);
    note("loss " + fmt_double(sol.loss) + " W/m^2 after " + std::to_string(sol.iterations) + " iterations");
    return 0;
}

int cmd_scenario() {
    const auto cfg = load();
    if (cfg.scenario.freqs.empty()) throw ConfigError("/scenario/freqs", "at least one frequency is required");
    if (cfg.scenario.modes.empty()) throw ConfigError("/scenario/modes", "at least one solver mode is required");
    ensure_directory(cfg.output_dir);
    auto s = make_scenario(cfg, resolve_threads(g_flags.threads), !g_flags.no_timestamp);
    bool refined = std::find(s.modes.begin(), s.modes.end(), SolverMode::hom_refined_dc) != s.modes.end();
    if (s.dof_study && s.dof_study->mode == SolverMode::hom_refined_dc) refined = true;
    if (refined) {
        if (!cfg.lut.path.empty() && std::filesystem::exists(cfg.lut.path)) {
            s.solver.lut = attach_lut(cfg, true);
        } else {
            note("generating look-up table");
            auto lut = build_lut(cfg);
            const std::string path = cfg.lut.path.empty() ? out_path(cfg, "lut.csv") : cfg.lut.path;
            save_lut(lut, path);
            s.solver.lut = std::make_shared<LookupTable>(std::move(lut));
        }
    }
    note("running scenario " + s.name);
    const auto rep = run_scenario(s);
    int failed = 0;
    for (const auto& row : rep.rows) {
        if (!row.oracle.ok) ++failed;
        for (const auto& c : row.modes) failed += c.ok ? 0 : 1;
    }
    note("wrote " + cfg.output_dir + "/report.csv (" + std::to_string(failed) + " failed cells)");
    return 0;
}

// Composite Gauss-Legendre (5 points) on [a, b].
template <class F>
auto integrate(F f, double a, double b, int panels) {
    static const double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                0.9061798459386640};
    static const double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                0.2369268850561891};
    const double h = (b - a) / panels;
    decltype(f(a)) sum{};
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h;
        for (int i = 0; i < 5; ++i) sum += w[i] * f(c + 0.5 * h * x[i]);
    }
    return sum * (0.5 * h);
}

int cmd_selftest() {
    std::mt19937_64 rng(20240601);
    auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto logu = [&](double lo, double hi) { return std::exp(uni(std::log(lo), std::log(hi))); };
    int failures = 0;
    auto report = [&](const std::string& name, double worst, double tol) {
        const bool ok = worst <= tol;
        std::printf("%-44s %s  (worst %.3e, tol %.0e)\n", name.c_str(), ok ? "PASS" : "FAIL", worst, tol);
        failures += ok ? 0 : 1;
    };

    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto p = HomogenizationParams::from_thicknesses(logu(1e-4, 2e-3), logu(1e-7, 1e-4), logu(1e6, 6e7),
                                                        kNuVacuum);
        const double nu = logu(100.0, 1e4);
        const double omega = 2.0 * M_PI * logu(1.0, 1e5);
        for (auto corr : {InsulationCorrection::off, InsulationCorrection::on}) {
            const double delta = frame_skin_depth(p, nu, omega, corr);
            const auto w = ModifiedWavenumbers::from_depths(delta, delta);
            const cplx a = modified_reluctivity_xy(p, nu, omega, w, corr);
            const cplx b = original_reluctivity_xy(p, nu, omega, corr);
            worst = std::max(worst, std::abs(a - b) / std::abs(b));
        }
    }
    report("modified tensor with linear depths = original", worst, 1e-12);

    worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto p = HomogenizationParams::from_thicknesses(logu(1e-4, 2e-3), logu(1e-7, 1e-4), logu(1e6, 6e7),
                                                        kNuVacuum);
        const double nu = logu(100.0, 1e4);
        const auto frame = tensor_frame(p, nu, InsulationCorrection::on);
        // omega with d_frame / delta = 1e-4
        const double omega = 2.0 * frame.nu / (frame.sigma * std::pow(frame.d / 1e-4, 2));
        const cplx a = original_reluctivity_xy(p, nu, omega, InsulationCorrection::on);
        const double s = mixed_reluctivity_xy(p, nu);
        worst = std::max(worst, std::abs(a - s) / s);
    }
    report("original tensor -> dc mixture at d/delta = 1e-4", worst, 1e-6);

    worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double d = logu(1e-4, 2e-3);
        const cplx b{uni(-2.0, 2.0), uni(-2.0, 2.0)};
        const double ratio = logu(0.01, 10.0);
        const cplx k = wavenumber(d / ratio);
        const cplx avg = integrate([&](double z) { return local_flux_from_average_k(b, z, k, d); }, -0.5 * d,
                                   0.5 * d, 64) / d;
        worst = std::max(worst, std::abs(avg - b) / std::abs(b));
    }
    report("local flux transform keeps the average", worst, 1e-10);

    worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double d = logu(1e-4, 2e-3);
        const double sigma = logu(1e6, 6e7);
        const double delta = d * logu(0.05, 20.0);
        const double h0 = logu(1.0, 1e4);
        const LinearProfileParams prof{cplx{h0, 0.0}, wavenumber(delta), d};
        const double q = integrate([&](double z) { return std::norm(linear_J_profile(z, prof)); }, -0.5 * d,
                                   0.5 * d, 256) / (2.0 * sigma * d);
        const double p = eddy_loss_density_linear(h0, sigma, d, delta);
        worst = std::max(worst, std::abs(p - q) / q);
    }
    report("loss-density formula = current quadrature", worst, 1e-8);

    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lamhb: harmonic-balance eddy-current solver for laminated stacks"};
    app.require_subcommand(1);
    auto add_common = [](CLI::App* c, bool needs_config) {
        auto* opt = c->add_option("--config", g_flags.config, "JSON run configuration");
        if (needs_config) opt->required();
        c->add_option("--out", g_flags.out, "output directory (overrides output_dir)");
        c->add_option("--threads", g_flags.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
        c->add_flag("--no-timestamp", g_flags.no_timestamp, "omit timestamps and wall times from outputs");
        c->add_flag("--verbose", g_flags.verbose, "progress messages on stderr");
    };
    auto* lut = app.add_subcommand("lut-gen", "generate the skin-depth look-up table");
    auto* tr = app.add_subcommand("run-transient", "time-stepping reference solve");
    auto* hb = app.add_subcommand("run-hb", "harmonic-balance solve");
    auto* sc = app.add_subcommand("scenario", "reference vs harmonic-balance comparison");
    auto* st = app.add_subcommand("selftest", "analytic identity checks");
    for (auto* c : {lut, tr, hb, sc}) add_common(c, true);
    add_common(st, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(2, e.what(), {{"path", "argv"}});
    }

    try {
        if (lut->parsed()) return cmd_lut_gen();
        if (tr->parsed()) return cmd_run_transient();
        if (hb->parsed()) return cmd_run_hb();
        if (sc->parsed()) return cmd_scenario();
        if (st->parsed()) return cmd_selftest();
    } catch (const ConfigError& e) {
        return fail(2, e.what(), {{"path", e.path()}});
    } catch (const HbConvergenceError& e) {
        return fail(1, e.what(), {{"iterations", e.trace().size()}, {"last", e.last_residual()}});
    } catch (const NumericalError& e) {
        return fail(1, e.what(), {{"last", e.last_residual()}});
    } catch (const IoError& e) {
        return fail(3, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(2, e.what());
    } catch (const std::exception& e) {
        return fail(1, e.what());
    }
    return 0;
}
