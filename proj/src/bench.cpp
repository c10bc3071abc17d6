#include "lamhb/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lamhb/io.hpp"
#include "lamhb/parallel.hpp"

namespace lamhb {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double series_at(const std::vector<cplx>& c, double omega, double t) {
    double v = c.empty() ? 0.0 : c[0].real();
    for (std::size_t n = 1; n < c.size(); ++n) {
        v += 2.0 * (c[n] * std::exp(cplx{0.0, static_cast<double>(n) * omega * t})).real();
    }
    return v;
}

Mesh1D hb_mesh_for(const Scenario& s, SolverMode mode, const Mesh1D& ref_mesh) {
    if (!is_homogenized(mode)) return ref_mesh;
    return build_homogenized_mesh(s.geometry, s.hom_elements, s.geometry.padding > 0.0 ? 1 : 0);
}

std::vector<double> hb_profile(const HarmonicSolution& sol, const Mesh1D& mesh, const Materials& mat,
                               const Scenario& s, const std::vector<double>& z, double t) {
    const double omega = 2.0 * M_PI * sol.f;
    std::vector<double> out;
    out.reserve(z.size());
    const double period = s.geometry.d + s.geometry.d_ins;
    const double z0 = -0.5 * s.geometry.stack_thickness();
    for (double zi : z) {
        if (is_homogenized(sol.mode)) {
            int k = static_cast<int>(std::floor((zi - z0) / period));
            k = std::clamp(k, 0, s.geometry.n_laminations - 1);
            const double zl = zi - (z0 + (k + 0.5) * period);
            out.push_back(std::abs(series_at(local_profile_lamination(sol, mesh, mat, k, zl), omega, t)));
        } else {
            const auto it = std::upper_bound(mesh.nodes.begin(), mesh.nodes.end(), zi);
            auto e = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, std::distance(mesh.nodes.begin(), it) - 1));
            e = std::min(e, mesh.n_elements() - 1);
            out.push_back(std::abs(reconstruct_time_signal(sol, e, t)));
        }
    }
    return out;
}

TransientOptions reference_options(const Scenario& s, const Materials& mat, double f) {
    auto o = s.oracle.transient;
    if (o.n_periods <= 0) o.n_periods = default_period_count(mat, s.geometry.d, f);
    o.record_periods = 1;
    return o;
}

}  // namespace

Materials Scenario::materials() const { return Materials(curve, sigma, nu_ins, geometry); }

void Scenario::validate() const {
    geometry.validate();
    if (freqs.empty()) throw std::invalid_argument("scenario needs at least one frequency");
    if (modes.empty()) throw std::invalid_argument("scenario needs at least one solver mode");
    for (double f : freqs) {
        if (!(f > 0.0)) throw std::invalid_argument("scenario frequencies must be > 0");
    }
    set.validate();
    for (auto m : modes) {
        auto o = solver;
        o.mode = m;
        o.validate(set);
    }
    if (hom_elements < 1) throw std::invalid_argument("hom_elements must be >= 1");
    if (!(oracle.skin_depth_fraction > 0.0) || oracle.min_elements < 1) {
        throw std::invalid_argument("invalid oracle mesh settings");
    }
    if (calibration) {
        if (!(calibration->target_b > 0.0) || !(calibration->ac_dc_ratio >= 0.0) || !(calibration->f > 0.0)) {
            throw std::invalid_argument("invalid calibration settings");
        }
    }
}

EnergyError energy_error_series(const std::vector<double>& w, const std::vector<double>& w_ref) {
    if (w.size() != w_ref.size()) throw std::invalid_argument("energy series lengths differ");
    EnergyError e;
    double sum = 0.0;
    int used = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w_ref[i] == 0.0) {
            ++e.skipped;
            continue;
        }
        const double r = 100.0 * std::abs(w[i] - w_ref[i]) / std::abs(w_ref[i]);
        e.max_pct = std::max(e.max_pct, r);
        sum += r;
        ++used;
    }
    e.avg_pct = used > 0 ? sum / used : 0.0;
    return e;
}

EnergyError energy_error_series(const HarmonicSolution& sol, const Mesh1D& hb_mesh, const Materials& mat,
                                const TransientResult& ref, const Mesh1D& ref_mesh, std::vector<double>* w_hb,
                                std::vector<double>* w_ref) {
    const auto n = static_cast<std::size_t>(ref.steps_per_period);
    if (ref.n_samples() < n) throw std::invalid_argument("reference holds less than one period");
    const auto w_all = compute_energy_transient(ref, ref_mesh, mat);
    std::vector<double> t(ref.t.end() - n, ref.t.end());
    std::vector<double> wr(w_all.end() - n, w_all.end());
    auto wh = hb_energy_series(sol, hb_mesh, mat, t);
    auto e = energy_error_series(wh, wr);
    if (w_hb) *w_hb = std::move(wh);
    if (w_ref) *w_ref = std::move(wr);
    return e;
}

double loss_error_pct(double p, double p_ref) {
    if (p_ref == 0.0) return p == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return 100.0 * std::abs(p - p_ref) / std::abs(p_ref);
}

const ModeCell* ComparisonReport::find(double f, SolverMode mode) const {
    for (const auto& row : rows) {
        if (std::abs(row.f - f) > 1e-9 * std::max(1.0, std::abs(f))) continue;
        for (const auto& c : row.modes) {
            if (c.mode == mode) return &c;
        }
    }
    return nullptr;
}

double reference_peak_flux(const TransientResult& r, const Mesh1D& mesh, int n_laminations) {
    double b = 0.0;
    for (int k = 0; k < n_laminations; ++k) b = std::max(b, average_flux_density(r, mesh, k).b_max);
    return b;
}

Mesh1D reference_mesh(const Scenario& s, double f) {
    return build_stack_mesh(s.geometry, MeshRefinement::skin_depth(f, s.curve.initial_reluctivity(), s.sigma,
                                                                   s.oracle.skin_depth_fraction,
                                                                   s.oracle.min_elements));
}

TransientResult run_reference(const Scenario& s, const Mesh1D& mesh, const Drive& drive) {
    const auto mat = s.materials();
    return transient_solve(mesh, mat, drive, reference_options(s, mat, drive.f));
}

CalibrationResult calibrate_drive(const Scenario& s) {
    if (!s.calibration) throw std::invalid_argument("scenario has no calibration block");
    const auto& c = *s.calibration;
    const auto mesh = reference_mesh(s, c.f);
    Drive drive = s.drive;
    drive.f = c.f;
    CalibrationResult res;
    auto peak = [&](double scale) {
        drive.h_dc = scale;
        drive.h_ac = c.ac_dc_ratio * scale;
        ++res.evaluations;
        return reference_peak_flux(run_reference(s, mesh, drive), mesh, s.geometry.n_laminations);
    };
    // bracket in log space, then bisect
    double lo = 1.0;
    double hi = 1.0;
    double b = peak(hi);
    while (b < c.target_b) {
        lo = hi;
        hi *= 4.0;
        if (res.evaluations >= c.max_evaluations || hi > 1e9) {
            throw NumericalError("calibration could not reach the target flux density", b);
        }
        b = peak(hi);
    }
    if (lo == hi) {
        while (b > c.target_b && lo > 1e-6) {
            hi = lo;
            lo *= 0.25;
            b = peak(lo);
        }
    }
    double mid = hi;
    double b_mid = b;
    while (res.evaluations < c.max_evaluations) {
        mid = std::sqrt(lo * hi);
        b_mid = peak(mid);
        if (std::abs(b_mid - c.target_b) <= c.rel_tol * c.target_b) break;
        (b_mid < c.target_b ? lo : hi) = mid;
    }
    if (std::abs(b_mid - c.target_b) > c.rel_tol * c.target_b) {
        throw NumericalError("calibration did not converge", b_mid);
    }
    res.h_dc = mid;
    res.h_ac = c.ac_dc_ratio * mid;
    res.b_avg_max = b_mid;
    return res;
}

ComparisonReport run_scenario(const Scenario& s) {
    s.validate();
    ComparisonReport rep;
    rep.name = s.name;
    rep.config_hash = s.config_hash;
    rep.drive = s.drive;
    if (s.calibration) {
        rep.calibration = calibrate_drive(s);
        rep.drive.h_dc = rep.calibration->h_dc;
        rep.drive.h_ac = rep.calibration->h_ac;
    }
    const auto mat = s.materials();
    rep.rows.resize(s.freqs.size());
    parallel_for(s.freqs.size(), s.threads, [&](std::size_t i) {
        FrequencyRow& row = rep.rows[i];
        row.f = s.freqs[i];
        Drive drive = rep.drive;
        drive.f = row.f;
        const auto ref_mesh = reference_mesh(s, row.f);
        TransientResult ref;
        auto t0 = std::chrono::steady_clock::now();
        try {
            ref = run_reference(s, ref_mesh, drive);
            row.oracle.loss = compute_losses_transient(ref);
            row.oracle.ok = true;
        } catch (const std::exception& e) {
            row.oracle.error = e.what();
        }
        row.oracle.wall_s = seconds_since(t0);
        row.oracle.dofs = ref_mesh.n_nodes() - 1;
        for (auto m : s.modes) {
            ModeCell c;
            c.mode = m;
            row.modes.push_back(std::move(c));
        }
        if (!row.oracle.ok) {
            for (auto& c : row.modes) c.error = "reference failed";
            return;
        }
        row.oracle.n_periods = ref.n_periods;
        row.oracle.b_avg_max = reference_peak_flux(ref, ref_mesh, s.geometry.n_laminations);
        const auto n = static_cast<std::size_t>(ref.steps_per_period);
        row.oracle.t.assign(ref.t.end() - n, ref.t.end());
        const auto w_all = compute_energy_transient(ref, ref_mesh, mat);
        row.oracle.energy_series.assign(w_all.end() - n, w_all.end());
        const double t_snap = ref.t.back();
        for (std::size_t e = 0; e < ref_mesh.n_elements(); ++e) {
            if (ref_mesh.region_of(e).kind != RegionKind::laminate) continue;
            row.oracle.profile_z.push_back(0.5 * (ref_mesh.nodes[e] + ref_mesh.nodes[e + 1]));
            row.oracle.profile.push_back(std::abs(ref.b.back()[e]));
        }

        for (auto& cell : row.modes) {
            t0 = std::chrono::steady_clock::now();
            try {
                const auto mesh = hb_mesh_for(s, cell.mode, ref_mesh);
                auto opt = s.solver;
                opt.mode = cell.mode;
                opt.threads = 1;
                const auto sol = hb_solve(mesh, mat, drive, s.set, opt);
                cell.loss = sol.loss;
                cell.loss_err_pct = loss_error_pct(sol.loss, row.oracle.loss);
                cell.loss_err_signed_pct =
                    row.oracle.loss != 0.0 ? 100.0 * (sol.loss - row.oracle.loss) / row.oracle.loss : 0.0;
                cell.energy_series = hb_energy_series(sol, mesh, mat, row.oracle.t);
                cell.energy = energy_error_series(cell.energy_series, row.oracle.energy_series);
                cell.dofs = sol.dofs;
                cell.iterations = sol.iterations;
                cell.lut_clamps = sol.lut_clamps;
                cell.b_avg_max = sol.b_avg_max.empty()
                                     ? 0.0
                                     : *std::max_element(sol.b_avg_max.begin(), sol.b_avg_max.end());
                cell.profile = hb_profile(sol, mesh, mat, s, row.oracle.profile_z, t_snap);
                cell.ok = true;
            } catch (const HbConvergenceError& e) {
                cell.error = e.what();
                cell.iterations = static_cast<int>(e.trace().size());
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            cell.wall_s = seconds_since(t0);
        }
    });
    if (s.dof_study) {
        // the study runs at the calibrated drive
        Scenario sd = s;
        sd.drive = rep.drive;
        rep.dof_study = dof_convergence_study(sd, s.dof_study->f, s.dof_study->ladder, s.dof_study->mode);
    }
    if (!s.output_dir.empty()) write_report(rep, s, s.output_dir);
    return rep;
}

namespace {

std::string freq_tag(double f) {
    std::ostringstream os;
    os << f;
    return os.str();
}

std::string report_preamble(const ComparisonReport& rep, const Scenario& s, const std::string& kind) {
    std::ostringstream os;
    os << csv_header(kind, rep.config_hash, s.timestamp) << '\n';
    os << "# scenario=" << rep.name << "; boundary=" << to_string(rep.drive.boundary)
       << "; h_dc=" << fmt_double(rep.drive.h_dc) << "; h_ac=" << fmt_double(rep.drive.h_ac) << '\n';
    if (rep.calibration) {
        os << "# calibration: target_b=" << fmt_double(s.calibration->target_b)
           << "; ac_dc_ratio=" << fmt_double(s.calibration->ac_dc_ratio)
           << "; f=" << fmt_double(s.calibration->f) << "; b_avg_max=" << fmt_double(rep.calibration->b_avg_max)
           << "; evaluations=" << rep.calibration->evaluations << '\n';
    }
    if (s.solver.lut) {
        os << "# lut:";
        for (const auto& [k, v] : s.solver.lut->settings) os << ' ' << k << '=' << v << ';';
        os << '\n';
    }
    return os.str();
}

}  // namespace

void write_report(const ComparisonReport& rep, const Scenario& s, const std::string& dir) {
    ensure_directory(dir);
    {
        std::ostringstream os;
        os << report_preamble(rep, s, "report");
        os << "f_hz,mode,status,loss_w_per_m2,loss_err_pct,loss_err_signed_pct,energy_max_err_pct,"
              "energy_avg_err_pct,energy_skipped,dofs,iterations,lut_clamps,b_avg_max_t,wall_s\n";
        auto wall = [&](double w) { return s.timestamp ? fmt_double(w) : std::string("-"); };
        for (const auto& row : rep.rows) {
            const auto& o = row.oracle;
            os << fmt_double(row.f) << ",transient," << (o.ok ? "ok" : "failed") << ',' << fmt_double(o.loss)
               << ",0,0,0,0,0," << o.dofs << ',' << o.n_periods << ",0," << fmt_double(o.b_avg_max) << ','
               << wall(o.wall_s) << '\n';
            for (const auto& c : row.modes) {
                os << fmt_double(row.f) << ',' << to_string(c.mode) << ',' << (c.ok ? "ok" : "failed") << ','
                   << fmt_double(c.loss) << ',' << fmt_double(c.loss_err_pct) << ','
                   << fmt_double(c.loss_err_signed_pct) << ',' << fmt_double(c.energy.max_pct) << ','
                   << fmt_double(c.energy.avg_pct) << ',' << c.energy.skipped << ',' << c.dofs << ','
                   << c.iterations << ',' << c.lut_clamps << ',' << fmt_double(c.b_avg_max) << ','
                   << wall(c.wall_s) << '\n';
            }
            for (const auto& c : row.modes) {
                if (!c.ok) os << "# " << fmt_double(row.f) << ' ' << to_string(c.mode) << ": " << c.error << '\n';
            }
            if (!o.ok) os << "# " << fmt_double(row.f) << " transient: " << o.error << '\n';
        }
        write_text_file(dir + "/report.csv", os.str());
    }
    for (const auto& row : rep.rows) {
        if (!row.oracle.ok) continue;
        const std::string tag = freq_tag(row.f);
        std::ostringstream pr;
        pr << report_preamble(rep, s, "profile") << "# t=" << fmt_double(row.oracle.t.back()) << '\n' << "z_m,b_ref";
        for (const auto& c : row.modes) pr << ",b_" << to_string(c.mode);
        pr << '\n';
        for (std::size_t i = 0; i < row.oracle.profile_z.size(); ++i) {
            pr << fmt_double(row.oracle.profile_z[i]) << ',' << fmt_double(row.oracle.profile[i]);
            for (const auto& c : row.modes) pr << ',' << (c.ok ? fmt_double(c.profile[i]) : std::string("nan"));
            pr << '\n';
        }
        write_text_file(dir + "/profiles_" + tag + ".csv", pr.str());

        std::ostringstream en;
        en << report_preamble(rep, s, "energy") << "t_s,w_ref";
        for (const auto& c : row.modes) en << ",w_" << to_string(c.mode);
        en << '\n';
        for (std::size_t i = 0; i < row.oracle.t.size(); ++i) {
            en << fmt_double(row.oracle.t[i]) << ',' << fmt_double(row.oracle.energy_series[i]);
            for (const auto& c : row.modes) en << ',' << (c.ok ? fmt_double(c.energy_series[i]) : std::string("nan"));
            en << '\n';
        }
        write_text_file(dir + "/energy_" + tag + ".csv", en.str());
    }
    if (rep.dof_study) {
        write_convergence_csv(*rep.dof_study, dir + "/convergence.csv",
                              report_preamble(rep, s, "convergence"));
    }
}

std::size_t DofStudy::converged_dofs(const std::string& kind, double tol) const {
    std::vector<const DofStudyRow*> rs;
    for (const auto& r : rows) {
        if (r.kind == kind && r.ok) rs.push_back(&r);
    }
    if (rs.empty()) return 0;
    std::sort(rs.begin(), rs.end(), [](auto* a, auto* b) { return a->dofs < b->dofs; });
    const double finest = rs.back()->loss;
    for (auto* r : rs) {
        if (loss_error_pct(r->loss, finest) <= 100.0 * tol) return r->dofs;
    }
    return rs.back()->dofs;
}

DofStudy dof_convergence_study(const Scenario& s, double f, const MeshLadder& ladder, SolverMode hom_mode) {
    if (ladder.resolved.size() < 4 || ladder.homogenized.size() < 4) {
        throw std::invalid_argument("mesh ladder needs at least 4 meshes per kind");
    }
    const auto mat = s.materials();
    Drive drive = s.drive;
    drive.f = f;
    DofStudy study;
    study.f = f;
    const std::size_t n_res = ladder.resolved.size();
    study.rows.resize(n_res + ladder.homogenized.size());
    parallel_for(study.rows.size(), s.threads, [&](std::size_t i) {
        auto& row = study.rows[i];
        try {
            if (i < n_res) {
                row.kind = "transient";
                row.level = ladder.resolved[i];
                const auto mesh =
                    build_stack_mesh(s.geometry, MeshRefinement::uniform(s.geometry.d / row.level));
                row.dofs = mesh.n_nodes() - 1;
                row.loss = compute_losses_transient(run_reference(s, mesh, drive));
            } else {
                row.kind = to_string(hom_mode);
                row.level = ladder.homogenized[i - n_res];
                const auto mesh =
                    build_homogenized_mesh(s.geometry, row.level, s.geometry.padding > 0.0 ? 1 : 0);
                auto opt = s.solver;
                opt.mode = hom_mode;
                opt.threads = 1;
                const auto sol = hb_solve(mesh, mat, drive, s.set, opt);
                row.dofs = sol.dofs;
                row.loss = sol.loss;
            }
            row.ok = true;
        } catch (const std::exception&) {
            row.ok = false;
        }
    });
    return study;
}

void write_convergence_csv(const DofStudy& study, const std::string& path, const std::string& header) {
    std::ostringstream os;
    os << header << "# f=" << fmt_double(study.f) << '\n' << "kind,level,dofs,loss_w_per_m2,status\n";
    for (const auto& r : study.rows) {
        os << r.kind << ',' << r.level << ',' << r.dofs << ',' << fmt_double(r.loss) << ','
           << (r.ok ? "ok" : "failed") << '\n';
    }
    write_text_file(path, os.str());
}

}  // namespace lamhb
