#pragma once

// Scenario harness: runs the resolved transient reference and the requested
// harmonic-balance modes per frequency and tabulates the deviations.

#include <optional>
#include <string>
#include <vector>

#include "lamhb/hbsolver.hpp"
#include "lamhb/transient.hpp"

namespace lamhb {

struct OracleSettings {
    double skin_depth_fraction = 0.25;  // laminate element size / skin depth at nu_in
    int min_elements = 16;              // per laminate
    TransientOptions transient{};       // n_periods <= 0 picks default_period_count
};

/// Drive scaling pre-pass: h_dc = s, h_ac = ac_dc_ratio * s, with s chosen
/// so that the reference's peak laminate-average flux at `f` hits target_b.
struct Calibration {
    double target_b = 1.5;
    double ac_dc_ratio = 0.2;
    double f = 50.0;
    double rel_tol = 1e-3;  // on the flux density
    int max_evaluations = 60;
};

struct CalibrationResult {
    double h_dc = 0.0;
    double h_ac = 0.0;
    double b_avg_max = 0.0;
    int evaluations = 0;
};

struct MeshLadder {
    std::vector<int> resolved;     // elements per laminate, uniform
    std::vector<int> homogenized;  // elements across the stack
};

struct DofStudySettings {
    double f = 10000.0;
    MeshLadder ladder;
    SolverMode mode = SolverMode::hom_refined_dc;
};

struct Scenario {
    std::string name = "scenario";
    StackGeometry geometry{};
    BHCurve curve = BHCurve(cold_rolled_steel(), CurveMode::modified_brauer);
    double sigma = 10.4e6;
    double nu_ins = kNuVacuum;
    Drive drive{};
    std::vector<double> freqs;
    std::vector<SolverMode> modes;
    HarmonicSet set{};
    SolverOptions solver{};  // mode is set per cell
    int hom_elements = 20;   // homogenized mesh of the stack
    OracleSettings oracle{};
    std::optional<Calibration> calibration;
    std::optional<DofStudySettings> dof_study;  // adds convergence.csv
    std::string output_dir;  // empty: nothing written
    std::string config_hash = "none";
    bool timestamp = false;
    int threads = 1;  // concurrent frequency cells

    [[nodiscard]] Materials materials() const;
    void validate() const;
};

struct EnergyError {
    double max_pct = 0.0;
    double avg_pct = 0.0;
    int skipped = 0;  // samples with zero reference energy
};

/// Pointwise |w - w_ref| / w_ref over a common grid.
EnergyError energy_error_series(const std::vector<double>& w, const std::vector<double>& w_ref);

/// Harmonic-balance energy sampled on the final recorded period of the reference.
EnergyError energy_error_series(const HarmonicSolution& sol, const Mesh1D& hb_mesh, const Materials& mat,
                                const TransientResult& ref, const Mesh1D& ref_mesh,
                                std::vector<double>* w_hb = nullptr, std::vector<double>* w_ref = nullptr);

/// 100 |p - p_ref| / p_ref; 0 when both vanish.
double loss_error_pct(double p, double p_ref);

struct ModeCell {
    SolverMode mode = SolverMode::fine_hbfem;
    bool ok = false;
    std::string error;
    double loss = 0.0;  // W/m^2
    double loss_err_pct = 0.0;
    double loss_err_signed_pct = 0.0;
    EnergyError energy;
    std::size_t dofs = 0;
    int iterations = 0;
    int lut_clamps = 0;
    double b_avg_max = 0.0;  // peak laminate-average flux, max over elements
    double wall_s = 0.0;
    std::vector<double> energy_series;  // on the reference's final period
    std::vector<double> profile;        // |B| at the profile points
};

struct OracleCell {
    bool ok = false;
    std::string error;
    double loss = 0.0;
    std::size_t dofs = 0;
    int n_periods = 0;
    double b_avg_max = 0.0;
    double wall_s = 0.0;
    std::vector<double> t;             // final period
    std::vector<double> energy_series;
    std::vector<double> profile_z;     // laminate element midpoints
    std::vector<double> profile;       // |B| at the last sample
};

struct FrequencyRow {
    double f = 0.0;
    OracleCell oracle;
    std::vector<ModeCell> modes;
};

struct DofStudyRow {
    std::string kind;  // "transient" or a solver mode
    int level = 0;
    std::size_t dofs = 0;
    double loss = 0.0;
    bool ok = false;
};

struct DofStudy {
    double f = 0.0;
    std::vector<DofStudyRow> rows;

    /// DoFs of the first mesh (by increasing DoFs) within `tol` of the
    /// finest result of that kind; 0 if none succeeded.
    [[nodiscard]] std::size_t converged_dofs(const std::string& kind, double tol = 0.02) const;
};

struct ComparisonReport {
    std::string name;
    std::string config_hash;
    Drive drive;
    std::optional<CalibrationResult> calibration;
    std::vector<FrequencyRow> rows;
    std::optional<DofStudy> dof_study;

    [[nodiscard]] const ModeCell* find(double f, SolverMode mode) const;
};

/// Peak laminate-average flux over all laminations of a reference run.
double reference_peak_flux(const TransientResult& r, const Mesh1D& mesh, int n_laminations);

/// Resolved stack mesh following the oracle settings at frequency f.
Mesh1D reference_mesh(const Scenario& s, double f);

TransientResult run_reference(const Scenario& s, const Mesh1D& mesh, const Drive& drive);

CalibrationResult calibrate_drive(const Scenario& s);

/// Runs every cell. Solver failures are recorded in the cells; the report
/// files are written when s.output_dir is set.
ComparisonReport run_scenario(const Scenario& s);

void write_report(const ComparisonReport& rep, const Scenario& s, const std::string& dir);

DofStudy dof_convergence_study(const Scenario& s, double f, const MeshLadder& ladder, SolverMode hom_mode);

void write_convergence_csv(const DofStudy& study, const std::string& path, const std::string& header);

}  // namespace lamhb
