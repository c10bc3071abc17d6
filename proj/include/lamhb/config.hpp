#pragma once

// Run configuration (JSON, schema "lamhb/v1"). Every block is optional and
// falls back to the library defaults; unknown keys are rejected with a
// ConfigError whose path names the key, e.g. "/solver/relaxaton".

#include <optional>
#include <string>
#include <vector>

#include "lamhb/bench.hpp"
#include "lamhb/lut.hpp"

namespace lamhb {

inline constexpr const char* kConfigSchema = "lamhb/v1";

struct MaterialConfig {
    CurveMode mode = CurveMode::modified_brauer;
    BrauerParams brauer = cold_rolled_steel();
    double nu_linear = 400.0;  // linear mode only
    double sigma = 10.4e6;
    double nu_ins = kNuVacuum;

    [[nodiscard]] BHCurve curve() const;
};

struct MeshConfig {
    double skin_depth_fraction = 0.25;
    int min_elements = 16;
    int hom_elements = 20;
};

struct LutConfig {
    std::string path;
    std::vector<double> freqs;
    std::vector<double> levels;  // empty: default drive ladder per frequency
    int n_levels = 12;
    double b_lo = 0.1;
    double b_hi = 1.9;
    LutGenerationOptions generation{};
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::vector<double> freqs;
    std::vector<SolverMode> modes;
    std::optional<Calibration> calibration;
    std::optional<DofStudySettings> dof_study;
};

struct RunConfig {
    MaterialConfig material;
    StackGeometry geometry{};
    Drive drive{};
    MeshConfig mesh;
    HarmonicSet set{};
    SolverOptions solver{};
    TransientOptions transient{};
    LutConfig lut;
    ScenarioConfig scenario;
    std::string output_dir = "out";

    std::string canonical;  // normalized JSON text of the input
    std::string hash;       // FNV-1a of `canonical`

    [[nodiscard]] Materials materials() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Scenario for the bench harness (the table, if any, must already be attached).
Scenario make_scenario(const RunConfig& cfg, int threads, bool timestamp);

}  // namespace lamhb
