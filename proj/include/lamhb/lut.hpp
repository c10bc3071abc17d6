#pragma once

// Per-frequency table mapping the peak laminate-average flux density to a
// loss-equivalent field skin depth delta_H.

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lamhb/material.hpp"
#include "lamhb/transient.hpp"

namespace lamhb {

struct LutEntry {
    double b_avg_max;  // T
    double delta_h;    // m
};

struct LookupTable {
    double sigma = 0.0;
    double d = 0.0;
    std::string material_hash;
    std::vector<std::pair<std::string, std::string>> settings;
    std::map<double, std::vector<LutEntry>> entries;  // keyed by frequency, Hz

    [[nodiscard]] std::vector<double> frequencies() const;

    /// Entries of the tabulated frequency matching f to 1e-9 relative;
    /// throws std::out_of_range listing the available frequencies.
    [[nodiscard]] const std::vector<LutEntry>& at(double f) const;

    /// Throws std::invalid_argument if an invariant is broken.
    void validate() const;
};

struct LutLookup {
    double delta_h;
    bool clamped;
};

/// Piecewise-linear in b_avg_max, clamped to the end points.
LutLookup lookup_delta_h(const LookupTable& lut, double f, double b_avg_max);

struct LutGenerationOptions {
    double dc_ratio = 0.0;  // h_dc = dc_ratio * level (0: ac-only drive)
    int steps_per_period = 400;
    int min_elements = 32;          // per lamination
    double skin_depth_fraction = 0.25;
    int n_periods = 0;              // 0: default_period_count
    int threads = 1;
};

/// Depth delta with eddy_loss_density_linear(h0, sigma, d, delta) = p,
/// bisection on [d/1e3, 1e3 d]; returns false when p is not bracketed.
bool invert_loss_density(double p, double h0, double sigma, double d, double& delta);

/// One table row per (f, level); rows whose root is not bracketed (or that
/// break monotonicity in b_avg_max) are dropped with a message in `warnings`.
LookupTable generate_lut(const BHCurve& curve, double sigma, double d, const std::vector<double>& freqs,
                         const std::map<double, std::vector<double>>& levels,
                         const LutGenerationOptions& opt, std::vector<std::string>* warnings = nullptr);

LookupTable generate_lut(const BHCurve& curve, double sigma, double d, const std::vector<double>& freqs,
                         const std::vector<double>& levels, const LutGenerationOptions& opt,
                         std::vector<std::string>* warnings = nullptr);

/// Simulated peak average flux density of a single lamination under an ac
/// field of amplitude `level`.
double lamination_peak_flux(const BHCurve& curve, double sigma, double d, double f, double level,
                            const LutGenerationOptions& opt);

/// `n` drive amplitudes whose peak average flux spans about [b_lo, b_hi],
/// found by a coarse scan; geometric spacing in amplitude.
std::vector<double> default_drive_ladder(const BHCurve& curve, double sigma, double d, double f,
                                         const LutGenerationOptions& opt, int n = 12, double b_lo = 0.1,
                                         double b_hi = 1.9);

void write_lut(std::ostream& os, const LookupTable& lut);
LookupTable read_lut(std::istream& is);
void save_lut(const LookupTable& lut, const std::string& path);
LookupTable load_lut(const std::string& path);

/// Human-readable mismatches between table metadata and the run.
std::vector<std::string> lut_metadata_mismatches(const LookupTable& lut, double sigma, double d,
                                                 const std::string& material_hash);

}  // namespace lamhb
