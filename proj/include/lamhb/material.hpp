#pragma once

// Single-valued (anhysteretic) B-H laws used throughout the solver stack.

#include <functional>
#include <optional>
#include <string>
#include <utility>

namespace lamhb {

inline constexpr double kMu0 = 4.0e-7 * 3.14159265358979323846;
inline constexpr double kNuVacuum = 1.0 / kMu0;

/// Below this flux density H/B is replaced by its analytic limit.
inline constexpr double kFluxEpsilon = 1e-12;

struct BrauerParams {
    double k1 = 3.8;     // m/H
    double k2 = 2.17;    // 1/T^2
    double k3 = 396.2;   // m/H
    double nu_vac = kNuVacuum;

    void validate() const;
};

/// Cold rolled steel constants (k1 = 3.8 m/H, k2 = 2.17 T^-2, k3 = 396.2 m/H).
BrauerParams cold_rolled_steel();

struct PowerLawParams {
    double k = 1.0;  // T (m/A)^(1/n)
    double n = 2.0;

    /// H = (B / k)^n
    [[nodiscard]] double field(double b) const;
};

enum class CurveMode { linear, brauer, modified_brauer };

std::string to_string(CurveMode mode);
CurveMode curve_mode_from_string(const std::string& s);

double brauer_H(double b, const BrauerParams& p);

/// Root of dH/dB = nu_vac, bracketed on [1e-3, 10] T.
double saturation_flux_density(const BrauerParams& p);

class BHCurve {
public:
    /// Brauer or modified Brauer law; modified mode requires a saturation point.
    BHCurve(const BrauerParams& params, CurveMode mode);

    /// Linear material H = nu * B.
    static BHCurve linear(double nu);

    [[nodiscard]] CurveMode mode() const { return mode_; }
    [[nodiscard]] const BrauerParams& params() const { return params_; }
    [[nodiscard]] std::optional<double> b_sat() const { return b_sat_; }
    [[nodiscard]] bool is_linear() const { return mode_ == CurveMode::linear; }

    /// Reluctivity at vanishing flux, k1 + k3 (or nu for linear).
    [[nodiscard]] double initial_reluctivity() const;

    [[nodiscard]] double field(double b) const;
    [[nodiscard]] double reluctivity(double b) const;
    [[nodiscard]] double differential_reluctivity(double b) const;
    /// w(B) = integral of H dB' from 0 to B (energy, not co-energy).
    [[nodiscard]] double energy_density(double b) const;

    /// Stable identifier of the law and its parameters, used in file headers.
    [[nodiscard]] std::string hash() const;

private:
    BHCurve() = default;

    BrauerParams params_{};
    CurveMode mode_ = CurveMode::linear;
    std::optional<double> b_sat_;
    double nu_linear_ = 0.0;
};

double modified_brauer_H(double b, const BHCurve& curve);

/// Log-log least squares fit of H(B) over [b_lo, b_hi].
PowerLawParams fit_power_law(const std::function<double(double)>& h_of_b,
                             std::pair<double, double> b_range,
                             int samples = 200);
PowerLawParams fit_power_law(const BHCurve& curve, std::pair<double, double> b_range,
                             int samples = 200);

}  // namespace lamhb
