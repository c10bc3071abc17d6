#include "lamhb/material.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace lamhb {

void BrauerParams::validate() const {
    if (!(k1 > 0.0) || !(k2 > 0.0) || !(k3 >= 0.0) || !(nu_vac > 0.0)) {
        throw std::invalid_argument("Brauer parameters require k1 > 0, k2 > 0, k3 >= 0, nu_vac > 0");
    }
}

BrauerParams cold_rolled_steel() { return BrauerParams{3.8, 2.17, 396.2, kNuVacuum}; }

double PowerLawParams::field(double b) const { return std::pow(b / k, n); }

std::string to_string(CurveMode mode) {
    switch (mode) {
        case CurveMode::linear: return "linear";
        case CurveMode::brauer: return "brauer";
        case CurveMode::modified_brauer: return "modified_brauer";
    }
    return "unknown";
}

CurveMode curve_mode_from_string(const std::string& s) {
    if (s == "linear") return CurveMode::linear;
    if (s == "brauer") return CurveMode::brauer;
    if (s == "modified_brauer") return CurveMode::modified_brauer;
    throw std::invalid_argument("unknown curve mode '" + s + "'");
}

namespace {

void require_nonnegative(double b) {
    if (!(b >= 0.0)) throw std::domain_error("flux density magnitude must be >= 0");
}

double brauer_slope(double b, const BrauerParams& p) {
    const double e = p.k1 * std::exp(p.k2 * b * b);
    return e * (1.0 + 2.0 * p.k2 * b * b) + p.k3;
}

// Closed-form integral of the Brauer law from 0 to b.
double brauer_energy(double b, const BrauerParams& p) {
    return p.k1 * std::expm1(p.k2 * b * b) / (2.0 * p.k2) + 0.5 * p.k3 * b * b;
}

}  // namespace

double brauer_H(double b, const BrauerParams& p) {
    require_nonnegative(b);
    return (p.k1 * std::exp(p.k2 * b * b) + p.k3) * b;
}

double saturation_flux_density(const BrauerParams& p) {
    p.validate();
    double lo = 1e-3;
    double hi = 10.0;
    auto g = [&](double b) { return brauer_slope(b, p) - p.nu_vac; };
    if (g(lo) >= 0.0) {
        throw std::domain_error("material is not ferromagnetic: dH/dB >= nu_vac at small B");
    }
    if (g(hi) <= 0.0) {
        throw std::domain_error("no saturation point: dH/dB stays below nu_vac on [1e-3, 10] T");
    }
    // relative tolerance 1e-10 on b_sat; bisection keeps the bracket on the exponential
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

BHCurve::BHCurve(const BrauerParams& params, CurveMode mode) : params_(params), mode_(mode) {
    if (mode == CurveMode::linear) {
        throw std::invalid_argument("use BHCurve::linear for linear materials");
    }
    params_.validate();
    if (mode == CurveMode::modified_brauer) {
        b_sat_ = saturation_flux_density(params_);
    } else {
        try {
            b_sat_ = saturation_flux_density(params_);
        } catch (const std::domain_error&) {
            b_sat_.reset();
        }
    }
}

BHCurve BHCurve::linear(double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("linear reluctivity must be > 0");
    BHCurve c;
    c.mode_ = CurveMode::linear;
    c.nu_linear_ = nu;
    c.params_ = BrauerParams{};
    return c;
}

double BHCurve::initial_reluctivity() const {
    return mode_ == CurveMode::linear ? nu_linear_ : params_.k1 + params_.k3;
}

double modified_brauer_H(double b, const BHCurve& curve) {
    require_nonnegative(b);
    if (!curve.b_sat()) throw std::logic_error("curve has no saturation point");
    const double bs = *curve.b_sat();
    const auto& p = curve.params();
    if (b <= bs) return brauer_H(b, p);
    return brauer_H(bs, p) + p.nu_vac * (b - bs);
}

double BHCurve::field(double b) const {
    require_nonnegative(b);
    switch (mode_) {
        case CurveMode::linear: return nu_linear_ * b;
        case CurveMode::brauer: return brauer_H(b, params_);
        case CurveMode::modified_brauer: return modified_brauer_H(b, *this);
    }
    return 0.0;
}

double BHCurve::reluctivity(double b) const {
    require_nonnegative(b);
    if (b <= kFluxEpsilon) return initial_reluctivity();
    return field(b) / b;
}

double BHCurve::differential_reluctivity(double b) const {
    require_nonnegative(b);
    switch (mode_) {
        case CurveMode::linear: return nu_linear_;
        case CurveMode::brauer: return brauer_slope(b, params_);
        case CurveMode::modified_brauer:
            return b > *b_sat_ ? params_.nu_vac : brauer_slope(b, params_);
    }
    return 0.0;
}

double BHCurve::energy_density(double b) const {
    require_nonnegative(b);
    switch (mode_) {
        case CurveMode::linear: return 0.5 * nu_linear_ * b * b;
        case CurveMode::brauer: return brauer_energy(b, params_);
        case CurveMode::modified_brauer: {
            const double bs = *b_sat_;
            if (b <= bs) return brauer_energy(b, params_);
            const double db = b - bs;
            return brauer_energy(bs, params_) + brauer_H(bs, params_) * db + 0.5 * params_.nu_vac * db * db;
        }
    }
    return 0.0;
}

std::string BHCurve::hash() const {
    char buf[160];
    if (mode_ == CurveMode::linear) {
        std::snprintf(buf, sizeof buf, "linear:nu=%.17g", nu_linear_);
    } else {
        std::snprintf(buf, sizeof buf, "%s:k1=%.17g,k2=%.17g,k3=%.17g,nuvac=%.17g",
                      to_string(mode_).c_str(), params_.k1, params_.k2, params_.k3, params_.nu_vac);
    }
    // FNV-1a, stable across platforms
    std::uint64_t h = 14695981039346656037ULL;
    for (const char* c = buf; *c; ++c) {
        h ^= static_cast<unsigned char>(*c);
        h *= 1099511628211ULL;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

PowerLawParams fit_power_law(const std::function<double(double)>& h_of_b,
                             std::pair<double, double> b_range, int samples) {
    const auto [lo, hi] = b_range;
    if (!(lo > 0.0) || !(hi > lo * (1.0 + 1e-9)) || samples < 2) {
        throw std::invalid_argument("power-law fit needs a non-degenerate range with 0 < b_lo < b_hi");
    }
    // log H = n log B - n log k
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < samples; ++i) {
        const double b = lo * std::pow(hi / lo, static_cast<double>(i) / (samples - 1));
        const double x = std::log(b);
        const double y = std::log(h_of_b(b));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double m = samples;
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / m;
    if (!(slope > 1.0)) {
        throw std::domain_error("fitted power-law exponent is not > 1");
    }
    return PowerLawParams{std::exp(-intercept / slope), slope};
}

PowerLawParams fit_power_law(const BHCurve& curve, std::pair<double, double> b_range, int samples) {
    if (curve.b_sat() && b_range.second > *curve.b_sat() * (1.0 + 1e-12)) {
        throw std::invalid_argument("power-law fit range must lie within (0, b_sat]");
    }
    return fit_power_law([&](double b) { return curve.field(b); }, b_range, samples);
}

}  // namespace lamhb
