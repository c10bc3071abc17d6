#include "lamhb/lut.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lamhb/analytic.hpp"
#include "lamhb/errors.hpp"
#include "lamhb/parallel.hpp"

namespace lamhb {

namespace {

bool same_frequency(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<double> LookupTable::frequencies() const {
    std::vector<double> f;
    for (const auto& [k, v] : entries) f.push_back(k);
    return f;
}

const std::vector<LutEntry>& LookupTable::at(double f) const {
    for (const auto& [k, v] : entries) {
        if (same_frequency(k, f)) return v;
    }
    std::ostringstream os;
    os << "frequency " << f << " Hz not in look-up table; available:";
    for (const auto& [k, v] : entries) os << ' ' << k;
    throw std::out_of_range(os.str());
}

void LookupTable::validate() const {
    if (entries.empty()) throw std::invalid_argument("look-up table is empty");
    for (const auto& [f, rows] : entries) {
        if (rows.size() < 2) {
            throw std::invalid_argument("look-up table needs >= 2 points at " + fmt(f) + " Hz");
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!(rows[i].delta_h > 0.0)) throw std::invalid_argument("delta_h must be > 0");
            if (i > 0 && !(rows[i].b_avg_max > rows[i - 1].b_avg_max)) {
                throw std::invalid_argument("b_avg_max must be strictly increasing at " + fmt(f) + " Hz");
            }
        }
    }
}

LutLookup lookup_delta_h(const LookupTable& lut, double f, double b) {
    const auto& rows = lut.at(f);
    if (b <= rows.front().b_avg_max) return {rows.front().delta_h, b < rows.front().b_avg_max};
    if (b >= rows.back().b_avg_max) return {rows.back().delta_h, b > rows.back().b_avg_max};
    const auto it = std::upper_bound(rows.begin(), rows.end(), b,
                                     [](double v, const LutEntry& e) { return v < e.b_avg_max; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (b - lo.b_avg_max) / (hi.b_avg_max - lo.b_avg_max);
    return {lo.delta_h + t * (hi.delta_h - lo.delta_h), false};
}

bool invert_loss_density(double p, double h0, double sigma, double d, double& delta) {
    if (!(p > 0.0) || !(h0 > 0.0)) return false;
    double lo = d * 1e-3;
    double hi = d * 1e3;
    auto g = [&](double x) { return analytic::eddy_loss_density_linear(h0, sigma, d, x) - p; };
    if (g(lo) < 0.0 || g(hi) > 0.0) return false;
    // decreasing in delta; bisect in log space
    while (hi / lo - 1.0 > 1e-12) {
        const double mid = std::sqrt(lo * hi);
        if (g(mid) > 0.0) lo = mid; else hi = mid;
    }
    delta = std::sqrt(lo * hi);
    return true;
}

namespace {

struct CellResult {
    double b_max = 0.0;
    double p_avg = 0.0;
};

CellResult run_cell(const BHCurve& curve, double sigma, double d, double f, double level,
                    const LutGenerationOptions& opt) {
    StackGeometry g{1, d, 0.0, 0.0};
    Materials mat(curve, sigma, kNuVacuum, g);
    const auto mesh = build_stack_mesh(
        g, MeshRefinement::skin_depth(f, curve.initial_reluctivity(), sigma, opt.skin_depth_fraction,
                                      opt.min_elements));
    Drive drive;
    drive.f = f;
    drive.h_ac = level;
    drive.h_dc = opt.dc_ratio * level;
    TransientOptions to;
    to.steps_per_period = opt.steps_per_period;
    to.n_periods = opt.n_periods > 0 ? opt.n_periods : default_period_count(mat, d, f);
    to.record_periods = 2;
    const auto r = transient_solve(mesh, mat, drive, to);
    return {average_flux_density(r, mesh, 0).b_max, compute_losses_transient(r) / d};
}

}  // namespace

double lamination_peak_flux(const BHCurve& curve, double sigma, double d, double f, double level,
                            const LutGenerationOptions& opt) {
    return run_cell(curve, sigma, d, f, level, opt).b_max;
}

LookupTable generate_lut(const BHCurve& curve, double sigma, double d, const std::vector<double>& freqs,
                         const std::map<double, std::vector<double>>& levels, const LutGenerationOptions& opt,
                         std::vector<std::string>* warnings) {
    if (freqs.empty()) throw std::invalid_argument("at least one frequency is required");
    struct Task {
        double f;
        double level;
    };
    std::vector<Task> tasks;
    for (double f : freqs) {
        const auto it = levels.find(f);
        if (it == levels.end()) throw std::invalid_argument("no drive levels for " + fmt(f) + " Hz");
        const auto& lv = it->second;
        for (std::size_t i = 0; i < lv.size(); ++i) {
            if (!(lv[i] > 0.0) || (i > 0 && !(lv[i] > lv[i - 1]))) {
                throw std::invalid_argument("drive levels must be positive and increasing");
            }
            tasks.push_back({f, lv[i]});
        }
    }
    std::vector<CellResult> results(tasks.size());
    parallel_for(tasks.size(), opt.threads, [&](std::size_t i) {
        results[i] = run_cell(curve, sigma, d, tasks[i].f, tasks[i].level, opt);
    });

    LookupTable lut;
    lut.sigma = sigma;
    lut.d = d;
    lut.material_hash = curve.hash();
    lut.settings = {{"drive", opt.dc_ratio > 0.0 ? "dc_biased" : "ac_only"},
                    {"dc_ratio", fmt(opt.dc_ratio)},
                    {"steps_per_period", std::to_string(opt.steps_per_period)},
                    {"min_elements", std::to_string(opt.min_elements)},
                    {"skin_depth_fraction", fmt(opt.skin_depth_fraction)},
                    {"n_periods", opt.n_periods > 0 ? std::to_string(opt.n_periods) : "auto"}};
    auto warn = [&](const std::string& s) {
        if (warnings) warnings->push_back(s);
    };
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& t = tasks[i];
        double delta = 0.0;
        if (!invert_loss_density(results[i].p_avg, t.level, sigma, d, delta)) {
            warn("f=" + fmt(t.f) + " Hz level=" + fmt(t.level) + " A/m: loss not bracketed, entry dropped");
            continue;
        }
        auto& rows = lut.entries[t.f];
        if (!rows.empty() && !(results[i].b_max > rows.back().b_avg_max)) {
            warn("f=" + fmt(t.f) + " Hz level=" + fmt(t.level) + " A/m: b_avg_max not increasing, entry dropped");
            continue;
        }
        rows.push_back({results[i].b_max, delta});
    }
    for (double f : freqs) {
        if (lut.entries[f].size() < 2) {
            throw NumericalError("fewer than 2 valid look-up entries at " + fmt(f) + " Hz", 0.0);
        }
    }
    return lut;
}

LookupTable generate_lut(const BHCurve& curve, double sigma, double d, const std::vector<double>& freqs,
                         const std::vector<double>& levels, const LutGenerationOptions& opt,
                         std::vector<std::string>* warnings) {
    std::map<double, std::vector<double>> m;
    for (double f : freqs) m[f] = levels;
    return generate_lut(curve, sigma, d, freqs, m, opt, warnings);
}

std::vector<double> default_drive_ladder(const BHCurve& curve, double sigma, double d, double f,
                                         const LutGenerationOptions& opt, int n, double b_lo, double b_hi) {
    if (n < 2 || !(b_lo > 0.0) || !(b_hi > b_lo)) throw std::invalid_argument("invalid ladder request");
    double h_lo = curve.field(b_lo);
    for (int i = 0; i < 40 && lamination_peak_flux(curve, sigma, d, f, h_lo, opt) < b_lo; ++i) h_lo *= 2.0;
    double h_hi = std::max(curve.field(b_hi), 2.0 * h_lo);
    for (int i = 0; i < 40 && lamination_peak_flux(curve, sigma, d, f, h_hi, opt) < b_hi; ++i) h_hi *= 2.0;
    std::vector<double> levels(n);
    for (int i = 0; i < n; ++i) levels[i] = h_lo * std::pow(h_hi / h_lo, double(i) / (n - 1));
    return levels;
}

void write_lut(std::ostream& os, const LookupTable& lut) {
    os << "# lamhb-lut v1; sigma=" << fmt(lut.sigma) << "; d=" << fmt(lut.d) << "; material=" << lut.material_hash
       << '\n';
    for (const auto& [k, v] : lut.settings) os << "# " << k << '=' << v << '\n';
    for (const auto& [f, rows] : lut.entries) {
        for (const auto& r : rows) os << fmt(f) << ',' << fmt(r.b_avg_max) << ',' << fmt(r.delta_h) << '\n';
    }
}

LookupTable read_lut(std::istream& is) {
    std::string line;
    const std::string magic = "# lamhb-lut v1;";
    if (!std::getline(is, line) || line.rfind(magic, 0) != 0) throw IoError("look-up table: missing header");
    LookupTable lut;
    {
        std::istringstream hs(line.substr(magic.size()));
        std::string field;
        bool have_sigma = false, have_d = false, have_mat = false;
        while (std::getline(hs, field, ';')) {
            const auto b = field.find_first_not_of(' ');
            if (b == std::string::npos) continue;
            field = field.substr(b);
            const auto eq = field.find('=');
            if (eq == std::string::npos) throw IoError("look-up table: malformed header field '" + field + "'");
            const auto key = field.substr(0, eq);
            const auto val = field.substr(eq + 1);
            try {
                if (key == "sigma") { lut.sigma = std::stod(val); have_sigma = true; }
                else if (key == "d") { lut.d = std::stod(val); have_d = true; }
                else if (key == "material") { lut.material_hash = val; have_mat = true; }
            } catch (const std::exception&) {
                throw IoError("look-up table: bad header value for '" + key + "'");
            }
        }
        if (!have_sigma || !have_d || !have_mat) throw IoError("look-up table: header lacks sigma, d or material");
    }
    int lineno = 1;
    double prev_f = -1.0;
    double prev_b = -1.0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto body = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
            const auto eq = body.find('=');
            if (eq == std::string::npos) throw IoError("look-up table: malformed setting on line " + std::to_string(lineno));
            lut.settings.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        double f = 0, b = 0, dh = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ls(line);
        if (!(ls >> f >> c1 >> b >> c2 >> dh) || c1 != ',' || c2 != ',') {
            throw IoError("look-up table: malformed row on line " + std::to_string(lineno));
        }
        if (f < prev_f || (f == prev_f && !(b > prev_b))) {
            throw IoError("look-up table: rows not sorted by (f, b_avg_max) at line " + std::to_string(lineno));
        }
        if (!(dh > 0.0)) throw IoError("look-up table: delta_h must be > 0 at line " + std::to_string(lineno));
        prev_f = f;
        prev_b = b;
        lut.entries[f].push_back({b, dh});
    }
    try {
        lut.validate();
    } catch (const std::invalid_argument& ex) {
        throw IoError(std::string("look-up table: ") + ex.what());
    }
    return lut;
}

void save_lut(const LookupTable& lut, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_lut(os, lut);
    if (!os) throw IoError("write failed for '" + path + "'");
}

LookupTable load_lut(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    return read_lut(is);
}

std::vector<std::string> lut_metadata_mismatches(const LookupTable& lut, double sigma, double d,
                                                 const std::string& material_hash) {
    std::vector<std::string> out;
    auto rel = [](double a, double b) { return std::abs(a - b) > 1e-12 * std::max(std::abs(a), std::abs(b)); };
    if (rel(lut.sigma, sigma)) out.push_back("table sigma " + fmt(lut.sigma) + " differs from run sigma " + fmt(sigma));
    if (rel(lut.d, d)) out.push_back("table d " + fmt(lut.d) + " differs from run d " + fmt(d));
    if (lut.material_hash != material_hash) {
        out.push_back("table material " + lut.material_hash + " differs from run material " + material_hash);
    }
    return out;
}

}  // namespace lamhb
