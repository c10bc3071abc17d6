#include "lamhb/config.hpp"

#include <functional>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "lamhb/errors.hpp"
#include "lamhb/io.hpp"

namespace lamhb {

namespace {

using nlohmann::json;

// Reads keys from one JSON object and complains about the ones nobody asked for.
class Block {
public:
    Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
    }

    [[nodiscard]] std::string at(const std::string& key) const { return path_ + "/" + key; }
    [[nodiscard]] const std::string& path() const { return path_; }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    double number(const std::string& key, double def) {
        if (!has(key)) return def;
        const auto& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(at(key), "expected a number");
        return v.get<double>();
    }

    int integer(const std::string& key, int def) {
        if (!has(key)) return def;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
        return v.get<int>();
    }

    bool boolean(const std::string& key, bool def) {
        if (!has(key)) return def;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& def) {
        if (!has(key)) return def;
        const auto& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(at(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        std::vector<double> out;
        if (!has(key)) return out;
        const auto& v = j_.at(key);
        if (!v.is_array()) throw ConfigError(at(key), "expected an array of numbers");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ConfigError(at(key) + "/" + std::to_string(i), "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    std::vector<int> integers(const std::string& key) {
        std::vector<int> out;
        if (!has(key)) return out;
        const auto& v = j_.at(key);
        if (!v.is_array()) throw ConfigError(at(key), "expected an array of integers");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number_integer()) throw ConfigError(at(key) + "/" + std::to_string(i), "expected an integer");
            out.push_back(v[i].get<int>());
        }
        return out;
    }

    std::vector<std::string> strings(const std::string& key) {
        std::vector<std::string> out;
        if (!has(key)) return out;
        const auto& v = j_.at(key);
        if (!v.is_array()) throw ConfigError(at(key), "expected an array of strings");
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_string()) throw ConfigError(at(key) + "/" + std::to_string(i), "expected a string");
            out.push_back(v[i].get<std::string>());
        }
        return out;
    }

    /// Sub-object, or nullopt when absent.
    std::optional<Block> child(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return Block(j_.at(key), at(key));
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(at(it.key()), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class T>
T parse_enum(const std::string& path, const std::string& value, const std::function<T(const std::string&)>& conv) {
    try {
        return conv(value);
    } catch (const std::exception& e) {
        throw ConfigError(path, e.what());
    }
}

// Runs a validate() call and reports its message against the block path.
void check(const std::string& path, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path, e.what());
    }
}

void read_material(Block b, MaterialConfig& m) {
    m.mode = parse_enum<CurveMode>(b.at("model"), b.string("model", to_string(m.mode)), curve_mode_from_string);
    m.brauer.k1 = b.number("k1", m.brauer.k1);
    m.brauer.k2 = b.number("k2", m.brauer.k2);
    m.brauer.k3 = b.number("k3", m.brauer.k3);
    m.nu_linear = b.number("nu", m.nu_linear);
    m.sigma = b.number("sigma", m.sigma);
    m.nu_ins = b.number("nu_ins", m.nu_ins);
    b.finish();
    if (!(m.sigma > 0.0)) throw ConfigError(b.at("sigma"), "must be > 0");
    if (!(m.nu_ins > 0.0)) throw ConfigError(b.at("nu_ins"), "must be > 0");
    if (m.mode == CurveMode::linear && !(m.nu_linear > 0.0)) throw ConfigError(b.at("nu"), "must be > 0");
    if (m.mode != CurveMode::linear) check(b.path(), [&] { m.brauer.validate(); });
}

void read_geometry(Block b, StackGeometry& g) {
    g.n_laminations = b.integer("n_laminations", g.n_laminations);
    g.d = b.number("d", g.d);
    const bool has_ins = b.has("d_ins");
    const bool has_gamma = b.has("gamma");
    if (has_ins && has_gamma) throw ConfigError(b.at("gamma"), "give either d_ins or gamma, not both");
    g.d_ins = b.number("d_ins", g.d_ins);
    if (has_gamma) {
        const double gamma = b.number("gamma", 1.0);
        if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError(b.at("gamma"), "must lie in (0, 1]");
        g.d_ins = g.d * (1.0 / gamma - 1.0);
    }
    g.padding = b.number("padding", g.padding);
    b.finish();
    check(b.path(), [&] { g.validate(); });
}

void read_drive(Block b, Drive& d) {
    d.boundary = parse_enum<BoundaryKind>(b.at("boundary"), b.string("boundary", to_string(d.boundary)),
                                          boundary_kind_from_string);
    d.h_dc = b.number("h_dc", d.h_dc);
    d.h_ac = b.number("h_ac", d.h_ac);
    d.f = b.number("f", d.f);
    d.b_dc = b.number("b_dc", d.b_dc);
    d.b_ac = b.number("b_ac", d.b_ac);
    d.gap_reluctivity = b.number("gap_reluctivity", d.gap_reluctivity);
    b.finish();
}

void read_mesh(Block b, MeshConfig& m) {
    m.skin_depth_fraction = b.number("skin_depth_fraction", m.skin_depth_fraction);
    m.min_elements = b.integer("min_elements", m.min_elements);
    m.hom_elements = b.integer("hom_elements", m.hom_elements);
    b.finish();
    if (!(m.skin_depth_fraction > 0.0)) throw ConfigError(b.at("skin_depth_fraction"), "must be > 0");
    if (m.min_elements < 1) throw ConfigError(b.at("min_elements"), "must be >= 1");
    if (m.hom_elements < 1) throw ConfigError(b.at("hom_elements"), "must be >= 1");
}

void read_solver(Block b, RunConfig& c) {
    auto& s = c.solver;
    s.mode = parse_enum<SolverMode>(b.at("mode"), b.string("mode", to_string(s.mode)), solver_mode_from_string);
    c.set.m = b.integer("m", c.set.m);
    c.set.parity = parse_enum<Parity>(b.at("parity"), b.string("parity", to_string(c.set.parity)),
                                      parity_from_string);
    s.tol_energy = b.number("tol_energy", s.tol_energy);
    s.max_iter = b.integer("max_iter", s.max_iter);
    s.relaxation = b.number("relaxation", s.relaxation);
    s.auto_relax = b.boolean("auto_relax", s.auto_relax);
    s.min_relaxation = b.number("min_relaxation", std::min(s.min_relaxation, s.relaxation));
    s.n_time_samples = b.integer("n_time_samples", s.n_time_samples);
    s.corrections = b.boolean("corrections", s.corrections == InsulationCorrection::on) ? InsulationCorrection::on
                                                                                          : InsulationCorrection::off;
    b.finish();
    check(b.path(), [&] {
        c.set.validate();
        // the table is attached later; validate the rest without it
        auto o = s;
        if (o.mode == SolverMode::hom_refined_dc) o.mode = SolverMode::hom_naive_dc;
        o.validate(c.set);
    });
}

void read_transient(Block b, TransientOptions& t) {
    t.steps_per_period = b.integer("steps_per_period", t.steps_per_period);
    t.n_periods = b.integer("n_periods", t.n_periods);
    const auto method = b.string("method", t.method == NonlinearMethod::newton ? "newton" : "picard");
    if (method == "newton") {
        t.method = NonlinearMethod::newton;
    } else if (method == "picard") {
        t.method = NonlinearMethod::picard;
    } else {
        throw ConfigError(b.at("method"), "expected newton or picard");
    }
    t.tol = b.number("tol", t.tol);
    t.max_iter = b.integer("max_iter", t.max_iter);
    t.static_start = b.boolean("static_start", t.static_start);
    b.finish();
    if (t.steps_per_period < 4) throw ConfigError(b.at("steps_per_period"), "must be >= 4");
    if (t.n_periods < 0) throw ConfigError(b.at("n_periods"), "must be >= 0 (0 = automatic)");
    if (!(t.tol > 0.0)) throw ConfigError(b.at("tol"), "must be > 0");
    if (t.max_iter < 1) throw ConfigError(b.at("max_iter"), "must be >= 1");
}

void read_lut(Block b, LutConfig& l) {
    l.path = b.string("path", l.path);
    l.freqs = b.numbers("freqs");
    l.levels = b.numbers("levels");
    l.n_levels = b.integer("n_levels", l.n_levels);
    l.b_lo = b.number("b_lo", l.b_lo);
    l.b_hi = b.number("b_hi", l.b_hi);
    auto& g = l.generation;
    g.dc_ratio = b.number("dc_ratio", g.dc_ratio);
    g.steps_per_period = b.integer("steps_per_period", g.steps_per_period);
    g.min_elements = b.integer("min_elements", g.min_elements);
    g.skin_depth_fraction = b.number("skin_depth_fraction", g.skin_depth_fraction);
    g.n_periods = b.integer("n_periods", g.n_periods);
    b.finish();
    for (std::size_t i = 0; i < l.freqs.size(); ++i) {
        if (!(l.freqs[i] > 0.0)) throw ConfigError(b.at("freqs") + "/" + std::to_string(i), "must be > 0");
    }
    for (std::size_t i = 0; i < l.levels.size(); ++i) {
        if (!(l.levels[i] > 0.0)) throw ConfigError(b.at("levels") + "/" + std::to_string(i), "must be > 0");
    }
    if (l.n_levels < 2) throw ConfigError(b.at("n_levels"), "must be >= 2");
    if (!(l.b_lo > 0.0 && l.b_hi > l.b_lo)) throw ConfigError(b.at("b_hi"), "need 0 < b_lo < b_hi");
    if (!(g.dc_ratio >= 0.0)) throw ConfigError(b.at("dc_ratio"), "must be >= 0");
}

void read_scenario(Block b, ScenarioConfig& s) {
    s.name = b.string("name", s.name);
    s.freqs = b.numbers("freqs");
    const auto modes = b.strings("modes");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        s.modes.push_back(
            parse_enum<SolverMode>(b.at("modes") + "/" + std::to_string(i), modes[i], solver_mode_from_string));
    }
    if (auto c = b.child("calibration")) {
        Calibration cal;
        cal.target_b = c->number("target_b", cal.target_b);
        cal.ac_dc_ratio = c->number("ac_dc_ratio", cal.ac_dc_ratio);
        cal.f = c->number("f", cal.f);
        cal.rel_tol = c->number("rel_tol", cal.rel_tol);
        c->finish();
        if (!(cal.target_b > 0.0)) throw ConfigError(c->at("target_b"), "must be > 0");
        if (!(cal.ac_dc_ratio >= 0.0)) throw ConfigError(c->at("ac_dc_ratio"), "must be >= 0");
        if (!(cal.f > 0.0)) throw ConfigError(c->at("f"), "must be > 0");
        s.calibration = cal;
    }
    if (auto c = b.child("dof_study")) {
        DofStudySettings d;
        d.f = c->number("f", d.f);
        d.ladder.resolved = c->integers("resolved");
        d.ladder.homogenized = c->integers("homogenized");
        d.mode = parse_enum<SolverMode>(c->at("mode"), c->string("mode", to_string(d.mode)), solver_mode_from_string);
        c->finish();
        if (d.ladder.resolved.size() < 4) throw ConfigError(c->at("resolved"), "need at least 4 meshes");
        if (d.ladder.homogenized.size() < 4) throw ConfigError(c->at("homogenized"), "need at least 4 meshes");
        s.dof_study = d;
    }
    b.finish();
    for (std::size_t i = 0; i < s.freqs.size(); ++i) {
        if (!(s.freqs[i] > 0.0)) throw ConfigError(b.at("freqs") + "/" + std::to_string(i), "must be > 0");
    }
}

}  // namespace

BHCurve MaterialConfig::curve() const {
    if (mode == CurveMode::linear) return BHCurve::linear(nu_linear);
    return BHCurve(brauer, mode);
}

Materials RunConfig::materials() const { return Materials(material.curve(), material.sigma, material.nu_ins, geometry); }

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    RunConfig c;
    Block root(j, "");
    const auto schema = root.string("schema", "");
    if (schema != kConfigSchema) {
        throw ConfigError("/schema", "expected \"" + std::string(kConfigSchema) + "\"");
    }
    if (auto b = root.child("material")) read_material(*b, c.material);
    if (auto b = root.child("geometry")) read_geometry(*b, c.geometry);
    if (auto b = root.child("drive")) read_drive(*b, c.drive);
    if (auto b = root.child("mesh")) read_mesh(*b, c.mesh);
    if (auto b = root.child("solver")) read_solver(*b, c);
    if (auto b = root.child("transient")) read_transient(*b, c.transient);
    if (auto b = root.child("lut")) read_lut(*b, c.lut);
    if (auto b = root.child("scenario")) read_scenario(*b, c.scenario);
    c.output_dir = root.string("output_dir", c.output_dir);
    root.finish();
    check("/drive", [&] { c.drive.validate(); });
    c.canonical = j.dump();
    c.hash = fnv1a_hex(c.canonical);
    return c;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

Scenario make_scenario(const RunConfig& cfg, int threads, bool timestamp) {
    Scenario s;
    s.name = cfg.scenario.name;
    s.geometry = cfg.geometry;
    s.curve = cfg.material.curve();
    s.sigma = cfg.material.sigma;
    s.nu_ins = cfg.material.nu_ins;
    s.drive = cfg.drive;
    s.freqs = cfg.scenario.freqs;
    s.modes = cfg.scenario.modes;
    s.set = cfg.set;
    s.solver = cfg.solver;
    s.hom_elements = cfg.mesh.hom_elements;
    s.oracle.skin_depth_fraction = cfg.mesh.skin_depth_fraction;
    s.oracle.min_elements = cfg.mesh.min_elements;
    s.oracle.transient = cfg.transient;
    s.calibration = cfg.scenario.calibration;
    s.dof_study = cfg.scenario.dof_study;
    s.output_dir = cfg.output_dir;
    s.config_hash = cfg.hash;
    s.timestamp = timestamp;
    s.threads = threads;
    return s;
}

}  // namespace lamhb
