#include "lamhb/transient.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lamhb/errors.hpp"
#include "lamhb/linalg.hpp"

namespace lamhb {

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

class SlabOperator {
public:
    SlabOperator(const Mesh1D& mesh, const Materials& mat, const Drive& drive)
        : mesh_(mesh), mat_(mat), drive_(drive), sigma_(element_conductivity(mesh, mat)),
          mass_(assemble_mass(mesh, sigma_)), cons_(lamination_constraints(mesh, sigma_)),
          kappa_(drive.circuit_coupling(mesh.length())) {
        mesh.validate();
        drive.validate();
        for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
            if (mesh.region_of(e).kind == RegionKind::homogenized) {
                throw std::invalid_argument("time-domain solver needs a resolved (non-homogenized) mesh");
            }
        }
    }

    [[nodiscard]] std::size_t n() const { return mesh_.n_nodes(); }
    [[nodiscard]] std::size_t last() const { return mesh_.n_nodes() - 1; }
    [[nodiscard]] bool flux_driven() const { return drive_.boundary == BoundaryKind::dirichlet_flux; }
    [[nodiscard]] const std::vector<LaminationConstraint>& constraints() const { return cons_; }
    [[nodiscard]] const std::vector<double>& sigma() const { return sigma_; }

    [[nodiscard]] double b_of(const std::vector<double>& a, std::size_t e) const {
        return (a[e + 1] - a[e]) / mesh_.element_length(e);
    }

    [[nodiscard]] bool nonlinear(std::size_t e) const {
        return mesh_.region_of(e).kind == RegionKind::laminate;
    }

    [[nodiscard]] double field(std::size_t e, double b) const {
        if (!nonlinear(e)) return linear_element_reluctivity(mesh_, mat_, e) * b;
        const double h = mat_.curve.field(std::abs(b));
        return b < 0.0 ? -h : h;
    }

    [[nodiscard]] double tangent(std::size_t e, double b, NonlinearMethod m) const {
        if (!nonlinear(e)) return linear_element_reluctivity(mesh_, mat_, e);
        return m == NonlinearMethod::newton ? mat_.curve.differential_reluctivity(std::abs(b))
                                            : mat_.curve.reluctivity(std::abs(b));
    }

    [[nodiscard]] std::vector<double> internal_force(const std::vector<double>& a) const {
        std::vector<double> f(n(), 0.0);
        for (std::size_t e = 0; e < mesh_.n_elements(); ++e) {
            const double h = field(e, b_of(a, e));
            f[e] -= h;
            f[e + 1] += h;
        }
        return f;
    }

    // M x - sum_k w_k (w_k . x) / (sigma d)_k
    [[nodiscard]] std::vector<double> effective_mass(const std::vector<double>& x) const {
        auto y = mass_.apply(x);
        for (const auto& c : cons_) {
            const double s = std::inner_product(c.w.begin(), c.w.end(), x.begin(), 0.0) / c.sigma_d;
            for (std::size_t i = 0; i < y.size(); ++i) y[i] -= c.w[i] * s;
        }
        return y;
    }

    struct Residual {
        std::vector<double> r;
        double norm;
        double scale;
    };

    // Free rows of F(a) + inv_dt M~ (a - a_prev) + kappa a_R e_R - g e_R.
    [[nodiscard]] Residual residual(const std::vector<double>& a, const std::vector<double>& a_prev,
                                    double inv_dt, double g) const {
        auto f = internal_force(a);
        std::vector<double> inertia(n(), 0.0);
        if (inv_dt > 0.0) {
            std::vector<double> da(n());
            for (std::size_t i = 0; i < n(); ++i) da[i] = a[i] - a_prev[i];
            inertia = effective_mass(da);
            for (double& v : inertia) v *= inv_dt;
        }
        std::vector<double> r(n());
        for (std::size_t i = 0; i < n(); ++i) r[i] = f[i] + inertia[i];
        std::vector<double> ext(n(), 0.0);
        if (!flux_driven()) {
            ext[last()] = g;
            r[last()] += kappa_ * a[last()] - g;
        }
        r[0] = 0.0;
        f[0] = 0.0;
        inertia[0] = 0.0;
        if (flux_driven()) {
            r[last()] = 0.0;
            f[last()] = 0.0;
            inertia[last()] = 0.0;
        }
        const double nr = norm2(r);
        return {std::move(r), nr, norm2(f) + norm2(inertia) + norm2(ext)};
    }

    [[nodiscard]] LowRankSystem<double> system(const std::vector<double>& a, double inv_dt,
                                               NonlinearMethod m) const {
        LowRankSystem<double> s(n());
        for (std::size_t e = 0; e < mesh_.n_elements(); ++e) {
            const double c = tangent(e, b_of(a, e), m) / mesh_.element_length(e);
            s.tri.add_element(e, c, -c, c);
        }
        if (inv_dt > 0.0) {
            for (std::size_t i = 0; i < n(); ++i) s.tri.diag[i] += inv_dt * mass_.diag[i];
            for (std::size_t i = 0; i + 1 < n(); ++i) {
                s.tri.lower[i] += inv_dt * mass_.lower[i];
                s.tri.upper[i] += inv_dt * mass_.upper[i];
            }
            for (const auto& c : cons_) {
                s.columns.push_back(c.w);
                s.coeffs.push_back(-inv_dt / c.sigma_d);
            }
        }
        if (!flux_driven()) s.tri.diag[last()] += kappa_;
        return s;
    }

    // One implicit step (or the static problem when inv_dt = 0). `a` holds
    // the initial guess with boundary values already imposed.
    void solve_step(std::vector<double>& a, const std::vector<double>& a_prev, double inv_dt, double g,
                    NonlinearMethod m, double tol, int max_iter) const {
        auto res = residual(a, a_prev, inv_dt, g);
        for (int it = 0; it < max_iter; ++it) {
            if (res.norm <= tol * res.scale) return;
            auto sys = system(a, inv_dt, m);
            std::vector<double> trial;
            if (m == NonlinearMethod::newton) {
                std::vector<double> rhs(res.r);
                for (double& v : rhs) v = -v;
                sys.constrain(0, 0.0, rhs);
                if (flux_driven()) sys.constrain(last(), 0.0, rhs);
                const auto delta = sys.solve(rhs);
                trial = a;
                for (std::size_t i = 0; i < n(); ++i) trial[i] += delta[i];
            } else {
                std::vector<double> rhs(n(), 0.0);
                if (inv_dt > 0.0) {
                    rhs = effective_mass(a_prev);
                    for (double& v : rhs) v *= inv_dt;
                }
                if (!flux_driven()) rhs[last()] += g;
                sys.constrain(0, a[0], rhs);
                if (flux_driven()) sys.constrain(last(), a[last()], rhs);
                trial = sys.solve(rhs);
            }
            auto tres = residual(trial, a_prev, inv_dt, g);
            // damped fallback when the full update increases the residual
            for (int k = 0; k < 8 && tres.norm > res.norm; ++k) {
                for (std::size_t i = 0; i < n(); ++i) trial[i] = a[i] + 0.5 * (trial[i] - a[i]);
                tres = residual(trial, a_prev, inv_dt, g);
            }
            a = std::move(trial);
            res = std::move(tres);
        }
        if (res.norm <= tol * res.scale) return;
        std::ostringstream os;
        os << "nonlinear iteration did not converge in " << max_iter << " iterations (relative residual "
           << res.norm / std::max(res.scale, 1e-300) << ")";
        throw NumericalError(os.str(), res.norm / std::max(res.scale, 1e-300));
    }

    [[nodiscard]] double step_loss(const std::vector<double>& a, const std::vector<double>& a_prev,
                                   const std::vector<double>& dpsi, double dt) const {
        // map node -> lamination through the element loop
        double p = 0.0;
        for (std::size_t e = 0; e < mesh_.n_elements(); ++e) {
            if (sigma_[e] == 0.0) continue;
            const int k = mesh_.region_of(e).lamination;
            const double dl = a[e] - a_prev[e] + dpsi[k];
            const double dr = a[e + 1] - a_prev[e + 1] + dpsi[k];
            p += sigma_[e] * mesh_.element_length(e) / 3.0 * (dl * dl + dl * dr + dr * dr);
        }
        return p / (dt * dt);
    }

private:
    const Mesh1D& mesh_;
    const Materials& mat_;
    const Drive& drive_;
    std::vector<double> sigma_;
    Tridiagonal<double> mass_;
    std::vector<LaminationConstraint> cons_;
    double kappa_;
};

}  // namespace

int default_period_count(const Materials& mat, double d, double f) {
    const double tau = mat.sigma * d * d / (M_PI * M_PI * mat.curve.initial_reluctivity());
    return std::max(3, static_cast<int>(std::ceil(8.0 * tau * f)));
}

std::vector<double> static_solve(const Mesh1D& mesh, const Materials& mat, const Drive& drive,
                                 double tol, int max_iter) {
    SlabOperator op(mesh, mat, drive);
    std::vector<double> a(op.n(), 0.0);
    if (op.flux_driven()) a[op.last()] = drive.b_dc * mesh.length();
    op.solve_step(a, a, 0.0, drive.h_dc, NonlinearMethod::newton, tol, max_iter);
    return a;
}

TransientResult transient_solve(const Mesh1D& mesh, const Materials& mat, const Drive& drive,
                                const TransientOptions& opt) {
    if (opt.steps_per_period < 1 || opt.n_periods < 1) {
        throw std::invalid_argument("steps_per_period and n_periods must be >= 1");
    }
    SlabOperator op(mesh, mat, drive);
    const int n_steps = opt.steps_per_period * opt.n_periods;
    const double dt = drive.period() / opt.steps_per_period;
    const double inv_dt = 1.0 / dt;
    const int keep = opt.record_periods > 0 ? std::min(opt.record_periods, opt.n_periods) : opt.n_periods;
    const int first = (opt.n_periods - keep) * opt.steps_per_period;
    const std::size_t n_lam = op.constraints().size();

    TransientResult r;
    r.f = drive.f;
    r.dt = dt;
    r.steps_per_period = opt.steps_per_period;
    r.n_periods = opt.n_periods;
    r.first_step = first;

    std::vector<double> a(op.n(), 0.0);
    if (opt.static_start && !drive.is_zero()) a = static_solve(mesh, mat, drive, opt.tol, 4 * opt.max_iter);
    std::vector<double> psi(n_lam, 0.0);
    double last_loss = 0.0;

    auto record = [&](int step) {
        r.t.push_back(step * dt);
        r.a.push_back(a);
        std::vector<double> b(mesh.n_elements());
        for (std::size_t e = 0; e < mesh.n_elements(); ++e) b[e] = op.b_of(a, e);
        r.b.push_back(std::move(b));
        r.psi.push_back(psi);
        r.loss.push_back(last_loss);
    };
    if (first == 0) record(0);

    std::vector<double> a_prev;
    std::vector<double> dpsi(n_lam);
    for (int step = 1; step <= n_steps; ++step) {
        const double t = step * dt;
        a_prev = a;
        a[0] = 0.0;
        if (op.flux_driven()) a[op.last()] = drive.flux(t, mesh.length());
        op.solve_step(a, a_prev, inv_dt, drive.field(t), opt.method, opt.tol, opt.max_iter);
        for (std::size_t k = 0; k < n_lam; ++k) {
            const auto& c = op.constraints()[k];
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) s += c.w[i] * (a[i] - a_prev[i]);
            dpsi[k] = -s / c.sigma_d;
            psi[k] += dpsi[k];
        }
        last_loss = op.step_loss(a, a_prev, dpsi, dt);
        if (step >= first) record(step);
    }
    return r;
}

namespace {

// Indices of the samples covering the final period (steps (P-1)N+1 .. PN).
std::pair<std::size_t, std::size_t> final_period(const TransientResult& r) {
    const int n = r.steps_per_period;
    const int begin_step = (r.n_periods - 1) * n + 1;
    if (r.t.empty() || begin_step < r.first_step) {
        throw std::invalid_argument("final period is not recorded");
    }
    const auto begin = static_cast<std::size_t>(begin_step - r.first_step);
    return {begin, begin + n};
}

}  // namespace

double compute_losses_transient(const TransientResult& r) {
    if (r.n_periods < 2) throw std::invalid_argument("loss evaluation needs at least 2 simulated periods");
    const auto [b, e] = final_period(r);
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += r.loss[i];
    return s / static_cast<double>(e - b);
}

std::vector<double> compute_energy_transient(const TransientResult& r, const Mesh1D& mesh,
                                             const Materials& mat, EnergyScope scope) {
    std::vector<double> w(r.n_samples(), 0.0);
    for (std::size_t i = 0; i < r.n_samples(); ++i) {
        double s = 0.0;
        for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
            const double b = std::abs(r.b[i][e]);
            const double h = mesh.element_length(e);
            if (mesh.region_of(e).kind == RegionKind::laminate) {
                s += h * mat.curve.energy_density(b);
            } else if (scope == EnergyScope::all) {
                s += h * 0.5 * linear_element_reluctivity(mesh, mat, e) * b * b;
            }
        }
        w[i] = s;
    }
    return w;
}

AverageFlux average_flux_density(const TransientResult& r, const Mesh1D& mesh, int lamination) {
    if (lamination < 0 || lamination >= mesh.n_laminations()) {
        throw std::out_of_range("lamination index out of range");
    }
    const auto elems = mesh.lamination_elements(lamination);
    const std::size_t left = elems.front();
    const std::size_t right = elems.back() + 1;
    const double d = mesh.nodes[right] - mesh.nodes[left];
    const auto [b, e] = final_period(r);
    AverageFlux out;
    for (std::size_t i = b; i < e; ++i) {
        const double v = (r.a[i][right] - r.a[i][left]) / d;
        out.t.push_back(r.t[i]);
        out.b_avg.push_back(v);
        out.b_max = std::max(out.b_max, std::abs(v));
    }
    return out;
}

void write_transient_csv(std::ostream& os, const TransientResult& r, const std::string& header) {
    os << header << "t,kind,index,value\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.n_samples(); ++i) {
        for (std::size_t k = 0; k < r.a[i].size(); ++k) os << r.t[i] << ",A," << k << ',' << r.a[i][k] << '\n';
        for (std::size_t k = 0; k < r.b[i].size(); ++k) os << r.t[i] << ",B," << k << ',' << r.b[i][k] << '\n';
        os << r.t[i] << ",loss,0," << r.loss[i] << '\n';
    }
}

}  // namespace lamhb
