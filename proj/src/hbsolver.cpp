#include "lamhb/hbsolver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lamhb/analytic.hpp"
#include "lamhb/linalg.hpp"
#include "lamhb/parallel.hpp"

namespace lamhb {

std::string to_string(Parity p) { return p == Parity::odd_only ? "odd_only" : "all"; }

Parity parity_from_string(const std::string& s) {
    if (s == "odd_only") return Parity::odd_only;
    if (s == "all") return Parity::all;
    throw std::invalid_argument("unknown parity '" + s + "'");
}

std::vector<int> HarmonicSet::orders() const {
    std::vector<int> out;
    for (int n = 0; n <= m; ++n) {
        if (contains(n)) out.push_back(n);
    }
    return out;
}

bool HarmonicSet::contains(int n) const {
    if (n < 0 || n > m) return false;
    return parity == Parity::all || n % 2 == 1;
}

void HarmonicSet::validate() const {
    if (m < 1) throw std::invalid_argument("harmonic order m must be >= 1");
}

std::string to_string(SolverMode m) {
    switch (m) {
        case SolverMode::fine_hbfem: return "fine_hbfem";
        case SolverMode::hom_original: return "hom_original";
        case SolverMode::hom_naive_dc: return "hom_naive_dc";
        case SolverMode::hom_refined_dc: return "hom_refined_dc";
    }
    return "unknown";
}

SolverMode solver_mode_from_string(const std::string& s) {
    if (s == "fine_hbfem") return SolverMode::fine_hbfem;
    if (s == "hom_original") return SolverMode::hom_original;
    if (s == "hom_naive_dc") return SolverMode::hom_naive_dc;
    if (s == "hom_refined_dc") return SolverMode::hom_refined_dc;
    throw std::invalid_argument("unknown solver mode '" + s + "'");
}

bool is_homogenized(SolverMode m) { return m != SolverMode::fine_hbfem; }

void SolverOptions::validate(const HarmonicSet& set) const {
    set.validate();
    if (!(tol_energy > 0.0)) throw std::invalid_argument("tol_energy must be > 0");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
    if (!(relaxation > 0.0 && relaxation <= 1.0)) throw std::invalid_argument("relaxation must lie in (0, 1]");
    if (!(min_relaxation > 0.0 && min_relaxation <= relaxation)) {
        throw std::invalid_argument("min_relaxation must lie in (0, relaxation]");
    }
    if (!valid_sample_count(n_time_samples, set.m)) {
        throw std::invalid_argument("n_time_samples must be a power of two >= 4(2m+1)");
    }
    if (mode == SolverMode::hom_refined_dc && !lut) {
        throw std::invalid_argument("refined dc-biased mode requires a look-up table");
    }
}

namespace {

cplx conj_order(const std::vector<std::vector<cplx>>& a, int p, std::size_t i) {
    return p >= 0 ? a[p][i] : std::conj(a[-p][i]);
}

bool drive_has_dc(const Drive& d) {
    return d.boundary == BoundaryKind::dirichlet_flux ? d.b_dc != 0.0 : d.h_dc != 0.0;
}

}  // namespace

HbProblem::HbProblem(const Mesh1D& mesh, const Materials& mat, const Drive& drive, const HarmonicSet& set,
                     const SolverOptions& opt)
    : mesh_(mesh), mat_(mat), drive_(drive), set_(set), opt_(opt) {
    mesh.validate();
    drive.validate();
    opt.validate(set);
    orders_ = set.orders();
    if (drive_has_dc(drive) && set.parity == Parity::odd_only) {
        throw std::invalid_argument("dc-biased drives require parity 'all'");
    }
    if (opt.mode == SolverMode::hom_original) {
        if (drive_has_dc(drive)) {
            throw std::invalid_argument("hom_original is ac-only; the drive has a dc component");
        }
        orders_.erase(std::remove(orders_.begin(), orders_.end(), 0), orders_.end());
    }
    nl_row_.assign(mesh.n_elements(), -1);
    bool any_hom = false;
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        const auto kind = mesh.region_of(e).kind;
        if (kind == RegionKind::homogenized) any_hom = true;
        if (is_nonlinear_region(kind)) {
            nl_row_[e] = static_cast<int>(nl_elems_.size());
            nl_elems_.push_back(e);
        }
    }
    if (opt.mode == SolverMode::fine_hbfem && any_hom) {
        throw std::invalid_argument("fine_hbfem needs a resolved mesh without homogenized regions");
    }
    sigma_ = element_conductivity(mesh, mat);
    cons_ = lamination_constraints(mesh, sigma_);
}

double HbProblem::flux_scale(std::size_t e) const {
    return mesh_.region_of(e).kind == RegionKind::homogenized ? 1.0 / mat_.hom.gamma : 1.0;
}

std::size_t HbProblem::dof_count() const { return mesh_.n_nodes() - (flux_driven() ? 2 : 1); }

std::vector<cplx> HbProblem::element_b(const std::vector<cplx>& a_n) const {
    std::vector<cplx> b(mesh_.n_elements());
    for (std::size_t e = 0; e < b.size(); ++e) b[e] = (a_n[e + 1] - a_n[e]) / mesh_.element_length(e);
    return b;
}

HbState HbProblem::make_state(std::vector<std::vector<cplx>> a) const {
    const int m = set_.m;
    std::vector<std::vector<cplx>> b(m + 1);
    for (int n = 0; n <= m; ++n) b[n] = element_b(a[n]);
    std::vector<std::vector<cplx>> spectra;
    spectra.reserve(nl_elems_.size());
    for (auto e : nl_elems_) {
        const double s = flux_scale(e);
        std::vector<cplx> spec(m + 1);
        for (int n = 0; n <= m; ++n) spec[n] = s * b[n][e];
        spectra.push_back(std::move(spec));
    }
    HbState st;
    st.a = std::move(a);
    st.nu = reluctivity_harmonics(spectra, mat_.curve, m, opt_.n_time_samples);
    return st;
}

cplx build_harmonic_tensors(const HbProblem& p, std::size_t e, int n, const HbState& state,
                            bool* lut_clamped) {
    const auto& mesh = p.mesh();
    const auto& mat = p.materials();
    const auto kind = mesh.region_of(e).kind;
    if (lut_clamped) *lut_clamped = false;
    if (kind == RegionKind::insulation || kind == RegionKind::air) {
        return linear_element_reluctivity(mesh, mat, e);
    }
    const int row = p.nonlinear_row(e);
    const double nu0 = state.nu.nu[row][0].real();
    if (kind == RegionKind::laminate) return nu0;

    const auto& opt = p.options();
    const auto corr = opt.corrections;
    if (n == 0) {
        if (opt.mode == SolverMode::hom_original) {
            throw std::invalid_argument("order 0 is not defined for the ac-only homogenized tensor");
        }
        if (opt.mode == SolverMode::fine_hbfem) throw std::logic_error("homogenized element in fine mode");
        return corr == InsulationCorrection::on ? mixed_reluctivity_xy(mat.hom, nu0) : nu0;
    }
    const double omega = n * p.drive().omega();
    switch (opt.mode) {
        case SolverMode::hom_original:
        case SolverMode::hom_naive_dc:
            return original_reluctivity_xy(mat.hom, nu0, omega, corr);
        case SolverMode::hom_refined_dc: {
            const double delta_b = frame_skin_depth(mat.hom, nu0, omega, corr);
            const auto hit = lookup_delta_h(*opt.lut, p.drive().f, state.nu.b_max[row]);
            if (lut_clamped) *lut_clamped = hit.clamped;
            const double delta_h = laminate_depth_to_frame(mat.hom, hit.delta_h / std::sqrt(double(n)), corr);
            return modified_reluctivity_xy(mat.hom, nu0, omega,
                                           ModifiedWavenumbers::from_depths(delta_b, delta_h), corr);
        }
        case SolverMode::fine_hbfem: break;
    }
    throw std::logic_error("homogenized element in fine mode");
}

namespace {

struct BlockResult {
    std::vector<cplx> a;
    double residual = 0.0;
    int clamps = 0;
};

BlockResult solve_block(const HbProblem& p, const HbState& s, int n) {
    const auto& mesh = p.mesh();
    const std::size_t nn = mesh.n_nodes();
    const int m = p.set().m;
    const double omega = p.drive().omega();
    LowRankSystem<cplx> sys(nn);
    BlockResult out;

    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        bool clamped = false;
        const cplx c = build_harmonic_tensors(p, e, n, s, &clamped) / mesh.element_length(e);
        if (clamped) ++out.clamps;
        sys.tri.add_element(e, c, -c, c);
    }
    if (n != 0) {
        const cplx jw{0.0, n * omega};
        const auto& sigma = p.sigma();
        for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
            if (sigma[e] == 0.0) continue;
            const double c = sigma[e] * mesh.element_length(e) / 6.0;
            sys.tri.add_element(e, jw * (2.0 * c), jw * c, jw * (2.0 * c));
        }
        for (const auto& con : p.constraints()) {
            sys.columns.push_back(con.w);
            sys.coeffs.push_back(-jw / con.sigma_d);
        }
    }
    const std::size_t last = nn - 1;
    if (!p.flux_driven()) sys.tri.diag[last] += p.drive().circuit_coupling(mesh.length());

    std::vector<cplx> rhs(nn, cplx{});
    if (!p.flux_driven()) rhs[last] += p.drive().field_harmonic(n);

    // harmonic coupling through nu_k, k != 0
    for (int k = std::max(-m, n - m); k <= std::min(m, n + m); ++k) {
        if (k == 0) continue;
        const int q = n - k;
        for (auto e : p.nonlinear_elements()) {
            const int row = p.nonlinear_row(e);
            if (std::abs(k) > s.nu.k_max) continue;
            const cplx nu_k = k > 0 ? s.nu.nu[row][k] : std::conj(s.nu.nu[row][-k]);
            const cplx coupling = nu_k * p.flux_scale(e);
            const cplx b = (conj_order(s.a, q, e + 1) - conj_order(s.a, q, e)) / mesh.element_length(e);
            rhs[e] += coupling * b;
            rhs[e + 1] -= coupling * b;
        }
    }

    sys.constrain(0, cplx{}, rhs);
    if (p.flux_driven()) sys.constrain(last, p.drive().flux_density_harmonic(n) * mesh.length(), rhs);
    try {
        out.a = sys.solve(rhs);
    } catch (const NumericalError& ex) {
        throw NumericalError("harmonic block n=" + std::to_string(n) + ": " + ex.what(),
                             ex.last_residual());
    }
    const auto check = sys.apply(out.a);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < nn; ++i) {
        num += std::norm(check[i] - rhs[i]);
        den += std::norm(rhs[i]);
    }
    out.residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    return out;
}

// Laminate-frame factors of the local back-transformation, composite
// 3-point Gauss-Legendre on [0, d/2] (profiles are even in z).
struct LocalQuadrature {
    std::vector<double> z;
    std::vector<double> w;  // weights sum to 1 (average over the laminate)

    explicit LocalQuadrature(double d, int panels = 16) {
        const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
        const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
        const double hp = 0.5 * d / panels;
        for (int i = 0; i < panels; ++i) {
            const double c = (i + 0.5) * hp;
            for (int q = 0; q < 3; ++q) {
                z.push_back(c + 0.5 * hp * gx[q]);
                w.push_back(0.5 * hp * gw[q] / (0.5 * d));
            }
        }
    }
};

class EnergyEvaluator {
public:
    EnergyEvaluator(const Mesh1D& mesh, const Materials& mat, const std::vector<std::vector<cplx>>& b,
                    const std::vector<double>& nu0, double omega)
        : mesh_(mesh), mat_(mat), b_(b), quad_(mat.hom.d) {
        const int m = static_cast<int>(b.size()) - 1;
        factors_.resize(mesh.n_elements());
        for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
            if (mesh.region_of(e).kind != RegionKind::homogenized) continue;
            auto& f = factors_[e];
            f.assign((m + 1) * quad_.z.size(), cplx{1.0, 0.0});
            for (int n = 1; n <= m; ++n) {
                const cplx k = analytic::wavenumber(analytic::skin_depth(nu0[e], mat.sigma, n * omega));
                for (std::size_t q = 0; q < quad_.z.size(); ++q) {
                    f[n * quad_.z.size() + q] = analytic::local_flux_from_average_k(1.0, quad_.z[q], k, mat.hom.d);
                }
            }
        }
    }

    // phase[n] = exp(j n w t)
    [[nodiscard]] double at(const std::vector<cplx>& phase, EnergyScope scope) const {
        const int m = static_cast<int>(b_.size()) - 1;
        const double gamma = mat_.hom.gamma;
        double total = 0.0;
        for (std::size_t e = 0; e < mesh_.n_elements(); ++e) {
            const auto kind = mesh_.region_of(e).kind;
            const double h = mesh_.element_length(e);
            auto series = [&](auto factor) {
                double x = (b_[0][e] * factor(0)).real();
                for (int n = 1; n <= m; ++n) x += 2.0 * (b_[n][e] * factor(n) * phase[n]).real();
                return x;
            };
            if (kind == RegionKind::laminate) {
                const double v = series([](int) { return cplx{1.0, 0.0}; });
                total += h * mat_.curve.energy_density(std::abs(v));
            } else if (kind == RegionKind::homogenized) {
                const auto& f = factors_[e];
                const std::size_t nq = quad_.z.size();
                double avg = 0.0;
                for (std::size_t q = 0; q < nq; ++q) {
                    const double v = series([&](int n) { return f[n * nq + q]; }) / gamma;
                    avg += quad_.w[q] * mat_.curve.energy_density(std::abs(v));
                }
                total += h * gamma * avg;
            } else if (scope == EnergyScope::all) {
                const double v = series([](int) { return cplx{1.0, 0.0}; });
                total += h * 0.5 * linear_element_reluctivity(mesh_, mat_, e) * v * v;
            }
        }
        return total;
    }

private:
    const Mesh1D& mesh_;
    const Materials& mat_;
    const std::vector<std::vector<cplx>>& b_;
    LocalQuadrature quad_;
    std::vector<std::vector<cplx>> factors_;
};

std::vector<cplx> phases(int m, double omega, double t) {
    std::vector<cplx> ph(m + 1);
    for (int n = 0; n <= m; ++n) ph[n] = std::exp(cplx{0.0, n * omega * t});
    return ph;
}

std::vector<double> state_nu0(const HbProblem& p, const HbState& s) {
    std::vector<double> nu0(p.mesh().n_elements(), 0.0);
    for (auto e : p.nonlinear_elements()) nu0[e] = s.nu.nu[p.nonlinear_row(e)][0].real();
    return nu0;
}

double mean_energy(const HbProblem& p, const HbState& s) {
    const int m = p.set().m;
    std::vector<std::vector<cplx>> b(m + 1);
    for (int n = 0; n <= m; ++n) b[n] = p.element_b(s.a[n]);
    const auto nu0 = state_nu0(p, s);
    const double omega = p.drive().omega();
    EnergyEvaluator ev(p.mesh(), p.materials(), b, nu0, omega);
    const int ns = p.options().n_time_samples;
    double sum = 0.0;
    for (int j = 0; j < ns; ++j) {
        sum += ev.at(phases(m, omega, p.drive().period() * j / ns), EnergyScope::core);
    }
    return sum / ns;
}

}  // namespace

HbState hb_iterate_once(const HbProblem& p, const HbState& state, double alpha, IterateInfo* info) {
    const auto& orders = p.orders();
    std::vector<BlockResult> blocks(orders.size());
    parallel_for(orders.size(), p.options().threads,
                 [&](std::size_t i) { blocks[i] = solve_block(p, state, orders[i]); });
    auto a = state.a;
    IterateInfo inf;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        const int n = orders[i];
        for (std::size_t k = 0; k < a[n].size(); ++k) a[n][k] = alpha * blocks[i].a[k] + (1.0 - alpha) * a[n][k];
        inf.max_block_residual = std::max(inf.max_block_residual, blocks[i].residual);
        inf.lut_clamps += blocks[i].clamps;
    }
    if (info) *info = inf;
    auto next = p.make_state(std::move(a));
    next.lut_clamps = inf.lut_clamps;
    return next;
}

double hb_loss(const HbProblem& p, const HbState& s) {
    const auto& mesh = p.mesh();
    const double omega = p.drive().omega();
    const auto& sigma = p.sigma();
    double total = 0.0;
    for (int n : p.orders()) {
        if (n == 0) continue;
        const auto& an = s.a[n];
        // resolved laminates: a + psi with zero net current per laminate
        std::vector<cplx> psi(p.constraints().size());
        for (std::size_t k = 0; k < psi.size(); ++k) {
            const auto& c = p.constraints()[k];
            cplx dot{};
            for (std::size_t i = 0; i < an.size(); ++i) dot += c.w[i] * an[i];
            psi[k] = -dot / c.sigma_d;
        }
        const double wn = n * omega;
        for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
            const auto kind = mesh.region_of(e).kind;
            if (kind == RegionKind::laminate && sigma[e] > 0.0) {
                const int lam = mesh.region_of(e).lamination;
                const cplx l = an[e] + psi[lam];
                const cplx r = an[e + 1] + psi[lam];
                const double q = sigma[e] * mesh.element_length(e) / 3.0 *
                                 (std::norm(l) + std::norm(r) + (std::conj(l) * r).real());
                total += 2.0 * wn * wn * q;
            } else if (kind == RegionKind::homogenized) {
                const cplx b = (an[e + 1] - an[e]) / mesh.element_length(e);
                const cplx t = build_harmonic_tensors(p, e, n, s);
                total += mesh.element_length(e) * homogenized_loss_density({{n, b}}, {t}, omega);
            }
        }
    }
    return total;
}

HarmonicSolution hb_solve(const Mesh1D& mesh, const Materials& mat, const Drive& drive,
                          const HarmonicSet& set, const SolverOptions& opt) {
    HbProblem p(mesh, mat, drive, set, opt);
    const int m = set.m;
    HbState s = p.make_state(std::vector<std::vector<cplx>>(m + 1, std::vector<cplx>(mesh.n_nodes())));
    double w_prev = 0.0;
    double p_prev = 0.0;
    double alpha = opt.relaxation;
    double prev_change = std::numeric_limits<double>::infinity();
    double prev_change2 = std::numeric_limits<double>::infinity();
    double prev_signed = 0.0;
    int rising = 0;
    std::vector<IterationRecord> trace;
    bool converged = false;
    constexpr double tiny = 1e-300;

    for (int it = 1; it <= opt.max_iter; ++it) {
        IterateInfo info;
        // the first sweep from a = 0 is the linear solve with nu_in: not relaxed
        s = hb_iterate_once(p, s, it == 1 ? 1.0 : alpha, &info);
        const double w = mean_energy(p, s);
        const double loss = hb_loss(p, s);
        trace.push_back({it, w, loss, info.max_block_residual, it == 1 ? 1.0 : alpha});
        const double signed_dw = (w - w_prev) / std::max({w, w_prev, tiny});
        const double dw = std::abs(signed_dw);
        const double dp = std::abs(loss - p_prev) / std::max({loss, p_prev, tiny});
        w_prev = w;
        p_prev = loss;
        if (dw < opt.tol_energy && dp < 10.0 * opt.tol_energy) {
            converged = true;
            break;
        }
        if (opt.auto_relax && it > 1) {
            // growing changes, or a sign flip that barely contracts (period-2 cycle)
            const bool flip = signed_dw * prev_signed < 0.0;
            const bool stalled = dw > prev_change || (flip && dw > 0.5 * prev_change2);
            rising = stalled ? rising + 1 : 0;
            if (rising >= 3 && alpha > opt.min_relaxation) {
                alpha = std::max(0.5 * alpha, opt.min_relaxation);
                rising = 0;
            }
        }
        prev_change2 = prev_change;
        prev_change = dw;
        prev_signed = signed_dw;
    }
    if (!converged) {
        const double last = trace.empty() ? 0.0 : trace.back().energy;
        std::ostringstream os;
        os << "harmonic balance did not converge in " << opt.max_iter << " iterations (mode "
           << to_string(opt.mode) << ")";
        throw HbConvergenceError(os.str(), last, trace);
    }

    HarmonicSolution sol;
    sol.mode = opt.mode;
    sol.f = drive.f;
    sol.set = set;
    sol.gamma = mat.hom.gamma;
    sol.orders = p.orders();
    sol.a = s.a;
    sol.b.resize(m + 1);
    sol.tensor.assign(m + 1, std::vector<cplx>(mesh.n_elements()));
    sol.psi.assign(m + 1, std::vector<cplx>(p.constraints().size()));
    for (int n = 0; n <= m; ++n) {
        sol.b[n] = p.element_b(s.a[n]);
        for (std::size_t k = 0; k < p.constraints().size(); ++k) {
            const auto& c = p.constraints()[k];
            cplx dot{};
            for (std::size_t i = 0; i < s.a[n].size(); ++i) dot += c.w[i] * s.a[n][i];
            sol.psi[n][k] = -dot / c.sigma_d;
        }
    }
    for (int n : p.orders()) {
        for (std::size_t e = 0; e < mesh.n_elements(); ++e) sol.tensor[n][e] = build_harmonic_tensors(p, e, n, s);
    }
    sol.nu0 = state_nu0(p, s);
    sol.b_avg_max.assign(mesh.n_elements(), 0.0);
    for (auto e : p.nonlinear_elements()) sol.b_avg_max[e] = s.nu.b_max[p.nonlinear_row(e)];
    sol.trace = std::move(trace);
    sol.iterations = static_cast<int>(sol.trace.size());
    sol.converged = true;
    sol.lut_clamps = s.lut_clamps;
    sol.dofs = p.dof_count();
    sol.loss = sol.trace.back().loss;
    sol.energy = sol.trace.back().energy;
    return sol;
}

double hb_energy_at(const HarmonicSolution& sol, const Mesh1D& mesh, const Materials& mat, double t) {
    return hb_energy_series(sol, mesh, mat, {t}).front();
}

std::vector<double> hb_energy_series(const HarmonicSolution& sol, const Mesh1D& mesh, const Materials& mat,
                                     const std::vector<double>& times) {
    const double omega = 2.0 * M_PI * sol.f;
    EnergyEvaluator ev(mesh, mat, sol.b, sol.nu0, omega);
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(ev.at(phases(sol.set.m, omega, t), EnergyScope::core));
    return out;
}

double reconstruct_time_signal(const HarmonicSolution& sol, std::size_t element, double t) {
    std::vector<cplx> c(sol.b.size());
    for (std::size_t n = 0; n < c.size(); ++n) c[n] = sol.b[n].at(element);
    return evaluate_series(c, 2.0 * M_PI * sol.f, t);
}

double reconstruct_node_signal(const HarmonicSolution& sol, std::size_t node, double t) {
    std::vector<cplx> c(sol.a.size());
    for (std::size_t n = 0; n < c.size(); ++n) c[n] = sol.a[n].at(node);
    return evaluate_series(c, 2.0 * M_PI * sol.f, t);
}

std::vector<cplx> local_profile(const HarmonicSolution& sol, const Mesh1D& mesh, const Materials& mat,
                                std::size_t element, double z_local) {
    if (!is_homogenized(sol.mode)) {
        throw std::invalid_argument("local profiles apply to homogenized solutions only");
    }
    if (element >= mesh.n_elements() || mesh.region_of(element).kind != RegionKind::homogenized) {
        throw std::invalid_argument("element is not in a homogenized region");
    }
    const double omega = 2.0 * M_PI * sol.f;
    std::vector<cplx> out(sol.b.size());
    for (std::size_t n = 0; n < out.size(); ++n) {
        const cplx lam = sol.b[n][element] / sol.gamma;
        out[n] = n == 0 ? lam
                        : analytic::local_flux_from_average(lam, z_local, sol.nu0[element], mat.sigma,
                                                            double(n) * omega, mat.hom.d);
    }
    return out;
}

std::vector<cplx> local_profile_lamination(const HarmonicSolution& sol, const Mesh1D& mesh,
                                           const Materials& mat, int lamination, double z_local) {
    // centre of laminate k in a stack centred at z = 0
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        if (mesh.region_of(e).kind != RegionKind::homogenized) continue;
        lo = std::min(lo, mesh.nodes[e]);
        hi = std::max(hi, mesh.nodes[e + 1]);
    }
    const double period = mat.hom.period();
    const int n_lam = static_cast<int>(std::lround((hi - lo) / period));
    if (!(hi > lo) || lamination < 0 || lamination >= n_lam) {
        throw std::out_of_range("lamination index out of range");
    }
    const double zc = lo + (lamination + 0.5) * period;
    const auto it = std::upper_bound(mesh.nodes.begin(), mesh.nodes.end(), zc);
    const auto e = static_cast<std::size_t>(std::distance(mesh.nodes.begin(), it) - 1);
    return local_profile(sol, mesh, mat, std::min(e, mesh.n_elements() - 1), z_local);
}

void write_solution_csv(std::ostream& os, const HarmonicSolution& sol, const std::string& header) {
    os << header << "order,kind,index,re,im\n" << std::setprecision(17);
    for (int n : sol.orders) {
        for (std::size_t i = 0; i < sol.a[n].size(); ++i) {
            os << n << ",A," << i << ',' << sol.a[n][i].real() << ',' << sol.a[n][i].imag() << '\n';
        }
        for (std::size_t i = 0; i < sol.b[n].size(); ++i) {
            os << n << ",B," << i << ',' << sol.b[n][i].real() << ',' << sol.b[n][i].imag() << '\n';
        }
    }
}

void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace, const std::string& header) {
    os << header << "iter,energy,loss,max_block_residual,relaxation\n" << std::setprecision(17);
    for (const auto& r : trace) {
        os << r.iter << ',' << r.energy << ',' << r.loss << ',' << r.max_block_residual << ',' << r.relaxation
           << '\n';
    }
}

}  // namespace lamhb
