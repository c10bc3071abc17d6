#pragma once

// Multiharmonic (harmonic-balance) solver with block-Jacobi successive
// substitution. Every harmonic order is an independent linear solve per
// iteration; the nonlinearity couples them through the Fourier
// coefficients of the reluctivity.
//
// Coefficients are two-sided: x(t) = x_0 + 2 Re sum_{n>=1} x_n e^{j n w t}.

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "lamhb/errors.hpp"
#include "lamhb/lut.hpp"
#include "lamhb/model.hpp"
#include "lamhb/spectrum.hpp"

namespace lamhb {

enum class Parity { odd_only, all };

std::string to_string(Parity p);
Parity parity_from_string(const std::string& s);

struct HarmonicSet {
    int m = 5;
    Parity parity = Parity::all;

    /// Retained orders n >= 0 in increasing order.
    [[nodiscard]] std::vector<int> orders() const;
    [[nodiscard]] bool contains(int n) const;
    void validate() const;
};

enum class SolverMode { fine_hbfem, hom_original, hom_naive_dc, hom_refined_dc };

std::string to_string(SolverMode m);
SolverMode solver_mode_from_string(const std::string& s);
[[nodiscard]] bool is_homogenized(SolverMode m);

struct SolverOptions {
    SolverMode mode = SolverMode::fine_hbfem;
    double tol_energy = 1e-4;
    int max_iter = 200;
    double relaxation = 1.0;
    bool auto_relax = true;
    double min_relaxation = 0.0625;
    int n_time_samples = 64;
    std::shared_ptr<const LookupTable> lut;
    InsulationCorrection corrections = InsulationCorrection::on;
    int threads = 1;

    void validate(const HarmonicSet& set) const;
};

struct IterationRecord {
    int iter;
    double energy;              // time-averaged core energy, J/m^2
    double loss;                // W/m^2
    double max_block_residual;  // relative
    double relaxation;
};

/// Fixed-point state: nodal coefficients for orders 0..m (unretained orders
/// stay zero) plus the reluctivity harmonics they imply.
struct HbState {
    std::vector<std::vector<cplx>> a;   // [n][node]
    ReluctivityHarmonics nu;            // rows follow HbProblem::nonlinear_elements()
    int lut_clamps = 0;                 // clamped lookups while building this state's tensors
};

/// Immutable per-run data derived from the inputs.
class HbProblem {
public:
    HbProblem(const Mesh1D& mesh, const Materials& mat, const Drive& drive, const HarmonicSet& set,
              const SolverOptions& opt);

    [[nodiscard]] const Mesh1D& mesh() const { return mesh_; }
    [[nodiscard]] const Materials& materials() const { return mat_; }
    [[nodiscard]] const Drive& drive() const { return drive_; }
    [[nodiscard]] const HarmonicSet& set() const { return set_; }
    [[nodiscard]] const SolverOptions& options() const { return opt_; }
    [[nodiscard]] const std::vector<int>& orders() const { return orders_; }
    [[nodiscard]] const std::vector<std::size_t>& nonlinear_elements() const { return nl_elems_; }
    /// Row of element e in ReluctivityHarmonics, -1 for linear elements.
    [[nodiscard]] int nonlinear_row(std::size_t e) const { return nl_row_[e]; }
    [[nodiscard]] const std::vector<double>& sigma() const { return sigma_; }
    [[nodiscard]] const std::vector<LaminationConstraint>& constraints() const { return cons_; }
    /// Laminate flux per average flux: 1/gamma in homogenized elements, else 1.
    [[nodiscard]] double flux_scale(std::size_t e) const;
    [[nodiscard]] bool flux_driven() const { return drive_.boundary == BoundaryKind::dirichlet_flux; }
    /// Unknowns left after the gauge (and flux) constraints.
    [[nodiscard]] std::size_t dof_count() const;

    /// Element flux coefficients of order n.
    [[nodiscard]] std::vector<cplx> element_b(const std::vector<cplx>& a_n) const;

    /// State for the given nodal coefficients.
    [[nodiscard]] HbState make_state(std::vector<std::vector<cplx>> a) const;

private:
    const Mesh1D& mesh_;
    const Materials& mat_;
    Drive drive_;
    HarmonicSet set_;
    SolverOptions opt_;
    std::vector<int> orders_;
    std::vector<std::size_t> nl_elems_;
    std::vector<int> nl_row_;
    std::vector<double> sigma_;
    std::vector<LaminationConstraint> cons_;
};

/// Diagonal-block reluctivity of element e at order n (see SolverMode).
/// `lut_clamped` is set when the table lookup was clamped.
cplx build_harmonic_tensors(const HbProblem& p, std::size_t e, int n, const HbState& state,
                            bool* lut_clamped = nullptr);

struct IterateInfo {
    double max_block_residual = 0.0;
    int lut_clamps = 0;
};

/// One block-Jacobi sweep followed by relaxation with factor alpha.
HbState hb_iterate_once(const HbProblem& p, const HbState& state, double alpha,
                        IterateInfo* info = nullptr);

struct HarmonicSolution {
    SolverMode mode = SolverMode::fine_hbfem;
    double f = 0.0;
    HarmonicSet set;
    double gamma = 1.0;
    std::vector<int> orders;
    std::vector<std::vector<cplx>> a;    // [n][node], n = 0..m
    std::vector<std::vector<cplx>> b;    // [n][element]
    std::vector<std::vector<cplx>> psi;  // [n][lamination], resolved laminates
    std::vector<std::vector<cplx>> tensor;  // [n][element], diagonal-block reluctivity
    std::vector<double> nu0;             // [element], dc reluctivity (laminate law)
    std::vector<double> b_avg_max;       // [element], peak laminate-average flux
    std::vector<IterationRecord> trace;
    int iterations = 0;
    bool converged = false;
    int lut_clamps = 0;
    std::size_t dofs = 0;
    double loss = 0.0;    // W/m^2
    double energy = 0.0;  // time-averaged core energy, J/m^2
};

class HbConvergenceError : public NumericalError {
public:
    HbConvergenceError(const std::string& what, double last, std::vector<IterationRecord> trace)
        : NumericalError(what, last), trace_(std::move(trace)) {}
    [[nodiscard]] const std::vector<IterationRecord>& trace() const { return trace_; }

private:
    std::vector<IterationRecord> trace_;
};

HarmonicSolution hb_solve(const Mesh1D& mesh, const Materials& mat, const Drive& drive,
                          const HarmonicSet& set, const SolverOptions& opt);

/// Time-averaged dissipated power per unit cross-section, W/m^2.
double hb_loss(const HbProblem& p, const HbState& s);

/// Core magnetic energy at time t, J/m^2 (homogenized elements use the
/// local back-transformation of the average flux).
double hb_energy_at(const HarmonicSolution& sol, const Mesh1D& mesh, const Materials& mat, double t);

std::vector<double> hb_energy_series(const HarmonicSolution& sol, const Mesh1D& mesh,
                                     const Materials& mat, const std::vector<double>& times);

/// Series value at time t of element flux (kind B) or nodal potential (kind A).
double reconstruct_time_signal(const HarmonicSolution& sol, std::size_t element, double t);
double reconstruct_node_signal(const HarmonicSolution& sol, std::size_t node, double t);

/// Local laminate flux per order at z_local inside the laminate covered by
/// element e (homogenized modes only).
std::vector<cplx> local_profile(const HarmonicSolution& sol, const Mesh1D& mesh, const Materials& mat,
                                std::size_t element, double z_local);

/// Same for lamination k of the original stack geometry.
std::vector<cplx> local_profile_lamination(const HarmonicSolution& sol, const Mesh1D& mesh,
                                           const Materials& mat, int lamination, double z_local);

void write_solution_csv(std::ostream& os, const HarmonicSolution& sol, const std::string& header);
void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace,
                     const std::string& header);

}  // namespace lamhb
