#pragma once

// Fine-mesh time-domain reference solver: implicit Euler in time, P1 in
// space, nonlinear reluctivity resolved at every step.
//
// Each laminate carries no net current. This is enforced with one scalar
// gauge potential psi_k per laminate, so the electric field inside
// laminate k is -d(A + psi_k)/dt.

#include <iosfwd>
#include <vector>

#include "lamhb/model.hpp"

namespace lamhb {

enum class NonlinearMethod { newton, picard };

struct TransientOptions {
    int steps_per_period = 200;
    int n_periods = 3;
    NonlinearMethod method = NonlinearMethod::newton;
    double tol = 1e-8;      // relative residual
    int max_iter = 60;
    int record_periods = 0;  // trailing periods kept in the result, 0 = all
    bool static_start = true;  // start from the magnetostatic dc solution
};

/// Period count covering ~8 diffusion time constants of a laminate, >= 3.
int default_period_count(const Materials& mat, double d, double f);

struct TransientResult {
    double f = 0.0;
    double dt = 0.0;
    int steps_per_period = 0;
    int n_periods = 0;
    int first_step = 0;  // global step index of t[0]
    std::vector<double> t;
    std::vector<std::vector<double>> a;    // [sample][node], Wb/m
    std::vector<std::vector<double>> b;    // [sample][element], T
    std::vector<std::vector<double>> psi;  // [sample][lamination]
    /// Dissipated power per unit cross-section (W/m^2) over the step ending
    /// at t[i]; loss[0] belongs to the step before the first record.
    std::vector<double> loss;

    [[nodiscard]] std::size_t n_samples() const { return t.size(); }
};

TransientResult transient_solve(const Mesh1D& mesh, const Materials& mat, const Drive& drive,
                                const TransientOptions& opt);

/// Magnetostatic solution for the dc part of the drive (nodal A).
std::vector<double> static_solve(const Mesh1D& mesh, const Materials& mat, const Drive& drive,
                                 double tol = 1e-10, int max_iter = 100);

/// Time average of the dissipated power over the final period, W/m^2.
double compute_losses_transient(const TransientResult& r);

enum class EnergyScope { core, all };

/// Stored magnetic energy per unit cross-section, J/m^2, one value per
/// recorded sample.
std::vector<double> compute_energy_transient(const TransientResult& r, const Mesh1D& mesh,
                                             const Materials& mat,
                                             EnergyScope scope = EnergyScope::core);

struct AverageFlux {
    std::vector<double> t;
    std::vector<double> b_avg;  // final period, thickness average
    double b_max = 0.0;         // max |b_avg|
};

AverageFlux average_flux_density(const TransientResult& r, const Mesh1D& mesh, int lamination);

/// Long-format CSV: t,kind,index,value for nodal A and element B.
void write_transient_csv(std::ostream& os, const TransientResult& r, const std::string& header);

}  // namespace lamhb
