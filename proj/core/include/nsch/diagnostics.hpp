#pragma once

// Scalar observables of a state and checks over whole runs.

#include <span>
#include <vector>

#include "nsch/momentum.hpp"
#include "nsch/state.hpp"

namespace nsch {

struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double E_total = 0.0;
    double E_kin = 0.0;
    double E_free = 0.0;
    double D_visc = 0.0;
    double D_chem = 0.0;
    double u_L2 = 0.0;
    double grad_mu_L2 = 0.0;
    double grad_mu_H1 = 0.0;
    double phi_min = 0.0;
    double phi_max = 0.0;
    double sep_delta = 0.0;
    double stat_mu_residual = 0.0;
    /// E_total - E_total(prev) + dt (D_visc + D_chem); 0 without a previous state.
    double energy_defect = 0.0;
};

using DiagnosticsSeries = std::vector<DiagnosticsRecord>;

/// Sum over faces of rho(phi)_face |u|^2 / 2.
double kinetic_energy(const MACVector& u, const ScalarField& phi, const ModelParams& params);
/// Sum of |grad phi|^2 / 2 over faces plus Psi(phi) over cells. Infinite if an
/// obstacle state leaves [-1,1].
double free_energy(const ScalarField& phi, const PotentialKind& kind);
/// |grad mu|^2 summed over faces.
double chemical_dissipation(const ScalarField& mu);

DiagnosticsRecord record(const State& state, const ModelParams& params);
DiagnosticsRecord record(const State& state, const State* prev, const ModelParams& params, double dt);
/// Same as above but reuses the energy of an already computed previous record.
DiagnosticsRecord record(const State& state, const DiagnosticsRecord& prev, const ModelParams& params, double dt);

struct SeparationReport {
    double t_sp = 0.0;
    double delta = 0.0;
};

/// First recorded time after which sep_delta stays above half its final value,
/// and the minimum of sep_delta from then on. Throws NotSeparated when the
/// final sep_delta is below 1e-6.
SeparationReport separation_time(std::span<const DiagnosticsRecord> series);

struct WeakStrongDistance {
    double t = 0.0;
    double D = 0.0;
};

/// D = sum rho(phi_a)|u_a - u_b|^2/2 + |lap(phi_a - phi_b)|^2/2 at every time
/// present in both histories. Throws GridMismatch.
std::vector<WeakStrongDistance> weak_strong_distance(std::span<const State> a, std::span<const State> b,
                                                     const ModelParams& params);
WeakStrongDistance weak_strong_distance(const State& a, const State& b, const ModelParams& params);

}  // namespace nsch
