#pragma once

// Variable-density momentum step on the MAC grid.
//
// Given phi^n, phi^{n+1}, mu^{n+1} and u^n the step solves, on every interior
// face,
//
//   rho_hat (u' - u~)/dt + N(m, u') - div(nu(phi^{n+1}) D u') + grad p' = 0,
//   div u' = 0,
//
// with the capillary predictor u~ = u^n - dt phi^n grad mu^{n+1} / rho(phi^n),
// rho_hat = (rho(phi^{n+1}) + rho(phi^n)) / 2 and N the skew-symmetric form of
// (m . grad) u for the face mass flux m = rho u + J. The time derivative splits
// as rho^n (u' - u~)/dt + (rho^{n+1} - rho^n) u' / (2 dt), so testing with u'
// gives the exact kinetic energy balance
//
//   E_kin' - E_kin(u~) + dt D_visc(u') = -|sqrt(rho^n) (u' - u~)|^2 / 2.
//
// The pressure is found by iterating a variable-coefficient projection until
// the momentum and continuity equations hold to the solver tolerance.

#include "nsch/grid.hpp"
#include "nsch/potential.hpp"

namespace nsch {

struct ModelParams {
    double rho1 = 1.0;
    double rho2 = 1.0;
    double nu1 = 1.0;
    double nu2 = 1.0;
    PotentialKind potential = FloryHuggins{};

    double rho_min() const;
    double rho_max() const;
    double nu_min() const;
    double nu_max() const;
};

/// Throws ConfigError on non-positive densities/viscosities or bad potential parameters.
void validate(const ModelParams& params);

struct FlowState {
    MACVector u;
    ScalarField p;
};

double rho_of(double phi, const ModelParams& params);
double nu_of(double phi, const ModelParams& params);
ScalarField rho_of_phi(const ScalarField& phi, const ModelParams& params);
ScalarField nu_of_phi(const ScalarField& phi, const ModelParams& params);

/// Cell density averaged onto faces (boundary faces copy the adjacent cell).
MACVector face_density(const ScalarField& phi, const ModelParams& params);

/// Relative mass flux -(rho1 - rho2)/2 grad mu; zero on boundary faces.
MACVector j_flux(const ScalarField& mu, const ModelParams& params);

/// Capillary predictor u - dt phi_face grad mu / rho_face.
MACVector capillary_predictor(const MACVector& u, const ScalarField& phi, const ScalarField& mu,
                              const ModelParams& params, double dt);

/// Integral of nu |Du|^2 with nu taken from the cell field phi.
double viscous_dissipation(const MACVector& u, const ScalarField& phi, const ModelParams& params);

struct MomentumConfig {
    double dt = 1e-4;
    double linear_tol = 1e-12;
    int linear_max = 0;
    /// Stop the pressure iteration once the last correction is below this
    /// fraction of max(|w|, dt |grad p^n| / rho), w being the intermediate
    /// velocity. The pressure term keeps the scale meaningful as u -> 0.
    double projection_tol = 1e-12;
    int projection_max = 200;
};

struct MomentumStats {
    int projection_iterations = 0;
    int velocity_iterations = 0;
    int pressure_iterations = 0;
    double divergence = 0.0;
};

/// Advances (u, p) from phi_old to phi (with mu the new chemical potential).
/// Throws ConfigError in 1D, CFLViolation, LinearSolveFailed.
FlowState momentum_step(const FlowState& flow, const ScalarField& phi, const ScalarField& mu,
                        const ScalarField& phi_old, const ModelParams& params, const MomentumConfig& cfg,
                        MomentumStats* stats = nullptr);

}  // namespace nsch
