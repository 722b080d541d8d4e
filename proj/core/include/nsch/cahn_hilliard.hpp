#pragma once

// Cahn-Hilliard time stepping with a prescribed divergence-free drift:
//
//   (phi' - phi)/dt + div(u phi_face) = div(M grad mu'),
//   mu' = alpha (phi' - phi)/dt - lap phi' + F'(phi') - theta0 phi
//
// with zero-flux boundaries. M is 1 unless a face mobility is supplied (the
// coupled stepper uses this hook). The log case is solved by safeguarded
// Newton on phi' with mu' eliminated; the obstacle case by a primal-dual
// active set iteration on (phi', mu', lambda').

#include <optional>
#include <span>
#include <vector>

#include "nsch/grid.hpp"
#include "nsch/potential.hpp"

namespace nsch {

struct CHState {
    double t = 0.0;
    ScalarField phi;
    ScalarField mu;
};

enum class CHScheme {
    /// Implicit F, explicit concave part: first order, unconditionally stable.
    ConvexSplitting,
    /// Midpoint Laplacian and secant of F: the free-energy balance closes
    /// exactly at u = 0, alpha = 0.
    DiscreteGradient,
};

enum class LinearSolver {
    /// Direct in 1D, Krylov otherwise.
    Auto,
    /// BiCGSTAB on the Newton system with a cosine-transform preconditioner.
    Krylov,
    /// Sparse LU of the monolithic (phi, mu) Newton system.
    Direct,
};

struct CHStepConfig {
    double dt = 1e-4;
    double alpha = 0.0;
    double newton_tol = 1e-10;
    int newton_max = 50;
    double linear_tol = 1e-10;
    /// 0 means 10 * cell count.
    int linear_max = 0;
    CHScheme scheme = CHScheme::ConvexSplitting;
    LinearSolver linear_solver = LinearSolver::Auto;
};

/// Throws ConfigError on dt <= 0, alpha < 0 or bad tolerances.
void validate(const CHStepConfig& cfg);

/// Throws CFLViolation when dt > 0.5 min(h) / max|u|.
void check_cfl(const MACVector& u, double dt);

/// Chemical potential of a given field: -lap phi + Psi'(phi).
ScalarField chemical_potential(const ScalarField& phi, const FloryHuggins& p);

struct CHStepStats {
    int newton_iterations = 0;
    int linear_iterations = 0;
    double residual = 0.0;
};

/// One step of the log-potential system. Throws std::invalid_argument for a
/// DoubleObstacle kind (use obstacle_ch_step).
CHState ch_step(const CHState& state, const MACVector& u, const CHStepConfig& cfg, const PotentialKind& kind,
                CHStepStats* stats = nullptr);

/// As above with face mobility M (boundary values ignored).
CHState ch_step(const CHState& state, const MACVector& u, const MACVector& mobility, const CHStepConfig& cfg,
                const FloryHuggins& p, CHStepStats* stats = nullptr);

struct ObstacleStepResult {
    CHState state;
    ObstacleMultiplier multiplier;
    int active_set_iterations = 0;
};

/// One step of the double-obstacle system; phi stays in [-1,1] exactly.
/// Throws ActiveSetCycling when the active sets do not settle in 50 sweeps.
ObstacleStepResult obstacle_ch_step(const CHState& state, const MACVector& u, const CHStepConfig& cfg,
                                    const DoubleObstacle& p, const MACVector* mobility = nullptr);

/// Runs round(horizon/dt) steps of ch_step for each alpha, from phi0.
std::vector<CHState> vanishing_viscosity_suite(const ScalarField& phi0, const MACVector& u,
                                               std::span<const double> alphas, double horizon,
                                               const CHStepConfig& cfg, const FloryHuggins& p);

struct MonitorReport {
    double sup_grad_mu = 0.0;
    /// Time integral of |grad d_t phi|^2.
    double int_grad_phit_sq = 0.0;
    /// Time integral of |grad mu|^2 + |lap mu|^2.
    double int_grad_mu_h1_sq = 0.0;
    /// Time integral of |grad u|^2 over the observed history.
    double int_grad_u_sq = 0.0;
    bool finite = true;
};

/// Running accumulator for the a-priori estimate quantities of a CH run.
class EstimateMonitor {
public:
    explicit EstimateMonitor(const CHState& initial);
    /// grad_u_sq is |grad u|^2 of the drift used for the step.
    void observe(const CHState& next, double grad_u_sq);
    const MonitorReport& report() const { return report_; }

private:
    CHState last_;
    MonitorReport report_;
};

/// history[k] are successive states; u_history[k] is the drift used from
/// history[k] to history[k+1] (so one fewer entry, or a single shared drift).
MonitorReport estimate_monitor(std::span<const CHState> history, std::span<const MACVector> u_history);

}  // namespace nsch
