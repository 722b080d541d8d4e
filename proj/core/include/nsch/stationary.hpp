#pragma once

// Stationary Cahn-Hilliard states with prescribed mean:
//
//   -lap phi + Psi'(phi) = mu_inf (constant),   mean(phi) = m,
//
// and the double-obstacle analogue -lap phi - theta0 phi + lambda = mu_inf with
// lambda in the subdifferential of the indicator of [-1,1].

#include <optional>

#include "nsch/potential.hpp"
#include "nsch/state.hpp"

namespace nsch {

struct StationarySolution {
    ScalarField phi_inf;
    double mu_inf = 0.0;
    /// L2 norm of -lap phi + Psi'(phi) - mu_inf (obstacle: with lambda).
    double residual = 0.0;
    /// 1 - max|phi_inf|.
    double separation = 0.0;
    int iterations = 0;
    /// Obstacle case only; empty otherwise.
    std::optional<ObstacleMultiplier> multiplier;
};

struct StationaryOptions {
    double tol = 1e-10;
    int max_iter = 50;
};

/// Damped Newton on the bordered system for (phi, mu_inf) (log potential) or a
/// primal-dual active set iteration (double obstacle). The obstacle iteration
/// starts from the contact set {|phi_guess| = 1}; a guess without contact
/// typically leads to the trivial state. Throws NewtonDiverged (log) or
/// ActiveSetCycling (obstacle) when the tolerance is not reached.
StationarySolution stationary_solve(const ScalarField& phi_guess, double m, const PotentialKind& kind,
                                    const StationaryOptions& opts = {});

struct StationarityResidual {
    double grad_mu_norm = 0.0;
    double u_norm = 0.0;
    /// |mu - mean(mu)| in L2.
    double mu_deviation = 0.0;
};

StationarityResidual stationarity_residual(const State& state);

}  // namespace nsch
