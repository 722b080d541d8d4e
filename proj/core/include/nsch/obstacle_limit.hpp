#pragma once

// The double-obstacle limit theta_k = 1/k -> 0 of the logarithmic model.
//
// With F0(s) = [(1+s) log(1+s) + (1-s) log(1-s)]/2 the potential of index k is
// Psi_k(s) = F0(s)/k - theta0 s^2/2. Initial data for index k solve
//
//   -lap phi_k + F0'(phi_k)/k + phi_k = mu0 + theta0 phi0 + phi0,
//
// which keeps |phi_k| < 1 and tends to phi0 as k grows.

#include <string>
#include <vector>

#include "nsch/cahn_hilliard.hpp"

namespace nsch {

struct RegularizeStats {
    int iterations = 0;
    /// Max-norm residual of the returned field.
    double residual = 0.0;
};

/// Solves the regularisation problem above by damped Newton (the problem is
/// the Euler-Lagrange equation of a strictly convex functional). Throws
/// NewtonDiverged.
ScalarField regularize_initial(const ScalarField& mu0, const ScalarField& phi0, double theta0, int k,
                               RegularizeStats* stats = nullptr);

/// Residual -lap phi + F0'(phi)/k + phi - rhs, cell by cell.
ScalarField regularization_residual(const ScalarField& phi, const ScalarField& rhs, int k);

struct ObstacleTrajectory {
    /// States at t = 0, every keep_every steps and the final time.
    std::vector<CHState> states;
    /// Free energy with the indicator dropped, one entry per step (and t = 0).
    std::vector<double> free_energy;
    std::vector<double> mass;
    /// Max-norm complementarity residual per accepted step.
    std::vector<double> complementarity;
    ObstacleMultiplier final_multiplier;
};

/// Obstacle Cahn-Hilliard run with a fixed drift u. Throws ActiveSetCycling.
ObstacleTrajectory obstacle_run(const ScalarField& phi0, const MACVector& u, double horizon, const CHStepConfig& cfg,
                                const DoubleObstacle& p, long keep_every = 1);

struct ObstacleLimitConfig {
    std::vector<int> k_list{4, 16, 64, 256};
    double horizon = 0.5;
    double theta0 = 2.0;
    /// Obstacle initial datum; must satisfy |phi0| <= 1.
    ScalarField phi0;
    CHStepConfig ch;
    double c = 100.0;
};

struct ThetaLimitEntry {
    int k = 0;
    double theta = 0.0;
    /// L2 distance at the horizon to the obstacle solution (NaN on failure).
    double error = 0.0;
    double regularize_residual = 0.0;
    /// 1 - max|phi0_k|.
    double initial_separation = 0.0;
    std::string failure;
};

struct ConvergenceReport {
    std::vector<ThetaLimitEntry> entries;
    /// Trivially true for fewer than two entries.
    bool non_increasing = true;
    bool strictly_decreasing = true;
};

/// Runs the obstacle problem once and the logarithmic problem for every k, all
/// with u = 0, and reports the horizon errors. A failing k is recorded and the
/// sweep continues.
ConvergenceReport theta_limit_study(const ObstacleLimitConfig& cfg);

}  // namespace nsch
