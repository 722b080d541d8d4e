#include "nsch/obstacle_limit.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsch/diagnostics.hpp"
#include "nsch/errors.hpp"
#include "sparse_ops.hpp"

namespace nsch {

namespace {

constexpr double kBound = 1.0 - 1e-15;

double f0_prime(double s) { return std::atanh(s); }
double f0_second(double s) { return 1.0 / ((1.0 - s) * (1.0 + s)); }
double f0_value(double s) { return 0.5 * ((1.0 + s) * std::log1p(s) + (1.0 - s) * std::log1p(-s)); }

// Convex functional whose critical point is the regularised datum.
double regularization_energy(const ScalarField& phi, const ScalarField& rhs, int k) {
    const MACVector grad = gradient_to_faces(phi);
    double s = 0.0;
    for (std::size_t f = 0; f < grad.size(); ++f) s += 0.5 * grad[f] * grad[f];
    for (std::size_t c = 0; c < phi.size(); ++c) {
        s += f0_value(phi[c]) / k + 0.5 * phi[c] * phi[c] - rhs[c] * phi[c];
    }
    return s;
}

}  // namespace

ScalarField regularization_residual(const ScalarField& phi, const ScalarField& rhs, int k) {
    ScalarField r = laplacian_neumann(phi);
    for (std::size_t c = 0; c < r.size(); ++c) r[c] = -r[c] + f0_prime(phi[c]) / k + phi[c] - rhs[c];
    return r;
}

ScalarField regularize_initial(const ScalarField& mu0, const ScalarField& phi0, double theta0, int k,
                               RegularizeStats* stats) {
    if (k < 1) throw ConfigError("regularize_initial: k must be >= 1");
    const Grid& g = phi0.grid();
    const int n = static_cast<int>(g.cell_count());
    ScalarField rhs(g);
    for (int c = 0; c < n; ++c) rhs[c] = mu0[c] + theta0 * phi0[c] + phi0[c];
    if (!rhs.all_finite()) throw ConfigError("regularize_initial: right-hand side is not finite");

    ScalarField phi(g);
    for (int c = 0; c < n; ++c) phi[c] = std::clamp(phi0[c], -0.5, 0.5);
    ScalarField r = regularization_residual(phi, rhs, k);
    double energy = regularization_energy(phi, rhs, k);

    detail::Triplets base;
    detail::add_neg_laplacian(g, nullptr, 1.0, 0, 0, base);
    Eigen::SimplicialLDLT<detail::SpMat> chol;
    bool analyzed = false;

    constexpr double kTol = 1e-11;
    constexpr int kMaxIter = 200;
    int it = 0;
    while (!(r.max_abs() <= kTol)) {
        if (it >= kMaxIter || !r.all_finite()) {
            throw NewtonDiverged("regularize_initial: Newton did not converge for k = " + std::to_string(k),
                                 r.max_abs(), it);
        }
        ++it;
        detail::Triplets trip = base;
        for (int c = 0; c < n; ++c) trip.emplace_back(c, c, f0_second(phi[c]) / k + 1.0);
        const detail::SpMat a = detail::assemble(n, n, trip);
        if (!analyzed) {
            chol.analyzePattern(a);
            analyzed = true;
        }
        chol.factorize(a);
        if (chol.info() != Eigen::Success) throw LinearSolveFailed("regularize_initial: factorization failed");
        Eigen::VectorXd b(n);
        for (int c = 0; c < n; ++c) b[c] = -r[c];
        const Eigen::VectorXd dx = chol.solve(b);

        double tau = 1.0;
        for (int c = 0; c < n; ++c) {
            const double next = phi[c] + dx[c];
            if (next > kBound) tau = std::min(tau, 0.99 * (1.0 - phi[c]) / dx[c]);
            if (next < -kBound) tau = std::min(tau, 0.99 * (-1.0 - phi[c]) / dx[c]);
        }
        ScalarField trial(g);
        double trial_energy = energy;
        for (int ls = 0; ls < 60; ++ls) {
            for (int c = 0; c < n; ++c) trial[c] = std::clamp(phi[c] + tau * dx[c], -kBound, kBound);
            trial_energy = regularization_energy(trial, rhs, k);
            if (trial_energy <= energy) break;
            tau *= 0.5;
        }
        // Near the minimiser the energy stalls at rounding level; fall back to
        // residual decrease so the last quadratic steps are not rejected.
        const ScalarField rt = regularization_residual(trial, rhs, k);
        if (trial_energy > energy && rt.max_abs() >= r.max_abs()) {
            throw NewtonDiverged("regularize_initial: line search failed for k = " + std::to_string(k), r.max_abs(),
                                 it);
        }
        phi = trial;
        energy = trial_energy;
        r = rt;
    }
    if (stats) *stats = {it, r.max_abs()};
    return phi;
}

ObstacleTrajectory obstacle_run(const ScalarField& phi0, const MACVector& u, double horizon, const CHStepConfig& cfg,
                                const DoubleObstacle& p, long keep_every) {
    if (phi0.max_abs() > 1.0) throw ConfigError("obstacle_run: initial data must satisfy |phi0| <= 1");
    if (keep_every < 1) throw ConfigError("obstacle_run: keep_every must be >= 1");
    const long steps = std::lround(horizon / cfg.dt);
    const Grid& g = phi0.grid();
    ScalarField mu0 = laplacian_neumann(phi0);
    for (std::size_t c = 0; c < mu0.size(); ++c) mu0[c] = -mu0[c] - p.theta0 * phi0[c];

    ObstacleTrajectory out{{}, {}, {}, {}, ObstacleMultiplier{ScalarField(g), std::vector<bool>(g.cell_count()),
                                                              std::vector<bool>(g.cell_count())}};
    CHState s{0.0, phi0, mu0};
    const PotentialKind kind{p};
    out.states.push_back(s);
    out.free_energy.push_back(free_energy(s.phi, kind));
    out.mass.push_back(mean(s.phi));
    for (long step = 1; step <= steps; ++step) {
        ObstacleStepResult r = obstacle_ch_step(s, u, cfg, p);
        r.state.t = static_cast<double>(step) * cfg.dt;
        const ScalarField comp = obstacle_complementarity_residual(r.state.phi, r.multiplier.lambda, p.c);
        out.complementarity.push_back(comp.max_abs());
        out.free_energy.push_back(free_energy(r.state.phi, kind));
        out.mass.push_back(mean(r.state.phi));
        s = std::move(r.state);
        out.final_multiplier = std::move(r.multiplier);
        if (step % keep_every == 0 || step == steps) out.states.push_back(s);
    }
    return out;
}

ConvergenceReport theta_limit_study(const ObstacleLimitConfig& cfg) {
    if (cfg.k_list.empty()) throw ConfigError("obstacle.k_list must not be empty");
    for (std::size_t i = 0; i < cfg.k_list.size(); ++i) {
        if (cfg.k_list[i] < 1 || (i > 0 && cfg.k_list[i] <= cfg.k_list[i - 1])) {
            throw ConfigError("obstacle.k_list must be strictly increasing positive integers");
        }
    }
    const Grid& g = cfg.phi0.grid();
    const MACVector u(g);
    const DoubleObstacle dob{cfg.theta0, cfg.c};
    const ObstacleTrajectory reference = obstacle_run(cfg.phi0, u, cfg.horizon, cfg.ch, dob, 1L << 40);
    const ScalarField& phi_do = reference.states.back().phi;

    ScalarField mu0 = laplacian_neumann(cfg.phi0);
    for (std::size_t c = 0; c < mu0.size(); ++c) mu0[c] = -mu0[c] - cfg.theta0 * cfg.phi0[c];

    ConvergenceReport rep;
    const long steps = std::lround(cfg.horizon / cfg.ch.dt);
    for (int k : cfg.k_list) {
        ThetaLimitEntry e;
        e.k = k;
        e.theta = 1.0 / k;
        try {
            RegularizeStats rs;
            const ScalarField phik = regularize_initial(mu0, cfg.phi0, cfg.theta0, k, &rs);
            e.regularize_residual = rs.residual;
            e.initial_separation = 1.0 - phik.max_abs();
            const FloryHuggins fh{1.0 / k, cfg.theta0};
            CHState s{0.0, phik, chemical_potential(phik, fh)};
            for (long step = 0; step < steps; ++step) s = ch_step(s, u, cfg.ch, PotentialKind{fh});
            e.error = norm_cells(s.phi - phi_do);
        } catch (const std::exception& ex) {
            e.error = std::numeric_limits<double>::quiet_NaN();
            e.failure = ex.what();
        }
        rep.entries.push_back(e);
    }
    for (std::size_t i = 1; i < rep.entries.size(); ++i) {
        const double a = rep.entries[i - 1].error;
        const double b = rep.entries[i].error;
        if (!(b <= a)) rep.non_increasing = false;
        if (!(b < a)) rep.strictly_decreasing = false;
    }
    return rep;
}

}  // namespace nsch
