#include "nsch/stationary.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <string>

#include "nsch/errors.hpp"
#include "sparse_ops.hpp"

namespace nsch {

namespace {

constexpr double kBound = 1.0 - 1e-12;

// q(phi) = -lap phi + Psi'(phi).
void chemical_part(const ScalarField& phi, const FloryHuggins& p, ScalarField& q) {
    q = laplacian_neumann(phi);
    for (std::size_t k = 0; k < q.size(); ++k) q[k] = -q[k] + psi_prime(phi[k], p);
}

// Mean of q without rounding drift for constant fields.
double stable_mean(const ScalarField& q) {
    double s = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) s += q[k] - q[0];
    return q[0] + s / static_cast<double>(q.size());
}

struct Residuals {
    ScalarField f1;
    double f2 = 0.0;
    double merit = 0.0;
};

Residuals residuals(const ScalarField& phi, double mu, double m, const FloryHuggins& p) {
    Residuals r{ScalarField(phi.grid())};
    chemical_part(phi, p, r.f1);
    for (auto& v : r.f1.values()) v -= mu;
    r.f2 = mean(phi) - m;
    double s = 0.0;
    for (double v : r.f1.values()) s += v * v;
    const double nf2 = static_cast<double>(phi.size()) * r.f2;
    r.merit = std::sqrt(s + nf2 * nf2);
    return r;
}

StationarySolution solve_log(const ScalarField& guess, double m, const FloryHuggins& p, const StationaryOptions& opts) {
    const Grid& g = guess.grid();
    const int n = static_cast<int>(g.cell_count());
    if (!(guess.max_abs() < 1.0)) throw std::domain_error("stationary_solve: guess must satisfy |phi| < 1");

    ScalarField phi = guess;
    ScalarField q(g);
    chemical_part(phi, p, q);
    double mu = stable_mean(q);
    Residuals r = residuals(phi, mu, m, p);

    detail::Triplets base;
    detail::add_neg_laplacian(g, nullptr, 1.0, 0, 0, base);
    for (int k = 0; k < n; ++k) {
        base.emplace_back(k, n, -1.0);
        base.emplace_back(n, k, 1.0 / n);
    }
    Eigen::SparseLU<detail::SpMat, Eigen::COLAMDOrdering<int>> lu;
    bool analyzed = false;

    auto converged = [&](const Residuals& res) {
        return norm_cells(res.f1) <= opts.tol && std::abs(res.f2) <= 1e-12;
    };

    int it = 0;
    while (!converged(r)) {
        if (it >= opts.max_iter || !std::isfinite(r.merit)) {
            throw NewtonDiverged("stationary_solve: Newton did not reach tolerance (residual " +
                                     std::to_string(norm_cells(r.f1)) + ")",
                                 norm_cells(r.f1), it);
        }
        ++it;
        detail::Triplets trip = base;
        for (int k = 0; k < n; ++k) trip.emplace_back(k, k, psi_second(phi[k], p));
        const detail::SpMat a = detail::assemble(n + 1, n + 1, trip);
        if (!analyzed) {
            lu.analyzePattern(a);
            analyzed = true;
        }
        lu.factorize(a);
        if (lu.info() != Eigen::Success) throw LinearSolveFailed("stationary_solve: singular Newton matrix");
        Eigen::VectorXd rhs(n + 1);
        for (int k = 0; k < n; ++k) rhs[k] = -r.f1[k];
        rhs[n] = -r.f2;
        const Eigen::VectorXd dx = lu.solve(rhs);

        double tau = 1.0;
        for (int k = 0; k < n; ++k) {
            const double next = phi[k] + dx[k];
            if (next > kBound) tau = std::min(tau, 0.99 * (1.0 - phi[k]) / dx[k]);
            if (next < -kBound) tau = std::min(tau, 0.99 * (-1.0 - phi[k]) / dx[k]);
        }
        ScalarField trial(g);
        Residuals rt{ScalarField(g)};
        for (int ls = 0;; ++ls) {
            for (int k = 0; k < n; ++k) trial[k] = std::clamp(phi[k] + tau * dx[k], -kBound, kBound);
            rt = residuals(trial, mu + tau * dx[n], m, p);
            if ((std::isfinite(rt.merit) && rt.merit <= (1.0 - 1e-4 * tau) * r.merit) || ls >= 30) break;
            tau *= 0.5;
        }
        phi = trial;
        mu += tau * dx[n];
        r = std::move(rt);
    }

    StationarySolution sol{phi, mu, norm_cells(r.f1), 1.0 - phi.max_abs(), it, std::nullopt};
    return sol;
}

StationarySolution solve_obstacle(const ScalarField& guess, double m, const DoubleObstacle& p,
                                  const StationaryOptions& opts) {
    const Grid& g = guess.grid();
    const int n = static_cast<int>(g.cell_count());
    std::vector<bool> high(n), low(n);
    for (int k = 0; k < n; ++k) {
        high[k] = guess[k] >= 1.0;
        low[k] = guess[k] <= -1.0;
    }
    Eigen::VectorXd sol;
    int sweep = 0;
    for (;; ++sweep) {
        if (sweep >= opts.max_iter) {
            throw ActiveSetCycling("stationary_solve: active sets did not settle in " + std::to_string(opts.max_iter) +
                                   " sweeps");
        }
        detail::Triplets trip;
        detail::add_neg_laplacian(g, nullptr, 1.0, 0, 0, trip);
        detail::add_identity(n, -p.theta0, 0, 0, trip);
        detail::add_identity(n, 1.0, 0, n, trip);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n + 1);
        for (int k = 0; k < n; ++k) {
            trip.emplace_back(k, 2 * n, -1.0);
            trip.emplace_back(2 * n, k, 1.0 / n);
            if (high[k] || low[k]) {
                trip.emplace_back(n + k, k, 1.0);
                rhs[n + k] = high[k] ? 1.0 : -1.0;
            } else {
                trip.emplace_back(n + k, n + k, 1.0);
            }
        }
        rhs[2 * n] = m;
        const detail::SpMat a = detail::assemble(2 * n + 1, 2 * n + 1, trip);
        Eigen::SparseLU<detail::SpMat, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(a);
        if (lu.info() != Eigen::Success) throw LinearSolveFailed("stationary_solve: singular active-set system");
        sol = lu.solve(rhs);
        bool changed = false;
        for (int k = 0; k < n; ++k) {
            const bool h = sol[n + k] + p.c * (sol[k] - 1.0) > 0.0;
            const bool l = sol[n + k] + p.c * (sol[k] + 1.0) < 0.0;
            changed = changed || h != high[k] || l != low[k];
            high[k] = h;
            low[k] = l;
        }
        if (!changed) break;
    }

    ScalarField phi(g), lambda(g);
    for (int k = 0; k < n; ++k) {
        phi[k] = high[k] ? 1.0 : (low[k] ? -1.0 : sol[k]);
        lambda[k] = (high[k] || low[k]) ? sol[n + k] : 0.0;
    }
    const double mu = sol[2 * n];
    ScalarField res = laplacian_neumann(phi);
    for (int k = 0; k < n; ++k) res[k] = -res[k] - p.theta0 * phi[k] + lambda[k] - mu;

    StationarySolution out{phi, mu, norm_cells(res), 1.0 - phi.max_abs(), sweep + 1,
                           ObstacleMultiplier{lambda, low, high}};
    return out;
}

}  // namespace

StationarySolution stationary_solve(const ScalarField& phi_guess, double m, const PotentialKind& kind,
                                    const StationaryOptions& opts) {
    if (!(std::abs(m) < 1.0)) throw ConfigError("stationary_solve: target mean must satisfy |m| < 1");
    if (const auto* fh = std::get_if<FloryHuggins>(&kind)) return solve_log(phi_guess, m, *fh, opts);
    return solve_obstacle(phi_guess, m, std::get<DoubleObstacle>(kind), opts);
}

StationarityResidual stationarity_residual(const State& state) {
    StationarityResidual r;
    r.grad_mu_norm = norm_faces(gradient_to_faces(state.mu));
    r.u_norm = norm_faces(state.u);
    ScalarField centred = state.mu;
    const double m = mean(state.mu);
    for (auto& v : centred.values()) v -= m;
    r.mu_deviation = norm_cells(centred);
    return r;
}

}  // namespace nsch
