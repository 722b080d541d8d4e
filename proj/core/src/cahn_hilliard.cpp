#include "nsch/cahn_hilliard.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nsch/errors.hpp"
#include "nsch/krylov.hpp"
#include "nsch/spectral.hpp"
#include "sparse_ops.hpp"
#include "stencil.hpp"

namespace nsch {

namespace {

using detail::FluxStencil;

constexpr double kBound = 1.0 - 1e-12;
constexpr double kFractionToBoundary = 0.99;

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double sum(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

// Newton problem for the log potential with mu eliminated.
class LogProblem {
public:
    LogProblem(const CHState& state, const MACVector& u, const MACVector* mobility, const CHStepConfig& cfg,
               const FloryHuggins& p)
        : g_(state.phi.grid()),
          n_(g_.cell_count()),
          cfg_(cfg),
          p_(p),
          phin_(state.phi.values().begin(), state.phi.values().end()),
          lm_(g_, mobility),
          l0_(g_, nullptr),
          adv_(n_, 0.0),
          l0_phin_(n_, 0.0),
          kappa_(cfg.scheme == CHScheme::DiscreteGradient ? 0.5 : 1.0) {
        if (u.max_abs() > 0.0) {
            const ScalarField a = advect_scalar(u, state.phi);
            std::copy(a.values().begin(), a.values().end(), adv_.begin());
        }
        l0_.apply(phin_, l0_phin_);
    }

    std::size_t size() const { return n_; }
    std::span<const double> phin() const { return phin_; }
    const FluxStencil& lm() const { return lm_; }
    const FluxStencil& l0() const { return l0_; }
    double kappa() const { return kappa_; }

    void chemical_potential(std::span<const double> phi, std::span<double> mu) const {
        const double dt = cfg_.dt;
        std::vector<double> lap(n_);
        l0_.apply(phi, lap);
        if (cfg_.scheme == CHScheme::ConvexSplitting) {
            for (std::size_t k = 0; k < n_; ++k) {
                mu[k] = cfg_.alpha * (phi[k] - phin_[k]) / dt + lap[k] + F_prime(phi[k], p_.theta) -
                        p_.theta0 * phin_[k];
            }
        } else {
            for (std::size_t k = 0; k < n_; ++k) {
                mu[k] = cfg_.alpha * (phi[k] - phin_[k]) / dt + 0.5 * (lap[k] + l0_phin_[k]) +
                        F_secant(phi[k], phin_[k], p_.theta) - 0.5 * p_.theta0 * (phi[k] + phin_[k]);
            }
        }
    }

    // Returns dt * R(phi) and fills mu.
    void scaled_residual(std::span<const double> phi, std::span<double> mu, std::span<double> r) const {
        chemical_potential(phi, mu);
        lm_.apply(mu, r);
        const double dt = cfg_.dt;
        for (std::size_t k = 0; k < n_; ++k) r[k] = (phi[k] - phin_[k]) + dt * (adv_[k] + r[k]);
    }

    // Diagonal part of d mu / d phi.
    void jacobian_diagonal(std::span<const double> phi, std::span<double> d) const {
        const double a = cfg_.alpha / cfg_.dt;
        for (std::size_t k = 0; k < n_; ++k) {
            if (cfg_.scheme == CHScheme::ConvexSplitting) {
                d[k] = a + F_second(phi[k], p_.theta);
            } else {
                d[k] = a + F_secant_da(phi[k], phin_[k], p_.theta) - 0.5 * p_.theta0;
            }
        }
    }

private:
    const Grid& g_;
    std::size_t n_;
    CHStepConfig cfg_;
    FloryHuggins p_;
    std::vector<double> phin_;
    FluxStencil lm_;
    FluxStencil l0_;
    std::vector<double> adv_;
    std::vector<double> l0_phin_;
    double kappa_;
};

// Solves (I + dt L_M (diag(d) + kappa L0)) x = b, i.e. dt * T x = b.
class NewtonLinearSolver {
public:
    NewtonLinearSolver(const LogProblem& prob, const Grid& g, const CHStepConfig& cfg, const MACVector* mobility)
        : prob_(prob), g_(g), cfg_(cfg), mobility_(mobility) {
        direct_ = cfg.linear_solver == LinearSolver::Direct || (cfg.linear_solver == LinearSolver::Auto && g.is_1d());
    }

    // Returns iterations used (0 for the direct path).
    int solve(std::span<const double> d, std::span<const double> b, std::span<double> x) {
        return direct_ ? solve_direct(d, b, x) : solve_krylov(d, b, x);
    }

private:
    int solve_krylov(std::span<const double> d, std::span<const double> b, std::span<double> x) {
        const std::size_t n = prob_.size();
        const double dt = cfg_.dt;
        const double kappa = prob_.kappa();
        std::vector<double> w(n), lw(n);
        auto apply = [&](std::span<const double> v, std::span<double> out) {
            prob_.l0().apply(v, lw);
            for (std::size_t k = 0; k < n; ++k) w[k] = d[k] * v[k] + kappa * lw[k];
            prob_.lm().apply(w, out);
            for (std::size_t k = 0; k < n; ++k) out[k] = v[k] + dt * out[k];
        };
        const double c_bar = std::max(0.0, sum(d) / static_cast<double>(n));
        const double m_bar = prob_.lm().mean_mobility();
        NeumannDct& dct = neumann_dct(g_);
        std::vector<double> symbol(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double lam = dct.eigenvalues()[k];
            symbol[k] = 1.0 / (1.0 + dt * m_bar * lam * (c_bar + kappa * lam));
        }
        auto precondition = [&](std::span<const double> v, std::span<double> out) {
            dct.apply_diagonal(v, out, symbol);
        };
        std::fill(x.begin(), x.end(), 0.0);
        const int max_iter = cfg_.linear_max > 0 ? cfg_.linear_max : static_cast<int>(10 * n);
        KrylovResult res = bicgstab(apply, precondition, b, x, cfg_.linear_tol, max_iter);
        if (!res.converged && res.relative_residual > 1e-6) {
            throw LinearSolveFailed("Cahn-Hilliard Newton system: BiCGSTAB stopped at relative residual " +
                                    std::to_string(res.relative_residual) + " after " +
                                    std::to_string(res.iterations) + " iterations");
        }
        return res.iterations;
    }

    // Monolithic (dphi, dmu) system:
    //   dphi + dt L_M dmu = b,   -(diag(d) + kappa L0) dphi + dmu = 0.
    int solve_direct(std::span<const double> d, std::span<const double> b, std::span<double> x) {
        const int n = static_cast<int>(prob_.size());
        detail::Triplets trip;
        trip.reserve(static_cast<std::size_t>(n) * 16);
        detail::add_identity(n, 1.0, 0, 0, trip);
        detail::add_neg_laplacian(g_, mobility_, cfg_.dt, 0, n, trip);
        detail::add_diagonal(d, -1.0, n, 0, trip);
        detail::add_neg_laplacian(g_, nullptr, -prob_.kappa(), n, 0, trip);
        detail::add_identity(n, 1.0, n, n, trip);
        const detail::SpMat a = detail::assemble(2 * n, 2 * n, trip);

        if (!analyzed_) {
            lu_.analyzePattern(a);
            analyzed_ = true;
        }
        lu_.factorize(a);
        if (lu_.info() != Eigen::Success) {
            throw LinearSolveFailed("Cahn-Hilliard Newton system: sparse LU factorization failed");
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * n);
        for (int k = 0; k < n; ++k) rhs[k] = b[k];
        const Eigen::VectorXd sol = lu_.solve(rhs);
        for (int k = 0; k < n; ++k) x[k] = sol[k];
        return 0;
    }

    const LogProblem& prob_;
    const Grid& g_;
    CHStepConfig cfg_;
    const MACVector* mobility_;
    bool direct_ = false;
    bool analyzed_ = false;
    Eigen::SparseLU<detail::SpMat, Eigen::COLAMDOrdering<int>> lu_;
};

CHState log_step(const CHState& state, const MACVector& u, const MACVector* mobility, const CHStepConfig& cfg,
                 const FloryHuggins& p, CHStepStats* stats) {
    validate(cfg);
    validate(PotentialKind{p});
    const Grid& g = state.phi.grid();
    if (!(u.grid() == g) || !(state.mu.grid() == g) || (mobility && !(mobility->grid() == g))) {
        throw GridMismatch("ch_step: fields live on different grids");
    }
    check_cfl(u, cfg.dt);
    if (!(state.phi.max_abs() < 1.0)) {
        throw std::domain_error("ch_step: |phi| must be < 1 for the logarithmic potential");
    }

    const LogProblem prob(state, u, mobility, cfg, p);
    NewtonLinearSolver linear(prob, g, cfg, mobility);
    const std::size_t n = prob.size();
    const double target_sum = sum(prob.phin());

    std::vector<double> phi(prob.phin().begin(), prob.phin().end());
    std::vector<double> mu(n), r(n), d(n), rhs(n), delta(n), trial(n), mu_trial(n), r_trial(n);
    prob.scaled_residual(phi, mu, r);
    double res = max_abs(r);

    CHStepStats local;
    int it = 0;
    while (!(res <= cfg.newton_tol)) {
        if (it >= cfg.newton_max || !std::isfinite(res)) {
            throw NewtonDiverged("ch_step: Newton did not reach tolerance (residual " + std::to_string(res) + ")",
                                 res, it);
        }
        ++it;
        prob.jacobian_diagonal(phi, d);
        for (std::size_t k = 0; k < n; ++k) rhs[k] = -r[k];
        local.linear_iterations += linear.solve(d, rhs, delta);

        // Keep the mass of the iterate exactly on target.
        const double shift = (target_sum - sum(phi) - sum(delta)) / static_cast<double>(n);
        for (auto& v : delta) v += shift;

        double tau = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double next = phi[k] + delta[k];
            if (next > kBound) tau = std::min(tau, kFractionToBoundary * (1.0 - phi[k]) / delta[k]);
            if (next < -kBound) tau = std::min(tau, kFractionToBoundary * (-1.0 - phi[k]) / delta[k]);
        }

        const double norm0 = detail::norm2(r);
        for (int ls = 0;; ++ls) {
            for (std::size_t k = 0; k < n; ++k) trial[k] = std::clamp(phi[k] + tau * delta[k], -kBound, kBound);
            prob.scaled_residual(trial, mu_trial, r_trial);
            const double norm1 = detail::norm2(r_trial);
            if ((std::isfinite(norm1) && norm1 <= (1.0 - 1e-4 * tau) * norm0) || ls >= 30) break;
            tau *= 0.5;
        }
        phi.swap(trial);
        mu.swap(mu_trial);
        r.swap(r_trial);
        res = max_abs(r);
    }

    local.newton_iterations = it;
    local.residual = res;
    if (stats) *stats = local;

    CHState out{state.t + cfg.dt, ScalarField(g, std::move(phi)), ScalarField(g, std::move(mu))};
    return out;
}

}  // namespace

void validate(const CHStepConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("CH step: dt must be positive");
    if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) throw ConfigError("CH step: alpha must be >= 0");
    if (!(cfg.newton_tol > 0.0)) throw ConfigError("CH step: newton_tol must be positive");
    if (!(cfg.linear_tol > 0.0)) throw ConfigError("CH step: linear_tol must be positive");
    if (cfg.newton_max < 1) throw ConfigError("CH step: newton_max must be >= 1");
}

void check_cfl(const MACVector& u, double dt) {
    const double umax = u.max_abs();
    if (umax == 0.0) return;
    const double limit = 0.5 * u.grid().min_spacing() / umax;
    if (dt > limit) {
        throw CFLViolation("time.dt = " + std::to_string(dt) + " violates the advective CFL limit " +
                           std::to_string(limit) + " (max|u| = " + std::to_string(umax) + ")");
    }
}

ScalarField chemical_potential(const ScalarField& phi, const FloryHuggins& p) {
    ScalarField mu = laplacian_neumann(phi);
    mu *= -1.0;
    for (std::size_t k = 0; k < mu.size(); ++k) mu[k] += psi_prime(phi[k], p);
    return mu;
}

CHState ch_step(const CHState& state, const MACVector& u, const CHStepConfig& cfg, const PotentialKind& kind,
                CHStepStats* stats) {
    const auto* fh = std::get_if<FloryHuggins>(&kind);
    if (!fh) throw std::invalid_argument("ch_step: double obstacle potential needs obstacle_ch_step");
    return log_step(state, u, nullptr, cfg, *fh, stats);
}

CHState ch_step(const CHState& state, const MACVector& u, const MACVector& mobility, const CHStepConfig& cfg,
                const FloryHuggins& p, CHStepStats* stats) {
    return log_step(state, u, &mobility, cfg, p, stats);
}

ObstacleStepResult obstacle_ch_step(const CHState& state, const MACVector& u, const CHStepConfig& cfg,
                                    const DoubleObstacle& p, const MACVector* mobility) {
    validate(cfg);
    validate(PotentialKind{p});
    const Grid& g = state.phi.grid();
    if (!(u.grid() == g) || (mobility && !(mobility->grid() == g))) {
        throw GridMismatch("obstacle_ch_step: fields live on different grids");
    }
    check_cfl(u, cfg.dt);

    const int n = static_cast<int>(g.cell_count());
    const double dt = cfg.dt;
    const auto phin = state.phi.values();
    std::vector<double> adv(n, 0.0);
    if (u.max_abs() > 0.0) {
        const ScalarField a = advect_scalar(u, state.phi);
        std::copy(a.values().begin(), a.values().end(), adv.begin());
    }

    std::vector<bool> high(n), low(n);
    for (int k = 0; k < n; ++k) {
        high[k] = phin[k] >= 1.0;
        low[k] = phin[k] <= -1.0;
    }

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3 * n);
    Eigen::VectorXd sol;
    constexpr int kMaxSweeps = 50;
    int sweep = 0;
    for (;; ++sweep) {
        if (sweep >= kMaxSweeps) {
            throw ActiveSetCycling("obstacle_ch_step: active sets did not settle in " + std::to_string(kMaxSweeps) +
                                   " sweeps");
        }
        detail::Triplets trip;
        trip.reserve(static_cast<std::size_t>(n) * 20);
        // phi/dt + L_M mu = phin/dt - adv
        detail::add_identity(n, 1.0 / dt, 0, 0, trip);
        detail::add_neg_laplacian(g, mobility, 1.0, 0, n, trip);
        // mu - (alpha/dt) phi - L0 phi - lambda = -(alpha/dt) phin - theta0 phin
        detail::add_identity(n, 1.0, n, n, trip);
        detail::add_identity(n, -cfg.alpha / dt, n, 0, trip);
        detail::add_neg_laplacian(g, nullptr, -1.0, n, 0, trip);
        detail::add_identity(n, -1.0, n, 2 * n, trip);
        for (int k = 0; k < n; ++k) {
            rhs[k] = phin[k] / dt - adv[k];
            rhs[n + k] = -(cfg.alpha / dt) * phin[k] - p.theta0 * phin[k];
            if (high[k] || low[k]) {
                trip.emplace_back(2 * n + k, k, 1.0);
                rhs[2 * n + k] = high[k] ? 1.0 : -1.0;
            } else {
                trip.emplace_back(2 * n + k, 2 * n + k, 1.0);
                rhs[2 * n + k] = 0.0;
            }
        }
        const detail::SpMat a = detail::assemble(3 * n, 3 * n, trip);
        Eigen::SparseLU<detail::SpMat, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(a);
        if (lu.info() != Eigen::Success) {
            throw LinearSolveFailed("obstacle_ch_step: sparse LU factorization failed");
        }
        sol = lu.solve(rhs);

        bool changed = false;
        for (int k = 0; k < n; ++k) {
            const double phi = sol[k];
            const double lam = sol[2 * n + k];
            const bool h = lam + p.c * (phi - 1.0) > 0.0;
            const bool l = lam + p.c * (phi + 1.0) < 0.0;
            changed = changed || h != high[k] || l != low[k];
            high[k] = h;
            low[k] = l;
        }
        if (!changed) break;
    }

    ObstacleStepResult out{CHState{state.t + dt, ScalarField(g), ScalarField(g)},
                           ObstacleMultiplier{ScalarField(g), high, low}, sweep + 1};
    out.multiplier.active_high = high;
    out.multiplier.active_low = low;
    for (int k = 0; k < n; ++k) {
        double phi = sol[k];
        double lam = sol[2 * n + k];
        if (high[k]) {
            phi = 1.0;
        } else if (low[k]) {
            phi = -1.0;
        } else {
            lam = 0.0;
        }
        out.state.phi[k] = phi;
        out.state.mu[k] = sol[n + k];
        out.multiplier.lambda[k] = lam;
    }
    return out;
}

std::vector<CHState> vanishing_viscosity_suite(const ScalarField& phi0, const MACVector& u,
                                               std::span<const double> alphas, double horizon,
                                               const CHStepConfig& cfg, const FloryHuggins& p) {
    for (std::size_t k = 1; k < alphas.size(); ++k) {
        if (!(alphas[k] < alphas[k - 1])) {
            throw ConfigError("vanishing_viscosity_suite: alphas must be strictly decreasing");
        }
    }
    if (!alphas.empty() && alphas.back() < 0.0) {
        throw ConfigError("vanishing_viscosity_suite: alphas must be >= 0");
    }
    const long steps = std::lround(horizon / cfg.dt);
    std::vector<CHState> finals;
    finals.reserve(alphas.size());
    for (double alpha : alphas) {
        CHStepConfig c = cfg;
        c.alpha = alpha;
        CHState s{0.0, phi0, chemical_potential(phi0, p)};
        for (long step = 0; step < steps; ++step) s = ch_step(s, u, c, PotentialKind{p});
        finals.push_back(std::move(s));
    }
    return finals;
}

EstimateMonitor::EstimateMonitor(const CHState& initial) : last_(initial) {
    report_.sup_grad_mu = norm_faces(gradient_to_faces(initial.mu));
    report_.finite = std::isfinite(report_.sup_grad_mu);
}

void EstimateMonitor::observe(const CHState& next, double grad_u_sq) {
    const double dt = next.t - last_.t;
    ScalarField phit = next.phi - last_.phi;
    phit *= 1.0 / dt;
    const double grad_phit = norm_faces(gradient_to_faces(phit));
    const double grad_mu = norm_faces(gradient_to_faces(next.mu));
    const double lap_mu = norm_cells(laplacian_neumann(next.mu));
    report_.sup_grad_mu = std::max(report_.sup_grad_mu, grad_mu);
    report_.int_grad_phit_sq += dt * grad_phit * grad_phit;
    report_.int_grad_mu_h1_sq += dt * (grad_mu * grad_mu + lap_mu * lap_mu);
    report_.int_grad_u_sq += dt * grad_u_sq;
    report_.finite = report_.finite && std::isfinite(report_.sup_grad_mu) &&
                     std::isfinite(report_.int_grad_phit_sq) && std::isfinite(report_.int_grad_mu_h1_sq) &&
                     std::isfinite(report_.int_grad_u_sq);
    last_ = next;
}

MonitorReport estimate_monitor(std::span<const CHState> history, std::span<const MACVector> u_history) {
    if (history.empty()) return {};
    if (history.size() > 1 && u_history.size() != 1 && u_history.size() + 1 != history.size()) {
        throw std::invalid_argument("estimate_monitor: u_history must have one entry per step or a single entry");
    }
    EstimateMonitor monitor(history.front());
    for (std::size_t k = 1; k < history.size(); ++k) {
        const MACVector& u = u_history.size() == 1 ? u_history.front() : u_history[k - 1];
        monitor.observe(history[k], velocity_gradient_sq(u));
    }
    return monitor.report();
}

}  // namespace nsch
