#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nsch/cahn_hilliard.hpp"
#include "nsch/coupled.hpp"
#include "nsch/diagnostics.hpp"
#include "nsch/errors.hpp"

using namespace nsch;

namespace {

constexpr double pi = std::numbers::pi;

CHState spinodal_state(const Grid& g, double amplitude = 0.05, std::uint64_t seed = 3) {
    const ScalarField phi = make_initial_phase(g, SeededPerturbation{0.0, amplitude, seed, 6});
    return CHState{0.0, phi, chemical_potential(phi, FloryHuggins{})};
}

}  // namespace

TEST(CahnHilliard, ConfigValidation) {
    CHStepConfig cfg;
    cfg.dt = 0.0;
    EXPECT_THROW(validate(cfg), ConfigError);
    cfg.dt = 1e-3;
    cfg.alpha = -1.0;
    EXPECT_THROW(validate(cfg), ConfigError);
}

TEST(CahnHilliard, CflCheck) {
    const Grid g(16, 16, 1.0, 1.0);
    MACVector u(g);
    u.ux(8, 8) = 10.0;
    EXPECT_NO_THROW(check_cfl(u, 0.5 * (1.0 / 16) / 10.0));
    EXPECT_THROW(check_cfl(u, 0.6 * (1.0 / 16) / 10.0), CFLViolation);
}

TEST(CahnHilliard, ConstantStateIsFixedPoint) {
    const Grid g(16, 16, 4.0, 4.0);
    const ScalarField phi(g, 0.3);
    CHState s{0.0, phi, chemical_potential(phi, FloryHuggins{})};
    CHStepConfig cfg;
    cfg.dt = 1e-2;
    const CHState next = ch_step(s, MACVector(g), cfg, FloryHuggins{});
    EXPECT_LT((next.phi - phi).max_abs(), 1e-13);
    // mu = Psi'(0.3) everywhere.
    const double expected = std::atanh(0.3) - 2.0 * 0.3;
    for (std::size_t k = 0; k < next.mu.size(); ++k) EXPECT_NEAR(next.mu[k], expected, 1e-12);
}

TEST(CahnHilliard, ConservesMassAndStaysInsideInterval) {
    const Grid g(32, 32, 6.4, 6.4);
    CHState s = spinodal_state(g, 0.9);
    const double m0 = mean(s.phi);
    CHStepConfig cfg;
    cfg.dt = 1e-2;
    for (int n = 0; n < 20; ++n) {
        s = ch_step(s, MACVector(g), cfg, FloryHuggins{});
        EXPECT_NEAR(mean(s.phi), m0, 1e-13);
        EXPECT_LT(s.phi.max_abs(), 1.0);
    }
}

TEST(CahnHilliard, FreeEnergyDecreasesWithoutFlow) {
    const Grid g(32, 32, 6.4, 6.4);
    CHState s = spinodal_state(g, 0.3);
    CHStepConfig cfg;
    cfg.dt = 5e-3;
    double e = free_energy(s.phi, FloryHuggins{});
    for (int n = 0; n < 20; ++n) {
        s = ch_step(s, MACVector(g), cfg, FloryHuggins{});
        const double e_next = free_energy(s.phi, FloryHuggins{});
        EXPECT_LE(e_next, e);
        e = e_next;
    }
}

TEST(CahnHilliard, DiscreteGradientClosesEnergyBudget) {
    const Grid g(24, 24, 6.0, 6.0);
    CHState s = spinodal_state(g, 0.5);
    CHStepConfig cfg;
    cfg.dt = 1e-2;
    cfg.scheme = CHScheme::DiscreteGradient;
    cfg.newton_tol = 1e-13;
    for (int n = 0; n < 10; ++n) {
        const CHState next = ch_step(s, MACVector(g), cfg, FloryHuggins{});
        const double lhs = free_energy(next.phi, FloryHuggins{}) - free_energy(s.phi, FloryHuggins{});
        const double rhs = -cfg.dt * chemical_dissipation(next.mu);
        EXPECT_NEAR(lhs, rhs, 1e-11 * free_energy(s.phi, FloryHuggins{}) + 1e-13);
        s = next;
    }
}

TEST(CahnHilliard, KrylovAndDirectSolversAgree) {
    const Grid g(24, 24, 4.8, 4.8);
    const CHState s = spinodal_state(g, 0.5);
    CHStepConfig cfg;
    cfg.dt = 1e-2;
    cfg.newton_tol = 1e-12;
    cfg.linear_tol = 1e-13;
    cfg.linear_solver = LinearSolver::Direct;
    const CHState a = ch_step(s, MACVector(g), cfg, FloryHuggins{});
    cfg.linear_solver = LinearSolver::Krylov;
    const CHState b = ch_step(s, MACVector(g), cfg, FloryHuggins{});
    EXPECT_LT((a.phi - b.phi).max_abs(), 1e-10);
    EXPECT_LT((a.mu - b.mu).max_abs(), 1e-8);
}

TEST(CahnHilliard, AdvectionByUniformShearConservesMass) {
    const Grid g(32, 32, 2.0, 2.0);
    const CHState s0 = spinodal_state(g, 0.5);
    const MACVector u = make_initial_velocity(g, ShearLayer{1.0});
    CHStepConfig cfg;
    cfg.dt = 1e-3;
    CHState s = s0;
    for (int n = 0; n < 10; ++n) s = ch_step(s, u, cfg, FloryHuggins{});
    EXPECT_NEAR(mean(s.phi), mean(s0.phi), 1e-13);
    EXPECT_GT((s.phi - s0.phi).max_abs(), 0.0);
}

TEST(CahnHilliard, RejectsObstacleKind) {
    const Grid g(8, 8, 1.0, 1.0);
    const CHState s{0.0, ScalarField(g), ScalarField(g)};
    EXPECT_THROW(ch_step(s, MACVector(g), CHStepConfig{}, DoubleObstacle{}), std::invalid_argument);
}

TEST(CahnHilliard, ObstacleStepRespectsBoxAndComplementarity) {
    const Grid g(64, 1, 12.8, 1.0);
    ScalarField phi(g);
    for (int i = 0; i < g.nx(); ++i) phi(i, 0) = std::cos(2 * pi * g.xc(i) / g.lx());
    CHState s{0.0, phi, ScalarField(g)};
    CHStepConfig cfg;
    cfg.dt = 1e-2;
    const DoubleObstacle p{2.0, 100.0};
    const double m0 = mean(phi);
    bool saw_active = false;
    for (int n = 0; n < 30; ++n) {
        ObstacleStepResult r = obstacle_ch_step(s, MACVector(g), cfg, p);
        EXPECT_LE(r.state.phi.max_abs(), 1.0);
        EXPECT_NEAR(mean(r.state.phi), m0, 1e-12);
        EXPECT_LT(obstacle_complementarity_residual(r.state.phi, r.multiplier.lambda, p.c).max_abs(), 1e-10);
        for (std::size_t k = 0; k < phi.size(); ++k) {
            if (r.multiplier.active_high[k]) {
                EXPECT_EQ(r.state.phi[k], 1.0);
                saw_active = true;
            }
            if (r.multiplier.active_low[k]) { EXPECT_EQ(r.state.phi[k], -1.0); }
        }
        s = std::move(r.state);
    }
    EXPECT_TRUE(saw_active);
}

TEST(CahnHilliard, VanishingViscositySuiteConvergesAsAlphaShrinks) {
    const Grid g(48, 1, 9.6, 1.0);
    const ScalarField phi0 = make_initial_phase(g, SeededPerturbation{0.0, 0.5, 2, 4});
    CHStepConfig cfg;
    cfg.dt = 1e-2;
    const std::vector<double> alphas{0.4, 0.1, 0.025, 0.0};
    const auto states = vanishing_viscosity_suite(phi0, MACVector(g), alphas, 0.5, cfg, FloryHuggins{});
    ASSERT_EQ(states.size(), alphas.size());
    const double e0 = norm_cells(states[0].phi - states[3].phi);
    const double e1 = norm_cells(states[1].phi - states[3].phi);
    const double e2 = norm_cells(states[2].phi - states[3].phi);
    EXPECT_GT(e0, e1);
    EXPECT_GT(e1, e2);
}

TEST(CahnHilliard, EstimateMonitorIsFiniteAndGradMuBoundedInConvexRegime) {
    // theta0 < theta: the homogeneous potential is convex and |grad mu| decays.
    const Grid g(32, 32, 4.0, 4.0);
    const FloryHuggins p{1.0, 0.5};
    const ScalarField phi = make_initial_phase(g, SeededPerturbation{0.1, 0.3, 5, 3});
    CHState s{0.0, phi, chemical_potential(phi, p)};
    CHStepConfig cfg;
    cfg.dt = 1e-2;
    EstimateMonitor monitor(s);
    const double initial = std::sqrt(chemical_dissipation(s.mu));
    for (int n = 0; n < 20; ++n) {
        s = ch_step(s, MACVector(g), cfg, p);
        monitor.observe(s, 0.0);
    }
    const MonitorReport& r = monitor.report();
    EXPECT_TRUE(r.finite);
    EXPECT_LE(r.sup_grad_mu, initial * (1 + 1e-12));
    EXPECT_GT(r.int_grad_phit_sq, 0.0);
    EXPECT_GT(r.int_grad_mu_h1_sq, 0.0);
    EXPECT_EQ(r.int_grad_u_sq, 0.0);
}
