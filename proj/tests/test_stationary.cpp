#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "nsch/coupled.hpp"
#include "nsch/errors.hpp"
#include "nsch/stationary.hpp"

using namespace nsch;

namespace {

const FloryHuggins kFh{1.0, 2.0};

ScalarField kink(const Grid& g, double width, double amplitude) {
    return make_initial_phase(g, TanhInterface{Axis::X, width, 0.5, amplitude});
}

}  // namespace

TEST(Stationary, ConstantStateIsAFixedPoint) {
    const Grid g(16, 16, 1.0, 1.0);
    const StationarySolution s = stationary_solve(ScalarField(g, 0.8), 0.8, PotentialKind{kFh});
    EXPECT_LT((s.phi_inf - ScalarField(g, 0.8)).max_abs(), 1e-12);
    EXPECT_NEAR(s.mu_inf, psi_prime(0.8, kFh), 1e-10);
    EXPECT_LE(s.residual, 1e-10);
    EXPECT_NEAR(s.separation, 0.2, 1e-12);
}

TEST(Stationary, OneDimensionalKinkIsAntisymmetricWithExactMean) {
    const Grid g(128, 1, 8.0, 1.0);
    const StationarySolution s = stationary_solve(kink(g, 1.0, 0.9), 0.0, PotentialKind{kFh});
    EXPECT_LE(s.residual, 1e-10);
    EXPECT_LT(s.iterations, 20);
    EXPECT_NEAR(mean(s.phi_inf), 0.0, 1e-13);
    EXPECT_NEAR(s.mu_inf, 0.0, 1e-10);
    for (int i = 0; i < 64; ++i) EXPECT_NEAR(s.phi_inf(i, 0), -s.phi_inf(127 - i, 0), 1e-9);
    EXPECT_LT(s.phi_inf(0, 0), -0.9);
}

TEST(Stationary, WideDomainPlateauApproachesBinodal) {
    const Grid g(256, 1, 16.0, 1.0);
    const StationarySolution s = stationary_solve(kink(g, 1.0, 0.9), 0.0, PotentialKind{kFh});
    const double s_star = psi_prime_positive_root(kFh);
    EXPECT_NEAR(s.separation, 1.0 - s_star, 1e-4);
}

TEST(Stationary, NonzeroMeanIsEnforced) {
    const Grid g(96, 1, 8.0, 1.0);
    const StationarySolution s = stationary_solve(make_initial_phase(g, TanhInterface{Axis::X, 1.0, 0.4, 0.9}), 0.15,
                                                  PotentialKind{kFh});
    EXPECT_LE(s.residual, 1e-10);
    EXPECT_NEAR(mean(s.phi_inf), 0.15, 1e-13);
}

TEST(Stationary, RejectsInvalidInputs) {
    const Grid g(16, 1, 4.0, 1.0);
    EXPECT_THROW(stationary_solve(ScalarField(g, 0.0), 1.0, PotentialKind{kFh}), ConfigError);
    EXPECT_THROW(stationary_solve(ScalarField(g, 1.0), 0.0, PotentialKind{kFh}), std::domain_error);
}

TEST(Stationary, NewtonFailureIsReported) {
    const Grid g(64, 1, 8.0, 1.0);
    StationaryOptions opts;
    opts.max_iter = 1;
    EXPECT_THROW(stationary_solve(kink(g, 2.0, 0.5), 0.0, PotentialKind{kFh}, opts), NewtonDiverged);
}

TEST(Stationary, ObstacleKinkStaysInBox) {
    // The active sets start from the contact set of the guess, so the guess
    // carries pure-phase plateaus.
    const Grid g(128, 1, 8.0, 1.0);
    const DoubleObstacle dob{2.0, 100.0};
    ScalarField guess(g);
    for (int i = 0; i < 128; ++i) guess(i, 0) = std::clamp(2.0 * std::tanh(g.xc(i) - 4.0), -1.0, 1.0);
    const StationarySolution s = stationary_solve(guess, 0.0, PotentialKind{dob});
    ASSERT_TRUE(s.multiplier.has_value());
    EXPECT_LE(s.phi_inf.max_abs(), 1.0);
    EXPECT_LE(s.residual, 1e-10);
    EXPECT_NEAR(mean(s.phi_inf), 0.0, 1e-12);
    // Pure phases are reached with theta0 = 2 on this domain.
    EXPECT_EQ(s.phi_inf.max_abs(), 1.0);
    for (std::size_t k = 0; k < s.phi_inf.size(); ++k) {
        if (s.multiplier->active_high[k]) { EXPECT_EQ(s.phi_inf[k], 1.0); }
        if (s.multiplier->active_low[k]) { EXPECT_EQ(s.phi_inf[k], -1.0); }
        if (!s.multiplier->active_high[k] && !s.multiplier->active_low[k]) { EXPECT_EQ(s.multiplier->lambda[k], 0.0); }
    }
}

TEST(Stationary, ResidualOfRestingEquilibrium) {
    const Grid g(8, 8, 1.0, 1.0);
    State s(g);
    for (auto& v : s.mu.values()) v = 0.7;
    const StationarityResidual r = stationarity_residual(s);
    EXPECT_EQ(r.u_norm, 0.0);
    EXPECT_NEAR(r.grad_mu_norm, 0.0, 1e-14);
    EXPECT_NEAR(r.mu_deviation, 0.0, 1e-14);
    s.u.ux(3, 3) = 1.0;
    EXPECT_NEAR(stationarity_residual(s).u_norm, std::sqrt(g.cell_area()), 1e-14);
}
