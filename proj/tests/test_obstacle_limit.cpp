#include <cmath>

#include <gtest/gtest.h>

#include "nsch/coupled.hpp"
#include "nsch/errors.hpp"
#include "nsch/obstacle_limit.hpp"

using namespace nsch;

namespace {

ScalarField spinodal_1d(int n, double l) { return make_initial_phase(Grid(n, 1, l, 1.0), SeededPerturbation{0.0, 0.6, 3, 4}); }

ScalarField obstacle_mu(const ScalarField& phi, double theta0) {
    ScalarField mu = laplacian_neumann(phi);
    for (std::size_t k = 0; k < mu.size(); ++k) mu[k] = -mu[k] - theta0 * phi[k];
    return mu;
}

}  // namespace

TEST(ObstacleLimit, RegularizedDataSolvesItsEquationInsideOpenInterval) {
    const ScalarField phi0 = spinodal_1d(64, 4.0);
    const ScalarField mu0 = obstacle_mu(phi0, 2.0);
    for (int k : {1, 4, 64}) {
        RegularizeStats st;
        const ScalarField phik = regularize_initial(mu0, phi0, 2.0, k, &st);
        EXPECT_LT(phik.max_abs(), 1.0);
        EXPECT_LE(st.residual, 1e-10);
        ScalarField rhs = mu0;
        for (std::size_t c = 0; c < rhs.size(); ++c) rhs[c] += 3.0 * phi0[c];
        EXPECT_NEAR(regularization_residual(phik, rhs, k).max_abs(), st.residual, 1e-14);
    }
}

TEST(ObstacleLimit, RegularizedDataApproachesObstacleData) {
    const ScalarField phi0 = spinodal_1d(64, 4.0);
    const ScalarField mu0 = obstacle_mu(phi0, 2.0);
    const double d4 = norm_cells(regularize_initial(mu0, phi0, 2.0, 4) - phi0);
    const double d256 = norm_cells(regularize_initial(mu0, phi0, 2.0, 256) - phi0);
    EXPECT_LT(d256, d4);
}

TEST(ObstacleLimit, RegularizeRejectsBadIndex) {
    const ScalarField phi0 = spinodal_1d(16, 2.0);
    EXPECT_THROW(regularize_initial(obstacle_mu(phi0, 2.0), phi0, 2.0, 0), ConfigError);
}

TEST(ObstacleLimit, ObstacleRunConservesMassAndBounds) {
    const ScalarField phi0 = spinodal_1d(64, 4.0);
    CHStepConfig cfg;
    cfg.dt = 1e-3;
    const ObstacleTrajectory tr = obstacle_run(phi0, MACVector(phi0.grid()), 0.05, cfg, DoubleObstacle{2.0, 100.0}, 10);
    ASSERT_EQ(tr.states.size(), 6u);
    ASSERT_EQ(tr.free_energy.size(), 51u);
    for (const CHState& s : tr.states) EXPECT_LE(s.phi.max_abs(), 1.0);
    for (double m : tr.mass) EXPECT_NEAR(m, tr.mass.front(), 1e-13);
    EXPECT_LT(tr.free_energy.back(), tr.free_energy.front());
}

TEST(ObstacleLimit, ObstacleRunRejectsDataOutsideBox) {
    const Grid g(16, 1, 2.0, 1.0);
    CHStepConfig cfg;
    EXPECT_THROW(obstacle_run(ScalarField(g, 1.5), MACVector(g), 0.01, cfg, DoubleObstacle{}), ConfigError);
}

TEST(ObstacleLimit, StudyValidatesIndexList) {
    ObstacleLimitConfig cfg{.k_list = {4, 4}, .horizon = 0.01, .theta0 = 2.0, .phi0 = spinodal_1d(16, 2.0), .ch = {}, .c = 100.0};
    EXPECT_THROW(theta_limit_study(cfg), ConfigError);
    cfg.k_list = {};
    EXPECT_THROW(theta_limit_study(cfg), ConfigError);
}

TEST(ObstacleLimit, SmallStudyErrorsShrinkWithIndex) {
    CHStepConfig ch;
    ch.dt = 1e-3;
    const ObstacleLimitConfig cfg{
        .k_list = {4, 64}, .horizon = 0.05, .theta0 = 2.0, .phi0 = spinodal_1d(32, 4.0), .ch = ch, .c = 100.0};
    const ConvergenceReport rep = theta_limit_study(cfg);
    ASSERT_EQ(rep.entries.size(), 2u);
    for (const ThetaLimitEntry& e : rep.entries) {
        EXPECT_TRUE(e.failure.empty()) << e.failure;
        EXPECT_GT(e.initial_separation, 0.0);
    }
    EXPECT_DOUBLE_EQ(rep.entries[1].theta, 1.0 / 64.0);
    EXPECT_LT(rep.entries[1].error, rep.entries[0].error);
    EXPECT_TRUE(rep.strictly_decreasing);
}
