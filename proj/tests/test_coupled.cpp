#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "nsch/coupled.hpp"
#include "nsch/errors.hpp"

using namespace nsch;

namespace {

const ModelParams kUnmatched{3.0, 1.0, 0.1, 0.1, FloryHuggins{1.0, 2.0}};

RunConfig small_run(int n, double dt, long steps) {
    RunConfig cfg;
    cfg.grid = Grid(n, n, 1.0, 1.0);
    cfg.dt = dt;
    cfg.t_end = dt * static_cast<double>(steps);
    cfg.init.phase = SeededPerturbation{0.0, 0.6, 5, 4};
    cfg.init.velocity = ShearLayer{0.5};
    cfg.output_every = 1000;
    return cfg;
}

}  // namespace

TEST(Coupled, StepCount) {
    RunConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 1.0;
    EXPECT_EQ(step_count(cfg), 10000);
    cfg.t_end = 1.5e-4;
    EXPECT_THROW(step_count(cfg), ConfigError);
    cfg.dt = 0.0;
    EXPECT_THROW(step_count(cfg), ConfigError);
}

TEST(Coupled, ValidationRejectsInconsistentSetups) {
    RunConfig cfg = small_run(8, 1e-3, 2);
    cfg.output_every = 0;
    EXPECT_THROW(validate(cfg, kUnmatched), ConfigError);
    cfg = small_run(8, 1e-3, 2);
    cfg.grid = Grid(8, 1, 1.0, 1.0);
    EXPECT_THROW(validate(cfg, kUnmatched), ConfigError);
    cfg.init.velocity = ZeroVelocity{};
    EXPECT_NO_THROW(validate(cfg, kUnmatched));
}

TEST(Coupled, SeededPerturbationIsDeterministicAndNormalised) {
    const Grid g(24, 16, 2.0, 1.0);
    const SeededPerturbation init{0.1, 0.4, 11, 3};
    const ScalarField a = make_initial_phase(g, init);
    const ScalarField b = make_initial_phase(g, init);
    for (std::size_t k = 0; k < a.size(); ++k) ASSERT_EQ(a[k], b[k]);
    EXPECT_NEAR(mean(a), 0.1, 1e-15);
    EXPECT_NEAR((a - ScalarField(g, 0.1)).max_abs(), 0.4, 1e-15);
    const ScalarField c = make_initial_phase(g, SeededPerturbation{0.1, 0.4, 12, 3});
    EXPECT_GT((a - c).max_abs(), 1e-3);
}

TEST(Coupled, InitialPhaseOutsideOpenIntervalIsRejected) {
    const Grid g(16, 16, 1.0, 1.0);
    EXPECT_THROW(make_initial_phase(g, SeededPerturbation{0.5, 0.6, 1, 2}), ConfigError);
    EXPECT_THROW(make_initial_phase(g, ConstantPhase{1.0}), ConfigError);
    EXPECT_THROW(make_initial_phase(g, TanhInterface{Axis::X, 0.0, 0.5, 0.9}), ConfigError);
}

TEST(Coupled, ShearLayerIsDiscretelyDivergenceFree) {
    const Grid g(20, 12, 1.5, 1.0);
    const MACVector u = make_initial_velocity(g, ShearLayer{2.0});
    EXPECT_GT(u.max_abs(), 1.0);
    EXPECT_LT(divergence_mac(u).max_abs(), 1e-12);
    EXPECT_EQ(u.boundary_max_abs(), 0.0);
}

TEST(Coupled, SnapshotsAtInitialPeriodicAndFinalSteps) {
    RunConfig cfg = small_run(8, 1e-3, 7);
    cfg.output_every = 3;
    const RunResult r = run(cfg, kUnmatched);
    ASSERT_EQ(r.series.size(), 8u);
    std::vector<long> steps;
    for (const Snapshot& s : r.snapshots) steps.push_back(s.step);
    EXPECT_EQ(steps, (std::vector<long>{0, 3, 6, 7}));
    EXPECT_NEAR(r.final_state.t, 7e-3, 1e-15);
}

TEST(Coupled, OutputPeriodBeyondRunGivesInitialAndFinalSnapshots) {
    RunConfig cfg = small_run(8, 1e-3, 5);
    cfg.output_every = 50;
    const RunResult r = run(cfg, kUnmatched);
    ASSERT_EQ(r.snapshots.size(), 2u);
    EXPECT_EQ(r.snapshots.front().step, 0);
    EXPECT_EQ(r.snapshots.back().step, 5);
}

TEST(Coupled, ObserverSeesEveryRecord) {
    RunConfig cfg = small_run(8, 1e-3, 4);
    cfg.keep_snapshots = false;
    long records = 0;
    long snapshots = 0;
    RunObserver obs;
    obs.on_record = [&](const DiagnosticsRecord&) { ++records; };
    obs.on_snapshot = [&](long, const State&) { ++snapshots; };
    const RunResult r = run(cfg, kUnmatched, obs);
    EXPECT_EQ(records, 5);
    EXPECT_EQ(snapshots, 2);
    EXPECT_TRUE(r.snapshots.empty());
}

TEST(Coupled, MassBoundsAndEnergyInequalityOnShortRun) {
    const RunConfig cfg = small_run(16, 1e-3, 40);
    const RunResult r = run(cfg, kUnmatched);
    const double m0 = r.series.front().mass;
    const double e0 = r.series.front().E_total;
    for (const DiagnosticsRecord& rec : r.series) {
        EXPECT_LE(std::abs(rec.mass - m0), 1e-12);
        EXPECT_LT(rec.phi_max, 1.0);
        EXPECT_GT(rec.phi_min, -1.0);
        EXPECT_LE(rec.energy_defect, 1e-8 * std::abs(e0));
    }
    EXPECT_LT(r.series.back().E_total, e0);
}

TEST(Coupled, FrozenFlowEnergyBudget) {
    // u = 0 spinodal: sum of D_chem dt matches the free-energy drop within 1%.
    RunConfig cfg;
    cfg.grid = Grid(128, 1, 12.8, 1.0);
    cfg.dt = 1e-3;
    cfg.t_end = 20.0;
    cfg.freeze_velocity = true;
    cfg.init.phase = SeededPerturbation{0.0, 0.1, 3, 8};
    cfg.output_every = 100000;
    const RunResult r = run(cfg, kUnmatched);
    double dissipated = 0.0;
    for (std::size_t k = 1; k < r.series.size(); ++k) dissipated += r.series[k].D_chem * cfg.dt;
    const double drop = r.series.front().E_free - r.series.back().E_free;
    EXPECT_GT(drop, 0.0);
    EXPECT_NEAR(dissipated, drop, 0.01 * drop);
    for (const DiagnosticsRecord& rec : r.series) EXPECT_EQ(rec.E_kin, 0.0);
}

TEST(Coupled, MonitorQuantitiesDecreaseOnLongSpinodalRun) {
    RunConfig cfg;
    cfg.grid = Grid(64, 1, 5.5, 1.0);
    cfg.dt = 1e-3;
    cfg.t_end = 4.0;
    cfg.init.phase = SeededPerturbation{0.0, 0.95, 1, 1};
    cfg.output_every = 100000;
    const RunResult r = run(cfg, kUnmatched);
    const DiagnosticsRecord& half = r.series[r.series.size() / 2];
    const DiagnosticsRecord& last = r.series.back();
    EXPECT_NEAR(half.t, 2.0, 1e-12);
    EXPECT_LT(last.grad_mu_L2, half.grad_mu_L2);
    EXPECT_LT(last.stat_mu_residual, half.stat_mu_residual);
}

TEST(Coupled, RepeatedRunsAreBitwiseIdentical) {
    const RunConfig cfg = small_run(12, 1e-3, 6);
    const RunResult a = run(cfg, kUnmatched);
    const RunResult b = run(cfg, kUnmatched);
    ASSERT_EQ(a.series.size(), b.series.size());
    for (std::size_t k = 0; k < a.series.size(); ++k) {
        EXPECT_EQ(a.series[k].E_total, b.series[k].E_total);
        EXPECT_EQ(a.series[k].u_L2, b.series[k].u_L2);
    }
    for (std::size_t k = 0; k < a.final_state.phi.size(); ++k) ASSERT_EQ(a.final_state.phi[k], b.final_state.phi[k]);
}

TEST(Coupled, CflViolationIsReportedBeforeStepping) {
    RunConfig cfg = small_run(16, 1.0, 1);
    cfg.init.velocity = ShearLayer{10.0};
    EXPECT_THROW(run(cfg, kUnmatched), CFLViolation);
}

TEST(Coupled, WeakStrongInitialDistanceIsQuadratic) {
    RunConfig cfg = small_run(12, 1e-3, 4);
    cfg.output_every = 2;
    const std::vector<double> eps{0.02, 0.01};
    const auto runs = weak_strong_experiment(cfg, kUnmatched, eps, 7);
    ASSERT_EQ(runs.size(), 2u);
    ASSERT_EQ(runs[0].distance.size(), 3u);
    EXPECT_NEAR(runs[0].distance.front().D / runs[1].distance.front().D, 4.0, 1e-10);
    EXPECT_GT(runs[1].distance.back().D, 0.0);
}
