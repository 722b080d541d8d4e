#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "nsch/coupled.hpp"
#include "nsch/diagnostics.hpp"
#include "nsch/errors.hpp"

using namespace nsch;

namespace {

const ModelParams kParams{3.0, 1.0, 0.1, 0.1, FloryHuggins{1.0, 2.0}};

State state_with_phi(const Grid& g, double c) {
    State s(g);
    for (auto& v : s.phi.values()) v = c;
    return s;
}

DiagnosticsRecord sep_record(double t, double delta) {
    DiagnosticsRecord r;
    r.t = t;
    r.sep_delta = delta;
    return r;
}

}  // namespace

TEST(Diagnostics, ConstantStateEnergyIsAreaTimesPsi) {
    const Grid g(16, 12, 2.0, 1.5);
    const double c = 0.3;
    const State s = state_with_phi(g, c);
    const DiagnosticsRecord r = record(s, kParams);
    EXPECT_NEAR(r.E_total, 2.0 * 1.5 * psi_value(c, kParams.potential), 1e-13);
    EXPECT_EQ(r.E_kin, 0.0);
    EXPECT_NEAR(r.mass, c, 1e-14);
    EXPECT_EQ(r.D_chem, 0.0);
    EXPECT_EQ(r.D_visc, 0.0);
    EXPECT_NEAR(r.sep_delta, 0.7, 1e-15);
    EXPECT_EQ(r.energy_defect, 0.0);
}

TEST(Diagnostics, KineticEnergyOfUniformDensityFlow) {
    const Grid g(8, 8, 1.0, 1.0);
    MACVector u(g);
    u.ux(3, 2) = 2.0;
    u.uy(5, 4) = -1.0;
    // phi = 1 gives rho = rho1 = 3 on every face.
    const ScalarField phi(g, 1.0);
    EXPECT_NEAR(kinetic_energy(u, phi, kParams), 0.5 * 3.0 * (4.0 + 1.0) * g.cell_area(), 1e-15);
}

TEST(Diagnostics, StationaryResidualIgnoresConstantShift) {
    const Grid g(8, 8, 1.0, 1.0);
    State s = state_with_phi(g, 0.0);
    for (auto& v : s.mu.values()) v = 4.2;
    const DiagnosticsRecord r = record(s, kParams);
    EXPECT_NEAR(r.stat_mu_residual, 0.0, 1e-13);
    EXPECT_NEAR(r.grad_mu_L2, 0.0, 1e-13);
}

TEST(Diagnostics, EnergyDefectUsesNewDissipation) {
    const Grid g(16, 16, 1.0, 1.0);
    const State a = state_with_phi(g, 0.1);
    State b = state_with_phi(g, 0.2);
    for (int j = 0; j < 16; ++j) {
        for (int i = 0; i < 16; ++i) b.mu(i, j) = std::cos(0.3 * i);
    }
    const double dt = 0.01;
    const DiagnosticsRecord ra = record(a, kParams);
    const DiagnosticsRecord rb = record(b, &a, kParams, dt);
    EXPECT_NEAR(rb.energy_defect, rb.E_total - ra.E_total + dt * (rb.D_visc + rb.D_chem), 1e-15);
    EXPECT_GT(rb.D_chem, 0.0);
}

TEST(Diagnostics, SeparationTimeUsesTrailingWindow) {
    const std::vector<DiagnosticsRecord> series{sep_record(0.0, 0.9), sep_record(1.0, 0.01), sep_record(2.0, 0.08),
                                                sep_record(3.0, 0.06), sep_record(4.0, 0.05)};
    const SeparationReport rep = separation_time(series);
    EXPECT_DOUBLE_EQ(rep.t_sp, 2.0);
    EXPECT_DOUBLE_EQ(rep.delta, 0.05);
}

TEST(Diagnostics, SeparationTimeRequiresSeparatedFinalState) {
    const std::vector<DiagnosticsRecord> series{sep_record(0.0, 0.5), sep_record(1.0, 0.0)};
    EXPECT_THROW(separation_time(series), NotSeparated);
    EXPECT_THROW(separation_time(std::vector<DiagnosticsRecord>{}), NotSeparated);
}

TEST(Diagnostics, WeakStrongDistanceOfIdenticalStatesIsZero) {
    const Grid g(12, 12, 1.0, 1.0);
    State s(g);
    s.phi = make_initial_phase(g, SeededPerturbation{0.0, 0.5, 3, 3});
    s.u = make_initial_velocity(g, ShearLayer{1.0});
    EXPECT_EQ(weak_strong_distance(s, s, kParams).D, 0.0);
}

TEST(Diagnostics, WeakStrongDistanceIsQuadraticInVelocityPerturbation) {
    const Grid g(12, 12, 1.0, 1.0);
    State base(g);
    base.phi = make_initial_phase(g, SeededPerturbation{0.0, 0.5, 3, 3});
    const MACVector du = make_initial_velocity(g, ShearLayer{1.0});
    State full = base;
    full.u = du;
    State half = base;
    half.u = 0.5 * du;
    const double d_full = weak_strong_distance(base, full, kParams).D;
    const double d_half = weak_strong_distance(base, half, kParams).D;
    EXPECT_GT(d_full, 0.0);
    EXPECT_NEAR(d_half / d_full, 0.25, 1e-14);
}

TEST(Diagnostics, WeakStrongDistanceMatchesTimes) {
    const Grid g(8, 8, 1.0, 1.0);
    std::vector<State> a{state_with_phi(g, 0.0), state_with_phi(g, 0.0)};
    std::vector<State> b{state_with_phi(g, 0.1), state_with_phi(g, 0.1), state_with_phi(g, 0.1)};
    a[0].t = 0.0;
    a[1].t = 0.5;
    b[0].t = 0.0;
    b[1].t = 0.25;
    b[2].t = 0.5;
    const auto d = weak_strong_distance(a, b, kParams);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d[0].t, 0.0);
    EXPECT_EQ(d[1].t, 0.5);
    // A constant phase difference has zero Laplacian.
    EXPECT_NEAR(d[1].D, 0.0, 1e-20);
}

TEST(Diagnostics, WeakStrongDistanceRejectsDifferentGrids) {
    const State a(Grid(8, 8, 1.0, 1.0));
    const State b(Grid(8, 4, 1.0, 1.0));
    EXPECT_THROW(weak_strong_distance(a, b, kParams), GridMismatch);
}
