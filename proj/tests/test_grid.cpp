#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "nsch/grid.hpp"

using namespace nsch;

namespace {

constexpr double pi = std::numbers::pi;

ScalarField random_cells(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    ScalarField f(g);
    for (auto& v : f.values()) v = d(rng);
    return f;
}

MACVector random_faces(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    MACVector v(g);
    for (auto& x : v.ux()) x = d(rng);
    for (auto& x : v.uy()) x = d(rng);
    v.zero_boundary();
    return v;
}

}  // namespace

TEST(Grid, RejectsBadDimensions) {
    EXPECT_THROW(Grid(2, 4, 1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(Grid(4, 4, -1.0, 1.0), std::invalid_argument);
}

TEST(Grid, IndexLayout) {
    const Grid g(5, 3, 2.0, 1.0);
    EXPECT_EQ(g.cell(2, 1), 7u);
    EXPECT_EQ(g.x_face(5, 2), 17u);
    EXPECT_EQ(g.y_face(4, 3), 19u);
    EXPECT_EQ(g.x_face_count(), 18u);
    EXPECT_EQ(g.y_face_count(), 20u);
}

TEST(Grid, BoundaryFacesAreZeroedAndDetected) {
    const Grid g(4, 3, 1.0, 1.0);
    MACVector v(g);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = 1.0;
    v.zero_boundary();
    EXPECT_EQ(v.ux(0, 1), 0.0);
    EXPECT_EQ(v.ux(4, 2), 0.0);
    EXPECT_EQ(v.uy(1, 0), 0.0);
    EXPECT_EQ(v.uy(2, 3), 0.0);
    EXPECT_EQ(v.ux(2, 1), 1.0);
    EXPECT_EQ(v.boundary_max_abs(), 0.0);
}

TEST(Grid, SummationByParts) {
    for (const Grid& g : {Grid(12, 9, 1.3, 0.7), Grid(20, 1, 2.0, 1.0)}) {
        const ScalarField f = random_cells(g, 1);
        const MACVector v = random_faces(g, 2);
        const double lhs = inner_faces(gradient_to_faces(f), v);
        const double rhs = -inner_cells(f, divergence_mac(v));
        EXPECT_NEAR(lhs, rhs, 1e-13 * (std::abs(lhs) + 1.0));
    }
}

TEST(Grid, LaplacianIsDivergenceOfGradientAndSymmetric) {
    const Grid g(10, 7, 1.0, 2.0);
    const ScalarField f = random_cells(g, 3);
    const ScalarField h = random_cells(g, 4);
    const ScalarField a = laplacian_neumann(f);
    const ScalarField b = divergence_mac(gradient_to_faces(f));
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
    EXPECT_NEAR(inner_cells(a, h), inner_cells(f, laplacian_neumann(h)), 1e-11);
}

TEST(Grid, LaplacianAnnihilatesConstants) {
    const Grid g(8, 8, 1.0, 1.0);
    EXPECT_LT(laplacian_neumann(ScalarField(g, 3.5)).max_abs(), 1e-12);
}

TEST(Grid, GradientOfLinearFieldIsExactInInterior) {
    const Grid g(8, 6, 2.0, 3.0);
    ScalarField f(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) f(i, j) = 2.0 * g.xc(i) - 0.5 * g.yc(j);
    }
    const MACVector gf = gradient_to_faces(f);
    EXPECT_NEAR(gf.ux(3, 2), 2.0, 1e-12);
    EXPECT_NEAR(gf.uy(4, 3), -0.5, 1e-12);
    EXPECT_EQ(gf.ux(0, 2), 0.0);
    EXPECT_EQ(gf.uy(4, 0), 0.0);
}

TEST(Grid, LaplacianOfCosineConvergesAtSecondOrder) {
    double err[3];
    const int ns[3] = {32, 64, 128};
    for (int r = 0; r < 3; ++r) {
        const Grid g(ns[r], 1, 1.7, 1.0);
        ScalarField f(g);
        for (int i = 0; i < g.nx(); ++i) f(i, 0) = std::cos(pi * g.xc(i) / g.lx());
        const ScalarField l = laplacian_neumann(f);
        double e = 0.0;
        for (int i = 0; i < g.nx(); ++i) {
            const double exact = -std::pow(pi / g.lx(), 2) * std::cos(pi * g.xc(i) / g.lx());
            e = std::max(e, std::abs(l(i, 0) - exact));
        }
        err[r] = e;
    }
    EXPECT_GE(std::log2(err[0] / err[1]), 1.9);
    EXPECT_GE(std::log2(err[1] / err[2]), 1.9);
}

TEST(Grid, AdvectionOfConstantByDivergenceFreeFieldVanishes) {
    const Grid g(8, 8, 1.0, 1.0);
    MACVector u(g);
    // Discrete stream function on nodes.
    auto psi = [&](int i, int j) { return std::sin(pi * i / 8.0) * std::sin(pi * j / 8.0); };
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i <= g.nx(); ++i) u.ux(i, j) = (psi(i, j + 1) - psi(i, j)) / g.hy();
    }
    for (int j = 0; j <= g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) u.uy(i, j) = -(psi(i + 1, j) - psi(i, j)) / g.hx();
    }
    EXPECT_LT(divergence_mac(u).max_abs(), 1e-12);
    EXPECT_LT(advect_scalar(u, ScalarField(g, 0.7)).max_abs(), 1e-12);
}

TEST(Grid, VelocityGradientOfZeroFieldIsZeroAndPositiveOtherwise) {
    const Grid g(6, 5, 1.0, 1.0);
    EXPECT_EQ(velocity_gradient_sq(MACVector(g)), 0.0);
    MACVector u = random_faces(g, 5);
    EXPECT_GT(velocity_gradient_sq(u), 0.0);
}

TEST(Grid, VelocityGradientOfSingleFaceValue) {
    // One interior x-face value a on a 4x2 grid with h = 1: the normal
    // derivative contributes (a^2 + a^2) at the two adjacent cells and the
    // tangential derivative reaches the nodes above and below the face.
    const Grid g(4, 2, 4.0, 2.0);
    MACVector u(g);
    const double a = 1.5;
    u.ux(2, 0) = a;
    // Cells (1,0) and (2,0): (du/dx)^2 = a^2 each, weight 1.
    const double normal = 2.0 * a * a;
    // Node (2,0) on the bottom wall: ghost -a, derivative 2a, weight 1/2.
    // Node (2,1) interior: derivative -a, weight 1.
    const double tangential = 0.5 * 4.0 * a * a + a * a;
    EXPECT_NEAR(velocity_gradient_sq(u), normal + tangential, 1e-12);
}

TEST(Grid, QuadratureUsesCellArea) {
    const Grid g(4, 5, 2.0, 1.0);
    EXPECT_NEAR(integral(ScalarField(g, 2.0)), 4.0, 1e-14);
    EXPECT_NEAR(mean(ScalarField(g, 2.0)), 2.0, 1e-14);
    EXPECT_NEAR(norm_cells(ScalarField(g, 1.0)), std::sqrt(2.0), 1e-14);
}

TEST(Grid, FieldArithmeticChecksShapes) {
    const Grid g(4, 4, 1.0, 1.0);
    ScalarField a(g, 1.0);
    const ScalarField b(g, 2.0);
    a += b;
    EXPECT_EQ(a.max(), 3.0);
    EXPECT_EQ((2.0 * a).min(), 6.0);
    EXPECT_TRUE(a.all_finite());
}
