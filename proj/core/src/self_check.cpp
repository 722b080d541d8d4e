#include "nsch/self_check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "nsch/grid.hpp"

namespace nsch {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kLx = 1.3;
constexpr double kLy = 0.9;

ScalarField random_cells(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField f(g);
    for (auto& v : f.values()) v = dist(rng);
    return f;
}

MACVector random_faces(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    MACVector v(g);
    for (auto& x : v.ux()) x = dist(rng);
    for (auto& x : v.uy()) x = dist(rng);
    v.zero_boundary();
    return v;
}

double sbp_defect(const Grid& g, std::mt19937_64& rng) {
    const ScalarField f = random_cells(g, rng);
    const MACVector v = random_faces(g, rng);
    const MACVector gf = gradient_to_faces(f);
    const ScalarField dv = divergence_mac(v);
    const double lhs = inner_faces(gf, v) + inner_cells(f, dv);
    const double scale = norm_faces(gf) * norm_faces(v) + norm_cells(f) * norm_cells(dv);
    return std::abs(lhs) / scale;
}

double symmetry_defect(const Grid& g, std::mt19937_64& rng) {
    const ScalarField f = random_cells(g, rng);
    const ScalarField h = random_cells(g, rng);
    const ScalarField lf = laplacian_neumann(f);
    const ScalarField lh = laplacian_neumann(h);
    const double lhs = inner_cells(lf, h) - inner_cells(f, lh);
    const double scale = norm_cells(lf) * norm_cells(h) + norm_cells(f) * norm_cells(lh);
    return std::abs(lhs) / scale;
}

// Neumann-compatible test function and its derivatives.
double f_exact(double x, double y) { return std::cos(pi * x / kLx) * std::cos(2 * pi * y / kLy); }
double fx_exact(double x, double y) { return -pi / kLx * std::sin(pi * x / kLx) * std::cos(2 * pi * y / kLy); }
double fy_exact(double x, double y) { return -2 * pi / kLy * std::cos(pi * x / kLx) * std::sin(2 * pi * y / kLy); }
double lap_exact(double x, double y) {
    return -(pi * pi / (kLx * kLx) + 4 * pi * pi / (kLy * kLy)) * f_exact(x, y);
}

// Stream function vanishing on the boundary; u = d(psi)/dy, v = -d(psi)/dx.
double psi_exact(double x, double y) { return std::sin(pi * x / kLx) * std::sin(pi * y / kLy); }
double u_exact(double x, double y) { return pi / kLy * std::sin(pi * x / kLx) * std::cos(pi * y / kLy); }
double v_exact(double x, double y) { return -pi / kLx * std::cos(pi * x / kLx) * std::sin(pi * y / kLy); }

ScalarField sample_cells(const Grid& g, double (*fn)(double, double)) {
    ScalarField f(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) f(i, j) = fn(g.xc(i), g.yc(j));
    }
    return f;
}

double laplacian_error(int n) {
    const Grid g(n, n, kLx, kLy);
    return norm_cells(laplacian_neumann(sample_cells(g, f_exact)) - sample_cells(g, lap_exact));
}

double gradient_error(int n) {
    const Grid g(n, n, kLx, kLy);
    const MACVector gf = gradient_to_faces(sample_cells(g, f_exact));
    MACVector exact(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 1; i < g.nx(); ++i) exact.ux(i, j) = fx_exact(i * g.hx(), g.yc(j));
    }
    for (int j = 1; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) exact.uy(i, j) = fy_exact(g.xc(i), j * g.hy());
    }
    return norm_faces(gf - exact);
}

// Divergence of (fx, fy) sampled on faces, which vanishes on the boundary.
double divergence_error(int n) {
    const Grid g(n, n, kLx, kLy);
    MACVector v(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 1; i < g.nx(); ++i) v.ux(i, j) = fx_exact(i * g.hx(), g.yc(j));
    }
    for (int j = 1; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) v.uy(i, j) = fy_exact(g.xc(i), j * g.hy());
    }
    return norm_cells(divergence_mac(v) - sample_cells(g, lap_exact));
}

double advection_error(int n) {
    const Grid g(n, n, kLx, kLy);
    MACVector u(g);
    const double hx = g.hx();
    const double hy = g.hy();
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 1; i < g.nx(); ++i) {
            u.ux(i, j) = (psi_exact(i * hx, (j + 1) * hy) - psi_exact(i * hx, j * hy)) / hy;
        }
    }
    for (int j = 1; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            u.uy(i, j) = -(psi_exact((i + 1) * hx, j * hy) - psi_exact(i * hx, j * hy)) / hx;
        }
    }
    ScalarField exact(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const double x = g.xc(i);
            const double y = g.yc(j);
            exact(i, j) = u_exact(x, y) * fx_exact(x, y) + v_exact(x, y) * fy_exact(x, y);
        }
    }
    return norm_cells(advect_scalar(u, sample_cells(g, f_exact)) - exact);
}

double observed_order(const std::function<double(int)>& error) {
    const double e32 = error(32);
    const double e64 = error(64);
    const double e128 = error(128);
    return std::min(std::log2(e32 / e64), std::log2(e64 / e128));
}

CheckResult bounded(std::string name, double value, double threshold) {
    return {std::move(name), value, threshold, false, value <= threshold};
}

CheckResult order(std::string name, double value) {
    constexpr double min_order = 1.9;
    return {std::move(name), value, min_order, true, value >= min_order};
}

}  // namespace

std::vector<CheckResult> run_self_checks() {
    std::mt19937_64 rng(20240611);
    std::vector<CheckResult> out;
    double sbp = 0.0;
    double sym = 0.0;
    for (const Grid& g : {Grid(32, 24, kLx, kLy), Grid(17, 1, kLx, 1.0), Grid(64, 64, 1.0, 1.0)}) {
        sbp = std::max(sbp, sbp_defect(g, rng));
        sym = std::max(sym, symmetry_defect(g, rng));
    }
    out.push_back(bounded("summation_by_parts", sbp, 1e-13));
    out.push_back(bounded("laplacian_symmetry", sym, 1e-12));
    out.push_back(order("order_laplacian", observed_order(laplacian_error)));
    out.push_back(order("order_gradient", observed_order(gradient_error)));
    out.push_back(order("order_divergence", observed_order(divergence_error)));
    out.push_back(order("order_advection", observed_order(advection_error)));
    return out;
}

}  // namespace nsch
