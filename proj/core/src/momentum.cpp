#include "nsch/momentum.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "nsch/cahn_hilliard.hpp"
#include "nsch/errors.hpp"
#include "nsch/krylov.hpp"
#include "nsch/spectral.hpp"
#include "sparse_ops.hpp"
#include "stencil.hpp"

namespace nsch {

namespace {

using detail::SpMat;
using detail::Triplets;
using RowMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

std::size_t node_count(const Grid& g) { return static_cast<std::size_t>(g.nx() + 1) * (g.ny() + 1); }

// Viscosity at grid nodes: mean of the (up to four) adjacent cells.
std::vector<double> node_viscosity(const ScalarField& nu) {
    const Grid& g = nu.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    std::vector<double> out(node_count(g));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            double s = 0.0;
            int c = 0;
            for (int jj = j - 1; jj <= j; ++jj) {
                for (int ii = i - 1; ii <= i; ++ii) {
                    if (ii >= 0 && ii < nx && jj >= 0 && jj < ny) {
                        s += nu(ii, jj);
                        ++c;
                    }
                }
            }
            out[static_cast<std::size_t>(j) * (nx + 1) + i] = s / c;
        }
    }
    return out;
}

double node_weight(const Grid& g, int i, int j) {
    return ((i == 0 || i == g.nx()) ? 0.5 : 1.0) * ((j == 0 || j == g.ny()) ? 0.5 : 1.0);
}

// Strain operator: rows e11 (cells), e22 (cells), e12 (nodes); columns are
// face unknowns in MACVector order. No-slip ghosts are folded in.
SpMat strain_operator(const Grid& g) {
    const int nx = g.nx();
    const int ny = g.ny();
    const int n = static_cast<int>(g.cell_count());
    const int nxf = static_cast<int>(g.x_face_count());
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    auto xf = [&](int i, int j) { return static_cast<int>(g.x_face(i, j)); };
    auto yf = [&](int i, int j) { return nxf + static_cast<int>(g.y_face(i, j)); };

    Triplets trip;
    trip.reserve(static_cast<std::size_t>(n) * 8 + node_count(g) * 4);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int c = static_cast<int>(g.cell(i, j));
            trip.emplace_back(c, xf(i + 1, j), ihx);
            trip.emplace_back(c, xf(i, j), -ihx);
            trip.emplace_back(n + c, yf(i, j + 1), ihy);
            trip.emplace_back(n + c, yf(i, j), -ihy);
        }
    }
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const int row = 2 * n + j * (nx + 1) + i;
            if (i > 0 && i < nx) {
                if (j == 0) {
                    trip.emplace_back(row, xf(i, 0), ihy);
                } else if (j == ny) {
                    trip.emplace_back(row, xf(i, ny - 1), -ihy);
                } else {
                    trip.emplace_back(row, xf(i, j), 0.5 * ihy);
                    trip.emplace_back(row, xf(i, j - 1), -0.5 * ihy);
                }
            }
            if (j > 0 && j < ny) {
                if (i == 0) {
                    trip.emplace_back(row, yf(0, j), ihx);
                } else if (i == nx) {
                    trip.emplace_back(row, yf(nx - 1, j), -ihx);
                } else {
                    trip.emplace_back(row, yf(i, j), 0.5 * ihx);
                    trip.emplace_back(row, yf(i - 1, j), -0.5 * ihx);
                }
            }
        }
    }
    return detail::assemble(2 * n + static_cast<int>(node_count(g)), nxf + static_cast<int>(g.y_face_count()), trip);
}

// Quadrature weights W such that u^T E^T W E u = integral of nu |Du|^2.
std::vector<double> strain_weights(const ScalarField& phi, const ModelParams& params) {
    const Grid& g = phi.grid();
    const std::size_t n = g.cell_count();
    const ScalarField nu = nu_of_phi(phi, params);
    const std::vector<double> nu_n = node_viscosity(nu);
    const double area = g.cell_area();
    std::vector<double> w(2 * n + node_count(g));
    for (std::size_t k = 0; k < n; ++k) {
        w[k] = nu[k] * area;
        w[n + k] = nu[k] * area;
    }
    for (int j = 0; j <= g.ny(); ++j) {
        for (int i = 0; i <= g.nx(); ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * (g.nx() + 1) + i;
            w[2 * n + k] = 2.0 * nu_n[k] * node_weight(g, i, j) * area;
        }
    }
    return w;
}

// Skew-symmetric convection N(m, .) on face control volumes. Each entry is
// c * (m[f1] + m[f2]); emit(row, col, f1, f2, c) receives them in a fixed order.
template <class Emit>
void convection_entries(const Grid& g, Emit&& emit) {
    const int nx = g.nx();
    const int ny = g.ny();
    const int nxf = static_cast<int>(g.x_face_count());
    const double ihx = 0.25 / g.hx();
    const double ihy = 0.25 / g.hy();
    auto xf = [&](int i, int j) { return static_cast<int>(g.x_face(i, j)); };
    auto yf = [&](int i, int j) { return nxf + static_cast<int>(g.y_face(i, j)); };

    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const int row = xf(i, j);
            if (i + 1 < nx) emit(row, xf(i + 1, j), xf(i, j), xf(i + 1, j), ihx);
            if (i - 1 > 0) emit(row, xf(i - 1, j), xf(i - 1, j), xf(i, j), -ihx);
            if (j + 1 < ny) emit(row, xf(i, j + 1), yf(i - 1, j + 1), yf(i, j + 1), ihy);
            if (j > 0) emit(row, xf(i, j - 1), yf(i - 1, j), yf(i, j), -ihy);
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int row = yf(i, j);
            if (j + 1 < ny) emit(row, yf(i, j + 1), yf(i, j), yf(i, j + 1), ihy);
            if (j - 1 > 0) emit(row, yf(i, j - 1), yf(i, j - 1), yf(i, j), -ihy);
            if (i + 1 < nx) emit(row, yf(i + 1, j), xf(i + 1, j - 1), xf(i + 1, j), ihx);
            if (i > 0) emit(row, yf(i - 1, j), xf(i, j - 1), xf(i, j), -ihx);
        }
    }
}

// Fixed sparsity pattern of the velocity operator rho_hat/dt + N(m) + E^T W E,
// with a map from each contribution to its slot in the value array. Boundary
// faces get identity rows and are removed from interior rows.
struct VelocityPattern {
    struct Viscous {
        int slot;
        int row;
        double c;
    };
    struct Convective {
        int slot;
        int f1;
        int f2;
        double c;
    };
    RowMat a;
    std::vector<int> diagonal;
    std::vector<char> boundary;
    std::vector<Viscous> viscous;
    std::vector<Convective> convective;
};

VelocityPattern build_velocity_pattern(const Grid& g) {
    const int nf = static_cast<int>(MACVector(g).size());
    VelocityPattern vp;
    const MACVector probe(g);
    vp.boundary.resize(static_cast<std::size_t>(nf));
    for (int k = 0; k < nf; ++k) vp.boundary[static_cast<std::size_t>(k)] = probe.is_boundary(static_cast<std::size_t>(k));
    auto interior = [&](int k) { return !vp.boundary[static_cast<std::size_t>(k)]; };

    const Eigen::SparseMatrix<double, Eigen::RowMajor> e = strain_operator(g);
    struct Entry {
        int row;
        int col;
    };
    std::vector<Entry> entries;
    for (int k = 0; k < nf; ++k) entries.push_back({k, k});
    convection_entries(g, [&](int row, int col, int, int, double) { entries.push_back({row, col}); });
    for (int r = 0; r < e.outerSize(); ++r) {
        for (decltype(e)::InnerIterator a(e, r); a; ++a) {
            if (!interior(static_cast<int>(a.col()))) continue;
            for (decltype(e)::InnerIterator b(e, r); b; ++b) {
                if (interior(static_cast<int>(b.col()))) entries.push_back({static_cast<int>(a.col()), static_cast<int>(b.col())});
            }
        }
    }
    Triplets trip;
    trip.reserve(entries.size());
    for (const auto& en : entries) trip.emplace_back(en.row, en.col, 0.0);
    vp.a.resize(nf, nf);
    vp.a.setFromTriplets(trip.begin(), trip.end());
    vp.a.makeCompressed();

    auto slot = [&](int row, int col) {
        const int* begin = vp.a.innerIndexPtr() + vp.a.outerIndexPtr()[row];
        const int* end = vp.a.innerIndexPtr() + vp.a.outerIndexPtr()[row + 1];
        return static_cast<int>(std::lower_bound(begin, end, col) - vp.a.innerIndexPtr());
    };
    vp.diagonal.resize(static_cast<std::size_t>(nf));
    for (int k = 0; k < nf; ++k) vp.diagonal[static_cast<std::size_t>(k)] = slot(k, k);
    convection_entries(g, [&](int row, int col, int f1, int f2, double c) {
        vp.convective.push_back({slot(row, col), f1, f2, c});
    });
    const double inv_area = 1.0 / g.cell_area();
    for (int r = 0; r < e.outerSize(); ++r) {
        for (decltype(e)::InnerIterator a(e, r); a; ++a) {
            if (!interior(static_cast<int>(a.col()))) continue;
            for (decltype(e)::InnerIterator b(e, r); b; ++b) {
                if (!interior(static_cast<int>(b.col()))) continue;
                vp.viscous.push_back({slot(static_cast<int>(a.col()), static_cast<int>(b.col())), r,
                                      a.value() * b.value() * inv_area});
            }
        }
    }
    return vp;
}

VelocityPattern& cached_velocity_pattern(const Grid& g) {
    thread_local std::map<std::tuple<int, int, double, double>, VelocityPattern> cache;
    const auto key = std::make_tuple(g.nx(), g.ny(), g.lx(), g.ly());
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_velocity_pattern(g)).first;
    return it->second;
}

}  // namespace

double ModelParams::rho_min() const { return std::min(rho1, rho2); }
double ModelParams::rho_max() const { return std::max(rho1, rho2); }
double ModelParams::nu_min() const { return std::min(nu1, nu2); }
double ModelParams::nu_max() const { return std::max(nu1, nu2); }

void validate(const ModelParams& params) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(params.rho1) || !positive(params.rho2)) throw ConfigError("densities rho1, rho2 must be positive");
    if (!positive(params.nu1) || !positive(params.nu2)) throw ConfigError("viscosities nu1, nu2 must be positive");
    try {
        validate(params.potential);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

double rho_of(double phi, const ModelParams& params) {
    return params.rho1 * (1.0 + phi) / 2.0 + params.rho2 * (1.0 - phi) / 2.0;
}

double nu_of(double phi, const ModelParams& params) {
    return params.nu1 * (1.0 + phi) / 2.0 + params.nu2 * (1.0 - phi) / 2.0;
}

ScalarField rho_of_phi(const ScalarField& phi, const ModelParams& params) {
    ScalarField out(phi.grid());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = rho_of(phi[k], params);
    return out;
}

ScalarField nu_of_phi(const ScalarField& phi, const ModelParams& params) {
    ScalarField out(phi.grid());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = nu_of(phi[k], params);
    return out;
}

MACVector face_density(const ScalarField& phi, const ModelParams& params) {
    return interpolate_cell_to_face(rho_of_phi(phi, params));
}

MACVector j_flux(const ScalarField& mu, const ModelParams& params) {
    MACVector j = gradient_to_faces(mu);
    j *= -(params.rho1 - params.rho2) / 2.0;
    return j;
}

MACVector capillary_predictor(const MACVector& u, const ScalarField& phi, const ScalarField& mu,
                              const ModelParams& params, double dt) {
    const MACVector phi_f = interpolate_cell_to_face(phi);
    const MACVector rho_f = face_density(phi, params);
    const MACVector grad_mu = gradient_to_faces(mu);
    MACVector out = u;
    for (std::size_t k = 0; k < out.size(); ++k) out[k] -= dt * phi_f[k] * grad_mu[k] / rho_f[k];
    return out;
}

double viscous_dissipation(const MACVector& u, const ScalarField& phi, const ModelParams& params) {
    const Grid& g = u.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    const ScalarField nu = nu_of_phi(phi, params);
    const std::vector<double> nu_n = node_viscosity(nu);
    double cells = 0.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double e11 = (u.ux(i + 1, j) - u.ux(i, j)) / g.hx();
            const double e22 = (u.uy(i, j + 1) - u.uy(i, j)) / g.hy();
            cells += nu(i, j) * (e11 * e11 + e22 * e22);
        }
    }
    double nodes = 0.0;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const double below = j > 0 ? u.ux(i, j - 1) : -u.ux(i, 0);
            const double above = j < ny ? u.ux(i, j) : -u.ux(i, ny - 1);
            const double left = i > 0 ? u.uy(i - 1, j) : -u.uy(0, j);
            const double right = i < nx ? u.uy(i, j) : -u.uy(nx - 1, j);
            const double e12 = 0.5 * ((above - below) / g.hy() + (right - left) / g.hx());
            nodes += 2.0 * nu_n[static_cast<std::size_t>(j) * (nx + 1) + i] * node_weight(g, i, j) * e12 * e12;
        }
    }
    return (cells + nodes) * g.cell_area();
}

FlowState momentum_step(const FlowState& flow, const ScalarField& phi, const ScalarField& mu,
                        const ScalarField& phi_old, const ModelParams& params, const MomentumConfig& cfg,
                        MomentumStats* stats) {
    const Grid& g = phi.grid();
    if (g.is_1d()) throw ConfigError("momentum_step: the momentum equation is disabled in 1D mode (ny = 1)");
    if (!(flow.u.grid() == g) || !(flow.p.grid() == g) || !(mu.grid() == g) || !(phi_old.grid() == g)) {
        throw GridMismatch("momentum_step: fields live on different grids");
    }
    if (!(cfg.dt > 0.0)) throw ConfigError("momentum_step: dt must be positive");
    check_cfl(flow.u, cfg.dt);

    const double dt = cfg.dt;
    const std::size_t nf = flow.u.size();
    const std::size_t n = g.cell_count();

    VelocityPattern& vp = cached_velocity_pattern(g);
    const MACVector rho_old = face_density(phi_old, params);
    const MACVector rho_new = face_density(phi, params);
    const MACVector u_tilde = capillary_predictor(flow.u, phi_old, mu, params, dt);

    // Face mass flux rho_bar u^n + rho'_c phi^n u~ + J.
    const double rho_bar = 0.5 * (params.rho1 + params.rho2);
    const double rho_c = 0.5 * (params.rho1 - params.rho2);
    const MACVector phi_f = interpolate_cell_to_face(phi_old);
    const MACVector jf = j_flux(mu, params);
    MACVector m(g);
    for (std::size_t k = 0; k < nf; ++k) {
        m[k] = vp.boundary[k] ? 0.0 : rho_bar * flow.u[k] + rho_c * phi_f[k] * u_tilde[k] + jf[k];
    }

    const std::vector<double> w = strain_weights(phi, params);
    double* val = vp.a.valuePtr();
    std::fill(val, val + vp.a.nonZeros(), 0.0);
    for (const auto& c : vp.convective) val[c.slot] += c.c * (m[static_cast<std::size_t>(c.f1)] + m[static_cast<std::size_t>(c.f2)]);
    for (const auto& v : vp.viscous) val[v.slot] += w[static_cast<std::size_t>(v.row)] * v.c;
    std::vector<double> rho_hat(nf, 1.0);
    for (std::size_t k = 0; k < nf; ++k) {
        if (vp.boundary[k]) {
            val[vp.diagonal[k]] = 1.0;
        } else {
            rho_hat[k] = 0.5 * (rho_new[k] + rho_old[k]);
            val[vp.diagonal[k]] += rho_hat[k] / dt;
        }
    }
    const RowMat& a = vp.a;

    Eigen::BiCGSTAB<RowMat, Eigen::DiagonalPreconditioner<double>> velocity_solver;
    velocity_solver.setTolerance(cfg.linear_tol);
    velocity_solver.setMaxIterations(cfg.linear_max > 0 ? cfg.linear_max : static_cast<int>(nf));
    velocity_solver.compute(a);

    Eigen::VectorXd f(nf);
    for (std::size_t k = 0; k < nf; ++k) f[k] = vp.boundary[k] ? 0.0 : rho_old[k] * u_tilde[k] / dt;

    // Pressure Poisson: -div(beta grad q) = -div(w)/dt with beta = 1/rho_hat.
    MACVector beta(g);
    double beta_sum = 0.0;
    for (std::size_t k = 0; k < nf; ++k) {
        beta[k] = 1.0 / rho_hat[k];
        beta_sum += beta[k];
    }
    const double beta_bar = beta_sum / static_cast<double>(nf);
    const detail::FluxStencil poisson(g, &beta);
    NeumannDct& dct = neumann_dct(g);
    std::vector<double> symbol(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = dct.eigenvalues()[k];
        symbol[k] = lam > 0.0 ? 1.0 / (beta_bar * lam) : 0.0;
    }

    FlowState out{MACVector(g), flow.p};
    double impulse = 0.0;
    {
        const MACVector gp = gradient_to_faces(flow.p);
        for (std::size_t k = 0; k < nf; ++k) impulse = std::max(impulse, dt * beta[k] * std::abs(gp[k]));
    }
    MomentumStats local;
    Eigen::VectorXd wsol = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nf));
    for (std::size_t k = 0; k < nf; ++k) wsol[k] = flow.u[k];
    std::vector<double> b(n), q(n, 0.0);
    // Pressure increment q - nu div w: the viscous term completes the
    // Schur-complement approximation when viscosity dominates inertia.
    const ScalarField nu_new = nu_of_phi(phi, params);
    ScalarField dp(g);
    double v_ref = 0.0;
    double p_ref = 0.0;

    for (int it = 1;; ++it) {
        if (it > cfg.projection_max) {
            throw LinearSolveFailed("momentum_step: pressure iteration did not converge in " +
                                    std::to_string(cfg.projection_max) + " sweeps");
        }
        // First sweep solves for w, later sweeps for the increment A dw = -G q.
        Eigen::VectorXd rhs(nf);
        if (it == 1) {
            const MACVector gp = gradient_to_faces(out.p);
            for (std::size_t k = 0; k < nf; ++k) rhs[k] = f[k] - gp[k];
        } else {
            const MACVector gq = gradient_to_faces(dp);
            for (std::size_t k = 0; k < nf; ++k) rhs[k] = vp.boundary[k] ? 0.0 : -gq[k];
        }
        // Increments only need the absolute accuracy of the first solve.
        const double rhs_norm = rhs.norm();
        if (it == 1) v_ref = rhs_norm;
        const double v_tol = it == 1 ? cfg.linear_tol : std::min(1e-2, cfg.linear_tol * v_ref / std::max(rhs_norm, 1e-300));
        velocity_solver.setTolerance(v_tol);
        if (rhs_norm > 0.0) {
            const Eigen::VectorXd guess = it == 1 ? wsol : Eigen::VectorXd(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nf)));
            const Eigen::VectorXd sol = velocity_solver.solveWithGuess(rhs, guess);
            local.velocity_iterations += static_cast<int>(velocity_solver.iterations());
            if (velocity_solver.info() != Eigen::Success && velocity_solver.error() > std::max(1e-8, 10.0 * v_tol)) {
                throw LinearSolveFailed("momentum_step: velocity solve stopped at relative residual " +
                                        std::to_string(velocity_solver.error()));
            }
            wsol = it == 1 ? sol : Eigen::VectorXd(wsol + sol);
        } else if (it == 1) {
            wsol.setZero();
        }
        MACVector wf(g);
        for (std::size_t k = 0; k < nf; ++k) wf[k] = vp.boundary[k] ? 0.0 : wsol[k];

        const ScalarField div_w = divergence_mac(wf);
        double bmean = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            b[k] = -div_w[k] / dt;
            bmean += b[k];
        }
        bmean /= static_cast<double>(n);
        for (auto& v : b) v -= bmean;
        const double b_norm = detail::norm2(b);
        if (it == 1) p_ref = b_norm;
        const double p_tol = it == 1 ? cfg.linear_tol : std::min(1e-2, cfg.linear_tol * p_ref / std::max(b_norm, 1e-300));
        std::fill(q.begin(), q.end(), 0.0);
        const KrylovResult pr = conjugate_gradient(
            [&](std::span<const double> x, std::span<double> y) { poisson.apply(x, y); },
            [&](std::span<const double> x, std::span<double> y) { dct.apply_diagonal(x, y, symbol); }, b, q,
            p_tol, static_cast<int>(10 * n));
        local.pressure_iterations += pr.iterations;
        if (!pr.converged && pr.relative_residual > std::max(1e-8, 10.0 * p_tol)) {
            throw LinearSolveFailed("momentum_step: pressure solve stopped at relative residual " +
                                    std::to_string(pr.relative_residual));
        }

        const ScalarField qf(g, q);
        const MACVector gq = gradient_to_faces(qf);
        double corr = 0.0;
        for (std::size_t k = 0; k < nf; ++k) {
            const double c = dt * beta[k] * gq[k];
            out.u[k] = wf[k] - c;
            corr = std::max(corr, std::abs(c));
        }
        const double div_mean = mean(div_w);
        for (std::size_t k = 0; k < n; ++k) dp[k] = q[k] - nu_new[k] * (div_w[k] - div_mean);
        out.p += dp;
        local.projection_iterations = it;
        if (corr <= cfg.projection_tol * std::max({wf.max_abs(), impulse, 1e-300})) break;
    }
    out.u.zero_boundary();
    local.divergence = divergence_mac(out.u).max_abs();
    if (stats) *stats = local;
    return out;
}

}  // namespace nsch
