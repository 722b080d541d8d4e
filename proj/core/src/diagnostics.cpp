#include "nsch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsch/errors.hpp"

namespace nsch {

double kinetic_energy(const MACVector& u, const ScalarField& phi, const ModelParams& params) {
    const MACVector rho = face_density(phi, params);
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += 0.5 * rho[k] * u[k] * u[k];
    return s * u.grid().cell_area();
}

double free_energy(const ScalarField& phi, const PotentialKind& kind) {
    const MACVector grad = gradient_to_faces(phi);
    double s = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) s += 0.5 * grad[k] * grad[k];
    for (std::size_t k = 0; k < phi.size(); ++k) s += psi_value(phi[k], kind);
    return s * phi.grid().cell_area();
}

double chemical_dissipation(const ScalarField& mu) {
    const MACVector grad = gradient_to_faces(mu);
    return inner_faces(grad, grad);
}

DiagnosticsRecord record(const State& state, const ModelParams& params) {
    const Grid& g = state.grid();
    DiagnosticsRecord r;
    r.t = state.t;
    r.mass = mean(state.phi);
    r.E_kin = kinetic_energy(state.u, state.phi, params);
    r.E_free = free_energy(state.phi, params.potential);
    r.E_total = r.E_kin + r.E_free;
    r.D_visc = g.is_1d() ? 0.0 : viscous_dissipation(state.u, state.phi, params);
    r.D_chem = chemical_dissipation(state.mu);
    r.u_L2 = norm_faces(state.u);
    r.grad_mu_L2 = std::sqrt(r.D_chem);
    const double lap = norm_cells(laplacian_neumann(state.mu));
    r.grad_mu_H1 = std::sqrt(r.D_chem + lap * lap);
    r.phi_min = state.phi.min();
    r.phi_max = state.phi.max();
    r.sep_delta = 1.0 - state.phi.max_abs();
    ScalarField centred = state.mu;
    const double m = mean(state.mu);
    for (auto& v : centred.values()) v -= m;
    r.stat_mu_residual = norm_cells(centred);
    return r;
}

DiagnosticsRecord record(const State& state, const State* prev, const ModelParams& params, double dt) {
    if (!prev) return record(state, params);
    return record(state, record(*prev, params), params, dt);
}

DiagnosticsRecord record(const State& state, const DiagnosticsRecord& prev, const ModelParams& params, double dt) {
    DiagnosticsRecord r = record(state, params);
    r.energy_defect = r.E_total - prev.E_total + dt * (r.D_visc + r.D_chem);
    return r;
}

SeparationReport separation_time(std::span<const DiagnosticsRecord> series) {
    if (series.empty()) throw NotSeparated("separation_time: empty series");
    const double final_delta = series.back().sep_delta;
    if (!(final_delta >= 1e-6)) {
        throw NotSeparated("separation_time: sep_delta at the final time is " + std::to_string(final_delta));
    }
    std::size_t start = 0;
    for (std::size_t k = series.size(); k-- > 0;) {
        if (series[k].sep_delta <= 0.5 * final_delta) {
            start = k + 1;
            break;
        }
    }
    SeparationReport rep;
    rep.t_sp = series[start].t;
    rep.delta = std::numeric_limits<double>::infinity();
    for (std::size_t k = start; k < series.size(); ++k) rep.delta = std::min(rep.delta, series[k].sep_delta);
    return rep;
}

WeakStrongDistance weak_strong_distance(const State& a, const State& b, const ModelParams& params) {
    if (!(a.grid() == b.grid())) throw GridMismatch("weak_strong_distance: runs use different grids");
    const MACVector du = a.u - b.u;
    const ScalarField lap = laplacian_neumann(a.phi - b.phi);
    const double l2 = norm_cells(lap);
    return {a.t, kinetic_energy(du, a.phi, params) + 0.5 * l2 * l2};
}

std::vector<WeakStrongDistance> weak_strong_distance(std::span<const State> a, std::span<const State> b,
                                                     const ModelParams& params) {
    std::vector<WeakStrongDistance> out;
    if (!a.empty() && !b.empty() && !(a.front().grid() == b.front().grid())) {
        throw GridMismatch("weak_strong_distance: runs use different grids");
    }
    std::size_t j = 0;
    for (const State& sa : a) {
        const double tol = 1e-9 * std::max(1.0, std::abs(sa.t));
        while (j < b.size() && b[j].t < sa.t - tol) ++j;
        if (j < b.size() && std::abs(b[j].t - sa.t) <= tol) out.push_back(weak_strong_distance(sa, b[j], params));
    }
    return out;
}

}  // namespace nsch
