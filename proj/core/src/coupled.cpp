#include "nsch/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "nsch/errors.hpp"

namespace nsch {

namespace {

constexpr double kInitialBound = 1.0 - 1e-6;

double unit_uniform(std::mt19937_64& rng) {
    // 53 random mantissa bits mapped to [-1, 1).
    return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

ScalarField seeded_perturbation(const Grid& g, const SeededPerturbation& s) {
    if (s.modes < 1) throw ConfigError("init.modes must be >= 1");
    std::mt19937_64 rng(s.seed);
    const int lmax = g.is_1d() ? 0 : s.modes;
    ScalarField shape(g);
    std::vector<double> cx(g.nx()), cy(g.ny());
    for (int l = 0; l <= lmax; ++l) {
        for (int k = 0; k <= s.modes; ++k) {
            if (k == 0 && l == 0) continue;
            const double a = unit_uniform(rng);
            for (int i = 0; i < g.nx(); ++i) cx[i] = std::cos(std::numbers::pi * k * g.xc(i) / g.lx());
            for (int j = 0; j < g.ny(); ++j) cy[j] = g.is_1d() ? 1.0 : std::cos(std::numbers::pi * l * g.yc(j) / g.ly());
            for (int j = 0; j < g.ny(); ++j) {
                for (int i = 0; i < g.nx(); ++i) shape(i, j) += a * cx[i] * cy[j];
            }
        }
    }
    const double scale = shape.max_abs();
    ScalarField phi(g, s.mean);
    if (scale > 0.0) {
        for (std::size_t k = 0; k < phi.size(); ++k) phi[k] += s.amplitude * shape[k] / scale;
    }
    return phi;
}

MACVector mobility_for_coupling(const ScalarField& phi, const ModelParams& params, double dt) {
    const MACVector phi_f = interpolate_cell_to_face(phi);
    const MACVector rho_f = face_density(phi, params);
    MACVector m(phi.grid());
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = 1.0 + dt * phi_f[k] * phi_f[k] / rho_f[k];
    return m;
}

bool flow_active(const Grid& g, const RunConfig& cfg) { return !g.is_1d() && !cfg.freeze_velocity; }

}  // namespace

long step_count(const RunConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("time.dt must be positive");
    if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) throw ConfigError("time.t_end must be >= 0");
    const double n = cfg.t_end / cfg.dt;
    const double r = std::round(n);
    if (std::abs(n - r) > 1e-6 * std::max(1.0, n)) {
        throw ConfigError("time.t_end must be an integer multiple of time.dt");
    }
    return static_cast<long>(r);
}

void validate(const RunConfig& cfg, const ModelParams& params) {
    validate(params);
    CHStepConfig ch = cfg.ch;
    ch.dt = cfg.dt;
    validate(ch);
    step_count(cfg);
    if (cfg.output_every < 1) throw ConfigError("output.every must be >= 1");
    if (cfg.grid.is_1d() && std::holds_alternative<ShearLayer>(cfg.init.velocity)) {
        throw ConfigError("init.velocity: a shear layer needs a 2D grid (ny > 1)");
    }
    if (!(cfg.energy_tol > 0.0)) throw ConfigError("energy tolerance must be positive");
}

ScalarField make_initial_phase(const Grid& g, const PhaseInit& init) {
    ScalarField phi = std::visit(
        [&](const auto& p) -> ScalarField {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ConstantPhase>) {
                return ScalarField(g, p.mean);
            } else if constexpr (std::is_same_v<T, SeededPerturbation>) {
                return seeded_perturbation(g, p);
            } else if constexpr (std::is_same_v<T, TanhInterface>) {
                if (!(p.width > 0.0)) throw ConfigError("init.width must be positive");
                ScalarField f(g);
                for (int j = 0; j < g.ny(); ++j) {
                    for (int i = 0; i < g.nx(); ++i) {
                        const double d = p.orientation == Axis::X ? g.xc(i) - p.position * g.lx()
                                                                  : g.yc(j) - p.position * g.ly();
                        f(i, j) = p.amplitude * std::tanh(d / p.width);
                    }
                }
                return f;
            } else {
                if (!(p.width > 0.0) || !(p.radius > 0.0)) throw ConfigError("init.radius and init.width must be positive");
                ScalarField f(g);
                for (int j = 0; j < g.ny(); ++j) {
                    for (int i = 0; i < g.nx(); ++i) {
                        const double r = std::hypot(g.xc(i) - p.center_x * g.lx(), g.yc(j) - p.center_y * g.ly());
                        f(i, j) = p.amplitude * std::tanh((p.radius - r) / p.width);
                    }
                }
                return f;
            }
        },
        init);
    if (!phi.all_finite() || phi.max_abs() > kInitialBound) {
        throw ConfigError("initial phase field must satisfy |phi0| <= 1 - 1e-6 (check init.mean / init.amplitude)");
    }
    return phi;
}

MACVector make_initial_velocity(const Grid& g, const VelocityInit& init) {
    MACVector u(g);
    const auto* shear = std::get_if<ShearLayer>(&init);
    if (!shear) return u;
    if (g.is_1d()) throw ConfigError("init.velocity: a shear layer needs a 2D grid (ny > 1)");
    const int nx = g.nx();
    const int ny = g.ny();
    // Stream function at nodes, exactly zero on the boundary, so the discrete
    // divergence vanishes identically and normal velocities are zero on walls.
    std::vector<double> psi(static_cast<std::size_t>(nx + 1) * (ny + 1), 0.0);
    for (int j = 1; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const double x = i * g.hx();
            const double y = j * g.hy();
            psi[static_cast<std::size_t>(j) * (nx + 1) + i] = shear->magnitude * std::sin(std::numbers::pi * x / g.lx()) *
                                                          g.ly() / (2.0 * std::numbers::pi) *
                                                          (1.0 - std::cos(2.0 * std::numbers::pi * y / g.ly()));
        }
    }
    auto at = [&](int i, int j) { return psi[static_cast<std::size_t>(j) * (nx + 1) + i]; };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i <= nx; ++i) u.ux(i, j) = (at(i, j + 1) - at(i, j)) / g.hy();
    }
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i < nx; ++i) u.uy(i, j) = -(at(i + 1, j) - at(i, j)) / g.hx();
    }
    return u;
}

ScalarField initial_chemical_potential(const ScalarField& phi, const PotentialKind& kind) {
    if (const auto* fh = std::get_if<FloryHuggins>(&kind)) return chemical_potential(phi, *fh);
    const double theta0 = std::get<DoubleObstacle>(kind).theta0;
    ScalarField mu = laplacian_neumann(phi);
    for (std::size_t k = 0; k < mu.size(); ++k) mu[k] = -mu[k] - theta0 * phi[k];
    return mu;
}

State make_initial_state(const RunConfig& cfg, const ModelParams& params) {
    const Grid& g = cfg.grid;
    ScalarField phi = make_initial_phase(g, cfg.init.phase);
    MACVector u = flow_active(g, cfg) ? make_initial_velocity(g, cfg.init.velocity) : MACVector(g);
    ScalarField mu = initial_chemical_potential(phi, params.potential);
    return State(0.0, std::move(u), ScalarField(g), std::move(phi), std::move(mu));
}

State agg_step(const State& state, const ModelParams& params, const RunConfig& cfg) {
    const Grid& g = state.grid();
    const double dt = cfg.dt;
    const bool flow = flow_active(g, cfg);
    CHStepConfig ch = cfg.ch;
    ch.dt = dt;

    const CHState chs{state.t, state.phi, state.mu};
    const MACVector zero(g);
    const MACVector& drift = flow ? state.u : zero;
    std::optional<MACVector> mobility;
    if (flow) mobility = mobility_for_coupling(state.phi, params, dt);

    CHState next_ch = [&]() {
        if (const auto* fh = std::get_if<FloryHuggins>(&params.potential)) {
            return mobility ? ch_step(chs, drift, *mobility, ch, *fh) : ch_step(chs, drift, ch, params.potential);
        }
        return obstacle_ch_step(chs, drift, ch, std::get<DoubleObstacle>(params.potential),
                                mobility ? &*mobility : nullptr)
            .state;
    }();

    State next(next_ch.t, MACVector(g), state.p, std::move(next_ch.phi), std::move(next_ch.mu));
    if (flow) {
        MomentumConfig mc = cfg.momentum;
        mc.dt = dt;
        FlowState fs = momentum_step(FlowState{state.u, state.p}, next.phi, next.mu, state.phi, params, mc);
        next.u = std::move(fs.u);
        next.p = std::move(fs.p);
    }
    return next;
}

RunResult run(const RunConfig& cfg, const ModelParams& params, const RunObserver& observer) {
    validate(cfg, params);
    return run_from(make_initial_state(cfg, params), cfg, params, observer);
}

RunResult run_from(State initial, const RunConfig& cfg, const ModelParams& params, const RunObserver& observer) {
    validate(cfg, params);
    if (!(initial.grid() == cfg.grid)) throw GridMismatch("run: initial state does not match grid");
    if (flow_active(cfg.grid, cfg)) check_cfl(initial.u, cfg.dt);
    const long steps = step_count(cfg);
    const double t0 = initial.t;

    RunResult result{initial, {}, {}};
    result.series.reserve(static_cast<std::size_t>(steps) + 1);
    auto emit_snapshot = [&](long step, const State& s) {
        if (observer.on_snapshot) observer.on_snapshot(step, s);
        if (cfg.keep_snapshots) result.snapshots.push_back({step, s});
    };

    DiagnosticsRecord prev = record(initial, params);
    result.series.push_back(prev);
    if (observer.on_record) observer.on_record(prev);
    emit_snapshot(0, initial);
    const double energy_scale = std::max(std::abs(prev.E_total), 1e-300);

    State current = std::move(initial);
    for (long step = 1; step <= steps; ++step) {
        State next(cfg.grid);
        try {
            next = agg_step(current, params, cfg);
        } catch (const CFLViolation& e) {
            throw CFLViolation("step " + std::to_string(step) + ": " + e.what());
        } catch (const SolverError& e) {
            throw StepFailed(step, e.what());
        } catch (const std::domain_error& e) {
            throw StepFailed(step, e.what());
        }
        next.t = t0 + static_cast<double>(step) * cfg.dt;

        DiagnosticsRecord rec = record(next, prev, params, cfg.dt);
        result.series.push_back(rec);
        if (observer.on_record) observer.on_record(rec);
        if (cfg.strict_energy && rec.energy_defect > cfg.energy_tol * energy_scale) {
            throw EnergyInequalityViolated("step " + std::to_string(step) + ": energy defect " +
                                           std::to_string(rec.energy_defect) + " exceeds tolerance " +
                                           std::to_string(cfg.energy_tol * energy_scale));
        }
        if (step % cfg.output_every == 0 || step == steps) emit_snapshot(step, next);
        prev = rec;
        current = std::move(next);
    }
    result.final_state = std::move(current);
    return result;
}

std::vector<WeakStrongRun> weak_strong_experiment(const RunConfig& cfg, const ModelParams& params,
                                                  std::span<const double> epsilons, std::uint64_t seed) {
    validate(cfg, params);
    const Grid& g = cfg.grid;
    RunConfig rc = cfg;
    rc.keep_snapshots = true;
    const State base = make_initial_state(rc, params);
    const RunResult reference = run_from(base, rc, params);

    const ScalarField dphi = seeded_perturbation(g, SeededPerturbation{0.0, 1.0, seed, 4});
    const MACVector du = flow_active(g, rc) ? make_initial_velocity(g, ShearLayer{1.0}) : MACVector(g);

    std::vector<State> ref_states;
    for (const Snapshot& s : reference.snapshots) ref_states.push_back(s.state);

    std::vector<WeakStrongRun> out;
    for (double eps : epsilons) {
        State init = base;
        for (std::size_t k = 0; k < init.phi.size(); ++k) init.phi[k] += eps * dphi[k];
        for (std::size_t k = 0; k < init.u.size(); ++k) init.u[k] += eps * du[k];
        if (init.phi.max_abs() > kInitialBound) {
            throw ConfigError("weakstrong.epsilon too large: perturbed phase field leaves (-1, 1)");
        }
        init.mu = initial_chemical_potential(init.phi, params.potential);
        const RunResult perturbed = run_from(std::move(init), rc, params);
        std::vector<State> states;
        for (const Snapshot& s : perturbed.snapshots) states.push_back(s.state);
        out.push_back({eps, weak_strong_distance(ref_states, states, params)});
    }
    return out;
}

}  // namespace nsch
