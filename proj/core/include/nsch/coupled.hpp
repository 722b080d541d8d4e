#pragma once

// Full time steps of the Navier-Stokes-Cahn-Hilliard system and trajectory runs.
//
// A step first advances (phi, mu) by the Cahn-Hilliard stepper with the lagged
// velocity, then (u, p) by the momentum stepper. The capillary force enters
// the momentum step through the predictor u~ = u - dt phi grad mu / rho, and
// the Cahn-Hilliard step sees the matching face mobility 1 + dt phi^2 / rho,
// so the sum of both sub-steps obeys a discrete total-energy inequality.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "nsch/cahn_hilliard.hpp"
#include "nsch/diagnostics.hpp"
#include "nsch/momentum.hpp"
#include "nsch/state.hpp"

namespace nsch {

enum class Axis { X, Y };

struct ConstantPhase {
    double mean = 0.0;
};

/// mean + amplitude * g with g a random combination of Neumann cosine modes
/// up to `modes` per direction, normalised to max|g| = 1 on the grid.
struct SeededPerturbation {
    double mean = 0.0;
    double amplitude = 0.05;
    std::uint64_t seed = 1;
    int modes = 8;
};

/// amplitude * tanh((x - position Lx) / width) along the given axis
/// (position is a fraction of the side length).
struct TanhInterface {
    Axis orientation = Axis::X;
    double width = 0.1;
    double position = 0.5;
    double amplitude = 0.95;
};

/// +amplitude inside a disc, -amplitude outside, with tanh transition. The
/// centre is given as fractions of Lx, Ly; radius and width are lengths.
struct Bubble {
    double center_x = 0.5;
    double center_y = 0.5;
    double radius = 0.25;
    double width = 0.05;
    double amplitude = 0.95;
};

using PhaseInit = std::variant<ConstantPhase, SeededPerturbation, TanhInterface, Bubble>;

struct ZeroVelocity {};

/// Divergence-free cellular shear flow from a nodal stream function,
/// ux ~ magnitude sin(pi x/Lx) sin(2 pi y/Ly).
struct ShearLayer {
    double magnitude = 1.0;
};

using VelocityInit = std::variant<ZeroVelocity, ShearLayer>;

struct InitialCondition {
    PhaseInit phase = SeededPerturbation{};
    VelocityInit velocity = ZeroVelocity{};
};

struct RunConfig {
    Grid grid{64, 64, 1.0, 1.0};
    double dt = 1e-4;
    double t_end = 0.0;
    /// Snapshot period in steps.
    long output_every = 100;
    InitialCondition init;
    CHStepConfig ch;
    MomentumConfig momentum;
    /// Keep u = 0 and skip the momentum step (pure Cahn-Hilliard dynamics).
    bool freeze_velocity = false;
    /// Abort when a step's energy_defect exceeds energy_tol * |E(0)|.
    bool strict_energy = false;
    double energy_tol = 1e-8;
    /// Store snapshots in RunResult (observers receive them either way).
    bool keep_snapshots = true;
};

/// Number of steps, round(t_end / dt). Throws ConfigError if t_end/dt is not
/// close to an integer.
long step_count(const RunConfig& cfg);

/// Throws ConfigError / CFLViolation for inconsistent configurations.
void validate(const RunConfig& cfg, const ModelParams& params);

ScalarField make_initial_phase(const Grid& grid, const PhaseInit& init);
MACVector make_initial_velocity(const Grid& grid, const VelocityInit& init);
/// Initial chemical potential: -lap phi + Psi'(phi), with the obstacle
/// multiplier taken as zero for the double obstacle.
ScalarField initial_chemical_potential(const ScalarField& phi, const PotentialKind& kind);
State make_initial_state(const RunConfig& cfg, const ModelParams& params);

/// One coupled step.
State agg_step(const State& state, const ModelParams& params, const RunConfig& cfg);

struct Snapshot {
    long step = 0;
    State state;
};

struct RunObserver {
    std::function<void(const DiagnosticsRecord&)> on_record;
    std::function<void(long step, const State&)> on_snapshot;
};

struct RunResult {
    State final_state;
    DiagnosticsSeries series;
    std::vector<Snapshot> snapshots;
};

/// Fixed-step run from make_initial_state. Records diagnostics every step and
/// snapshots at step 0, every output_every steps and at the end. Solver
/// failures are rethrown as StepFailed after the observer saw every completed
/// step.
RunResult run(const RunConfig& cfg, const ModelParams& params, const RunObserver& observer = {});

/// Same, from a given initial state.
RunResult run_from(State initial, const RunConfig& cfg, const ModelParams& params, const RunObserver& observer = {});

struct WeakStrongRun {
    double epsilon = 0.0;
    /// Distance to the reference run at every snapshot time.
    std::vector<WeakStrongDistance> distance;
};

/// Runs the configured problem once as reference, then once per epsilon from
/// (u0 + eps du, phi0 + eps dphi). dphi is a zero-mean cosine combination
/// (max 1) drawn from `seed`; du is the unit shear layer (zero in 1D or with a
/// frozen velocity).
std::vector<WeakStrongRun> weak_strong_experiment(const RunConfig& cfg, const ModelParams& params,
                                                  std::span<const double> epsilons, std::uint64_t seed);

}  // namespace nsch
