#include "nsch/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "nsch/errors.hpp"

namespace nsch {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, std::string_view value, const char* expected) {
    throw ConfigError("invalid value for " + key + ": '" + std::string(value) + "' (expected " + expected + ")");
}

template <class T>
T parse_number(const std::string& key, std::string_view value, const char* expected) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    if (!value.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || value.empty()) bad_value(key, value, expected);
    return out;
}

double parse_real(const std::string& key, std::string_view v) { return parse_number<double>(key, v, "a real number"); }
long parse_long(const std::string& key, std::string_view v) { return parse_number<long>(key, v, "an integer"); }
int parse_int(const std::string& key, std::string_view v) { return parse_number<int>(key, v, "an integer"); }

bool parse_bool(const std::string& key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, v, "true or false");
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, std::string_view v, F&& item) {
    std::vector<T> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        const std::string_view piece = trim(v.substr(0, comma));
        if (piece.empty()) bad_value(key, v, "a comma-separated list");
        out.push_back(item(key, piece));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    if (out.empty()) bad_value(key, v, "a non-empty list");
    return out;
}

// Values collected before the typed configuration can be assembled.
struct Staging {
    double lx = 1.0, ly = 1.0;
    int nx = 64, ny = 64;
    std::string potential = "flory_huggins";
    double theta = 1.0, theta0 = 2.0, c = 100.0;
    std::string init_kind = "seeded";
    double mean = 0.0, amplitude = 0.05, width = 0.1, position = 0.5;
    double center_x = 0.5, center_y = 0.5, radius = 0.25;
    std::uint64_t seed = 1;
    int modes = 8;
    std::string orientation = "x";
    std::string velocity = "zero";
    double velocity_magnitude = 1.0;
    bool have_amplitude = false;
};

using Setter = std::function<void(Config&, Staging&, const std::string&, std::string_view)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"domain.Lx", [](Config&, Staging& s, const std::string& k, std::string_view v) { s.lx = parse_real(k, v); }},
        {"domain.Ly", [](Config&, Staging& s, const std::string& k, std::string_view v) { s.ly = parse_real(k, v); }},
        {"grid.nx", [](Config&, Staging& s, const std::string& k, std::string_view v) { s.nx = parse_int(k, v); }},
        {"grid.ny", [](Config&, Staging& s, const std::string& k, std::string_view v) { s.ny = parse_int(k, v); }},
        {"params.rho1", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.params.rho1 = parse_real(k, v); }},
        {"params.rho2", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.params.rho2 = parse_real(k, v); }},
        {"params.nu1", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.params.nu1 = parse_real(k, v); }},
        {"params.nu2", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.params.nu2 = parse_real(k, v); }},
        {"params.theta", [](Config&, Staging& s, const std::string& k, std::string_view v) { s.theta = parse_real(k, v); }},
        {"params.theta0", [](Config&, Staging& s, const std::string& k, std::string_view v) { s.theta0 = parse_real(k, v); }},
        {"potential.kind", [](Config&, Staging& s, const std::string& k, std::string_view v) {
             if (v != "flory_huggins" && v != "double_obstacle") bad_value(k, v, "flory_huggins or double_obstacle");
             s.potential = std::string(v);
         }},
        {"potential.c", [](Config&, Staging& s, const std::string& k, std::string_view v) { s.c = parse_real(k, v); }},
        {"time.dt", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.run.dt = parse_real(k, v); }},
        {"time.t_end", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.run.t_end = parse_real(k, v); }},
        {"output.every", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.run.output_every = parse_long(k, v); }},
        {"output.dir", [](Config& c, Staging&, const std::string&, std::string_view v) { c.output_dir = std::string(v); }},
        {"init.kind", [](Config&, Staging& s, const std::string& k, std::string_view v) {
             if (v != "constant" && v != "seeded" && v != "tanh" && v != "bubble") {
                 bad_value(k, v, "constant, seeded, tanh or bubble");
             }
             s.init_kind = std::string(v);
         }},
        {"init.mean", [](Config&, Staging& s, const std::string& k, std::string_view v) { s.mean = parse_real(k, v); }},
        {"init.amplitude", [](Config&, Staging& s, const std::string& k, std::string_view v) {
             s.amplitude = parse_real(k, v);
             s.have_amplitude = true;
         }},
        {"init.seed", [](Config&, Staging& s, const std::string& k, std::string_view v) {
             s.seed = parse_number<std::uint64_t>(k, v, "a non-negative integer");
         }},
        {"init.modes", [](Config&, Staging& s, const std::string& k, std::string_view v) { s.modes = parse_int(k, v); }},
        {"init.orientation", [](Config&, Staging& s, const std::string& k, std::string_view v) {
             if (v != "x" && v != "y") bad_value(k, v, "x or y");
             s.orientation = std::string(v);
         }},
        {"init.width", [](Config&, Staging& s, const std::string& k, std::string_view v) { s.width = parse_real(k, v); }},
        {"init.position", [](Config&, Staging& s, const std::string& k, std::string_view v) { s.position = parse_real(k, v); }},
        {"init.center_x", [](Config&, Staging& s, const std::string& k, std::string_view v) { s.center_x = parse_real(k, v); }},
        {"init.center_y", [](Config&, Staging& s, const std::string& k, std::string_view v) { s.center_y = parse_real(k, v); }},
        {"init.radius", [](Config&, Staging& s, const std::string& k, std::string_view v) { s.radius = parse_real(k, v); }},
        {"init.velocity", [](Config&, Staging& s, const std::string& k, std::string_view v) {
             if (v != "zero" && v != "shear") bad_value(k, v, "zero or shear");
             s.velocity = std::string(v);
         }},
        {"init.velocity_magnitude", [](Config&, Staging& s, const std::string& k, std::string_view v) {
             s.velocity_magnitude = parse_real(k, v);
         }},
        {"solver.newton_tol", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.run.ch.newton_tol = parse_real(k, v); }},
        {"solver.newton_max", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.run.ch.newton_max = parse_int(k, v); }},
        {"solver.linear_tol", [](Config& c, Staging&, const std::string& k, std::string_view v) {
             c.run.ch.linear_tol = parse_real(k, v);
             c.run.momentum.linear_tol = std::min(c.run.ch.linear_tol, 1e-12);
         }},
        {"solver.alpha", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.run.ch.alpha = parse_real(k, v); }},
        {"solver.strict_energy", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.run.strict_energy = parse_bool(k, v); }},
        {"solver.energy_tol", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.run.energy_tol = parse_real(k, v); }},
        {"solver.freeze_velocity", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.run.freeze_velocity = parse_bool(k, v); }},
        {"solver.scheme", [](Config& c, Staging&, const std::string& k, std::string_view v) {
             if (v == "convex_splitting") {
                 c.run.ch.scheme = CHScheme::ConvexSplitting;
             } else if (v == "discrete_gradient") {
                 c.run.ch.scheme = CHScheme::DiscreteGradient;
             } else {
                 bad_value(k, v, "convex_splitting or discrete_gradient");
             }
         }},
        {"solver.linear", [](Config& c, Staging&, const std::string& k, std::string_view v) {
             if (v == "auto") {
                 c.run.ch.linear_solver = LinearSolver::Auto;
             } else if (v == "krylov") {
                 c.run.ch.linear_solver = LinearSolver::Krylov;
             } else if (v == "direct") {
                 c.run.ch.linear_solver = LinearSolver::Direct;
             } else {
                 bad_value(k, v, "auto, krylov or direct");
             }
         }},
        {"obstacle.k_list", [](Config& c, Staging&, const std::string& k, std::string_view v) {
             c.k_list = parse_list<int>(k, v, [](const std::string& kk, std::string_view p) { return parse_int(kk, p); });
         }},
        {"obstacle.horizon", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.obstacle_horizon = parse_real(k, v); }},
        {"weakstrong.epsilon", [](Config& c, Staging&, const std::string& k, std::string_view v) {
             c.weakstrong_epsilon =
                 parse_list<double>(k, v, [](const std::string& kk, std::string_view p) { return parse_real(kk, p); });
         }},
        {"weakstrong.seed", [](Config& c, Staging&, const std::string& k, std::string_view v) {
             c.weakstrong_seed = parse_number<std::uint64_t>(k, v, "a non-negative integer");
         }},
        {"stationary.snapshot", [](Config& c, Staging&, const std::string&, std::string_view v) { c.stationary_snapshot = std::string(v); }},
        {"stationary.tol", [](Config& c, Staging&, const std::string& k, std::string_view v) { c.stationary_tol = parse_real(k, v); }},
    };
    return table;
}

void finish(Config& cfg, const Staging& s) {
    try {
        cfg.run.grid = Grid(s.nx, s.ny, s.lx, s.ly);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("grid.nx/grid.ny/domain.Lx/domain.Ly: ") + e.what());
    }
    if (s.potential == "flory_huggins") {
        cfg.params.potential = FloryHuggins{s.theta, s.theta0};
    } else {
        cfg.params.potential = DoubleObstacle{s.theta0, s.c};
    }

    if (!(std::abs(s.mean) < 1.0)) throw ConfigError("init.mean must satisfy |mean| < 1");
    if (s.init_kind == "constant") {
        cfg.run.init.phase = ConstantPhase{s.mean};
    } else if (s.init_kind == "seeded") {
        cfg.run.init.phase = SeededPerturbation{s.mean, s.amplitude, s.seed, s.modes};
    } else if (s.init_kind == "tanh") {
        TanhInterface t{s.orientation == "x" ? Axis::X : Axis::Y, s.width, s.position};
        if (s.have_amplitude) t.amplitude = s.amplitude;
        cfg.run.init.phase = t;
    } else {
        Bubble b{s.center_x, s.center_y, s.radius, s.width};
        if (s.have_amplitude) b.amplitude = s.amplitude;
        cfg.run.init.phase = b;
    }
    if (s.velocity == "shear") {
        cfg.run.init.velocity = ShearLayer{s.velocity_magnitude};
    } else {
        cfg.run.init.velocity = ZeroVelocity{};
    }
    cfg.run.ch.dt = cfg.run.dt;
    cfg.run.momentum.dt = cfg.run.dt;
}

}  // namespace

ConfigEntries parse_entries(std::string_view text) {
    ConfigEntries out;
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                              std::string(line) + "'");
        }
        out.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
    }
    return out;
}

ConfigEntries read_entries(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_entries(ss.str());
}

std::pair<std::string, std::string> parse_override(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(text) + "' must look like key=value");
    return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

Config build_config(const ConfigEntries& entries, const ConfigEntries& overrides, bool require_time) {
    Config cfg;
    Staging staging;
    std::set<std::string> seen;
    const auto& table = setters();
    auto apply = [&](const std::string& key, const std::string& value) {
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError("unknown configuration key: " + key);
        it->second(cfg, staging, key, value);
    };
    for (const auto& [key, value] : entries) {
        if (!seen.insert(key).second) throw ConfigError("duplicate configuration key: " + key);
        apply(key, value);
    }
    for (const auto& [key, value] : overrides) {
        seen.insert(key);
        apply(key, value);
    }
    if (require_time) {
        for (const char* key : {"time.dt", "time.t_end"}) {
            if (!seen.count(key)) throw ConfigError(std::string("missing required key: ") + key);
        }
    }
    finish(cfg, staging);
    return cfg;
}

void apply_environment(Config& cfg) {
    if (const char* dir = std::getenv("NSCH_OUTPUT_DIR"); dir && *dir) cfg.output_dir = dir;
}

std::vector<std::string> known_keys() {
    std::vector<std::string> keys;
    for (const auto& [key, _] : setters()) keys.push_back(key);
    return keys;
}

}  // namespace nsch
