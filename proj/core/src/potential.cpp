#include "nsch/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace nsch {

namespace {

void require_interior(double s, const char* who) {
    if (!(std::abs(s) < 1.0)) {
        throw std::domain_error(std::string(who) + ": argument outside (-1,1): " + std::to_string(s));
    }
}

// log1p(x)/x with the removable singularity at 0.
double log1p_over_x(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - 0.5 * x + x * x / 3.0;
    return std::log1p(x) / x;
}

// Secant of G(s) = (1+s) log(1+s):
// (G(a) - G(b)) / (a - b) = log(1+a) + log1p(x)/x, x = (a-b)/(1+b).
double g_secant(double a, double b) {
    return std::log1p(a) + log1p_over_x((a - b) / (1.0 + b));
}

}  // namespace

double theta0_of(const PotentialKind& kind) {
    return std::visit([](const auto& p) { return p.theta0; }, kind);
}

bool is_obstacle(const PotentialKind& kind) {
    return std::holds_alternative<DoubleObstacle>(kind);
}

void validate(const PotentialKind& kind) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (const auto* fh = std::get_if<FloryHuggins>(&kind)) {
        if (!positive(fh->theta) || !positive(fh->theta0)) {
            throw std::invalid_argument("Flory-Huggins potential needs theta > 0 and theta0 > 0");
        }
    } else {
        const auto& dob = std::get<DoubleObstacle>(kind);
        if (!positive(dob.theta0) || !positive(dob.c)) {
            throw std::invalid_argument("double obstacle potential needs theta0 > 0 and c > 0");
        }
    }
}

double F_value(double s, double theta) {
    require_interior(s, "F_value");
    return 0.5 * theta * ((1.0 + s) * std::log1p(s) + (1.0 - s) * std::log1p(-s));
}

double F_prime(double s, double theta) {
    require_interior(s, "F_prime");
    return theta * std::atanh(s);
}

double F_second(double s, double theta) {
    require_interior(s, "F_second");
    return theta / ((1.0 - s) * (1.0 + s));
}

double F_secant(double a, double b, double theta) {
    require_interior(a, "F_secant");
    require_interior(b, "F_secant");
    if (a == b) return F_prime(a, theta);
    return 0.5 * theta * (g_secant(a, b) - g_secant(-a, -b));
}

double F_secant_da(double a, double b, double theta) {
    const double d = a - b;
    if (std::abs(d) < 1e-5) {
        // Taylor expansion about b: S = F'(b) + F''(b) d/2 + F'''(b) d^2/6 + ...
        const double f2 = F_second(b, theta);
        const double f3 = 2.0 * theta * b / std::pow((1.0 - b) * (1.0 + b), 2);
        return 0.5 * f2 + f3 * d / 3.0;
    }
    return (F_prime(a, theta) - F_secant(a, b, theta)) / d;
}

double psi_value(double s, const FloryHuggins& p) { return F_value(s, p.theta) - 0.5 * p.theta0 * s * s; }
double psi_prime(double s, const FloryHuggins& p) { return F_prime(s, p.theta) - p.theta0 * s; }
double psi_second(double s, const FloryHuggins& p) { return F_second(s, p.theta) - p.theta0; }

double psi_value(double s, const DoubleObstacle& p) {
    if (std::abs(s) > 1.0) return std::numeric_limits<double>::infinity();
    return -0.5 * p.theta0 * s * s;
}

double psi_value(double s, const PotentialKind& kind) {
    return std::visit([s](const auto& p) { return psi_value(s, p); }, kind);
}

double psi_prime_positive_root(const FloryHuggins& p) {
    if (!(p.theta0 > p.theta)) {
        throw std::domain_error("psi_prime_positive_root: needs theta0 > theta (spinodal regime)");
    }
    // Psi' < 0 just right of 0 (Psi''(0) = theta - theta0 < 0) and Psi' -> +inf at 1.
    double lo = 0.0;
    double hi = std::nextafter(1.0, 0.0);
    for (int it = 0; it < 200 && std::nextafter(lo, hi) < hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f = mid == 0.0 ? -1.0 : psi_prime(mid, p);
        if (f < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::abs(psi_prime(lo, p)) <= std::abs(psi_prime(hi, p)) ? lo : hi;
}

double obstacle_complementarity_residual(double phi, double lambda, double c) {
    return lambda - std::max(0.0, lambda + c * (phi - 1.0)) - std::min(0.0, lambda + c * (phi + 1.0));
}

ScalarField obstacle_complementarity_residual(const ScalarField& phi, const ScalarField& lambda, double c) {
    ScalarField r(phi.grid());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = obstacle_complementarity_residual(phi[k], lambda[k], c);
    return r;
}

}  // namespace nsch
