#pragma once

// Homogeneous free energy densities.
//
//   Flory-Huggins:   Psi(s) = F(s) - theta0/2 s^2,
//                    F(s)   = theta/2 [ (1+s) log(1+s) + (1-s) log(1-s) ],
//   double obstacle: Psi(s) = I_[-1,1](s) - theta0/2 s^2.
//
// F is convex and singular in its derivative at s = +-1; the quadratic part is
// concave. Time steppers treat the two parts separately.

#include <variant>

#include "nsch/grid.hpp"

namespace nsch {

struct FloryHuggins {
    double theta = 1.0;
    double theta0 = 2.0;
};

struct DoubleObstacle {
    double theta0 = 2.0;
    /// Complementarity parameter of the primal-dual active set iteration.
    double c = 100.0;
};

using PotentialKind = std::variant<FloryHuggins, DoubleObstacle>;

double theta0_of(const PotentialKind& kind);
bool is_obstacle(const PotentialKind& kind);
/// Throws std::invalid_argument on non-positive or non-finite parameters.
void validate(const PotentialKind& kind);

// Convex logarithmic part. All throw std::domain_error for |s| >= 1.
double F_value(double s, double theta);
double F_prime(double s, double theta);
double F_second(double s, double theta);

/// (F(a) - F(b)) / (a - b), evaluated without cancellation; F'(a) when a == b.
double F_secant(double a, double b, double theta);
/// d/da of F_secant(a, b).
double F_secant_da(double a, double b, double theta);

double psi_value(double s, const FloryHuggins& p);
double psi_prime(double s, const FloryHuggins& p);
double psi_second(double s, const FloryHuggins& p);

/// Psi for the double obstacle: -theta0/2 s^2 on [-1,1], +inf outside.
double psi_value(double s, const DoubleObstacle& p);

/// Free-energy density for either kind.
double psi_value(double s, const PotentialKind& kind);

/// Positive zero s* of Psi' (the binodal value for a symmetric mixture),
/// found by bisection on (0,1). Requires theta0 > theta.
double psi_prime_positive_root(const FloryHuggins& p);

/// Per-cell residual lambda - max(0, lambda + c(phi-1)) - min(0, lambda + c(phi+1)).
/// Zero exactly where lambda is in the subdifferential of I_[-1,1] at phi.
double obstacle_complementarity_residual(double phi, double lambda, double c);
ScalarField obstacle_complementarity_residual(const ScalarField& phi, const ScalarField& lambda, double c);

struct ObstacleMultiplier {
    ScalarField lambda;
    std::vector<bool> active_low;
    std::vector<bool> active_high;
};

}  // namespace nsch
