#pragma once

#include <utility>

#include "nsch/grid.hpp"

namespace nsch {

/// Full solution at one time level. u lives on faces, p/phi/mu at cell centres.
struct State {
    double t = 0.0;
    MACVector u;
    ScalarField p;
    ScalarField phi;
    ScalarField mu;

    explicit State(const Grid& grid) : u(grid), p(grid), phi(grid), mu(grid) {}
    State(double t_, MACVector u_, ScalarField p_, ScalarField phi_, ScalarField mu_)
        : t(t_), u(std::move(u_)), p(std::move(p_)), phi(std::move(phi_)), mu(std::move(mu_)) {}

    const Grid& grid() const { return phi.grid(); }
};

}  // namespace nsch
