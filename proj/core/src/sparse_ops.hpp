#pragma once

// Assembled sparse forms of the grid operators, for direct solves.

#include <Eigen/SparseCore>

#include <vector>

#include "nsch/grid.hpp"

namespace nsch::detail {

using SpMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

/// Appends scale * (-div(coef grad .)) to trip, at block offset (row0, col0).
/// coef == nullptr means unit coefficient.
inline void add_neg_laplacian(const Grid& g, const MACVector* coef, double scale, int row0, int col0,
                              Triplets& trip) {
    const int nx = g.nx();
    const int ny = g.ny();
    const double ihx2 = 1.0 / (g.hx() * g.hx());
    const double ihy2 = 1.0 / (g.hy() * g.hy());
    auto link = [&](int a, int b, double w) {
        trip.emplace_back(row0 + a, col0 + a, scale * w);
        trip.emplace_back(row0 + a, col0 + b, -scale * w);
        trip.emplace_back(row0 + b, col0 + b, scale * w);
        trip.emplace_back(row0 + b, col0 + a, -scale * w);
    };
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            const double c = coef ? coef->ux(i, j) : 1.0;
            link(static_cast<int>(g.cell(i - 1, j)), static_cast<int>(g.cell(i, j)), c * ihx2);
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double c = coef ? coef->uy(i, j) : 1.0;
            link(static_cast<int>(g.cell(i, j - 1)), static_cast<int>(g.cell(i, j)), c * ihy2);
        }
    }
}

inline void add_diagonal(std::span<const double> d, double scale, int row0, int col0, Triplets& trip) {
    for (std::size_t k = 0; k < d.size(); ++k) {
        trip.emplace_back(row0 + static_cast<int>(k), col0 + static_cast<int>(k), scale * d[k]);
    }
}

inline void add_identity(std::size_t n, double scale, int row0, int col0, Triplets& trip) {
    for (std::size_t k = 0; k < n; ++k) {
        trip.emplace_back(row0 + static_cast<int>(k), col0 + static_cast<int>(k), scale);
    }
}

inline SpMat assemble(int rows, int cols, const Triplets& trip) {
    SpMat m(rows, cols);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return m;
}

}  // namespace nsch::detail
