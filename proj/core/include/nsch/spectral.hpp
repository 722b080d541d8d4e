#pragma once

// Cosine-transform diagonalisation of the cell-centred Neumann Laplacian.
//
// The DCT-II basis cos(pi k (i+1/2)/nx) cos(pi l (j+1/2)/ny) are exact
// eigenvectors of -laplacian_neumann with eigenvalues
//   (4/hx^2) sin^2(pi k / (2 nx)) + (4/hy^2) sin^2(pi l / (2 ny)).
// Used to build constant-coefficient preconditioners.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nsch/grid.hpp"

namespace nsch {

class NeumannDct {
public:
    explicit NeumannDct(const Grid& grid);
    ~NeumannDct();
    NeumannDct(const NeumannDct&) = delete;
    NeumannDct& operator=(const NeumannDct&) = delete;

    const Grid& grid() const { return grid_; }

    /// Eigenvalues of -laplacian_neumann, in DCT coefficient order.
    std::span<const double> eigenvalues() const { return eigenvalues_; }

    /// out = V diag(symbol(lambda)) V^T in, where V is the orthonormal DCT basis.
    /// in and out may alias.
    void apply_symbol(std::span<const double> in, std::span<double> out,
                      const std::function<double(double)>& symbol);

    /// Same with the symbol given per coefficient (d[k] = symbol(eigenvalues()[k])).
    void apply_diagonal(std::span<const double> in, std::span<double> out, std::span<const double> d);

private:
    struct Plans;
    Grid grid_;
    std::vector<double> eigenvalues_;
    std::unique_ptr<Plans> plans_;
};

/// Per-thread cached transform for the grid (plans are created once).
NeumannDct& neumann_dct(const Grid& grid);

}  // namespace nsch
