#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "nsch/grid.hpp"

namespace nsch::detail {

// In-place -div(M grad .) with precomputed face weights M/h^2.
class FluxStencil {
public:
    FluxStencil(const Grid& g, const MACVector* mobility) : g_(g), wx_(g.x_face_count(), 0.0), wy_(g.y_face_count(), 0.0) {
        const double ihx2 = 1.0 / (g.hx() * g.hx());
        const double ihy2 = 1.0 / (g.hy() * g.hy());
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 1; i < g.nx(); ++i) wx_[g.x_face(i, j)] = (mobility ? mobility->ux(i, j) : 1.0) * ihx2;
        }
        for (int j = 1; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) wy_[g.y_face(i, j)] = (mobility ? mobility->uy(i, j) : 1.0) * ihy2;
        }
        double sum = 0.0;
        std::size_t count = 0;
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 1; i < g.nx(); ++i, ++count) sum += mobility ? mobility->ux(i, j) : 1.0;
        }
        for (int j = 1; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i, ++count) sum += mobility ? mobility->uy(i, j) : 1.0;
        }
        mean_mobility_ = count ? sum / static_cast<double>(count) : 1.0;
    }

    void apply(std::span<const double> f, std::span<double> out) const {
        std::fill(out.begin(), out.end(), 0.0);
        const int nx = g_.nx();
        const int ny = g_.ny();
        for (int j = 0; j < ny; ++j) {
            for (int i = 1; i < nx; ++i) {
                const std::size_t a = g_.cell(i - 1, j);
                const std::size_t b = g_.cell(i, j);
                const double d = wx_[g_.x_face(i, j)] * (f[b] - f[a]);
                out[a] -= d;
                out[b] += d;
            }
        }
        for (int j = 1; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const std::size_t a = g_.cell(i, j - 1);
                const std::size_t b = g_.cell(i, j);
                const double d = wy_[g_.y_face(i, j)] * (f[b] - f[a]);
                out[a] -= d;
                out[b] += d;
            }
        }
    }

    double mean_mobility() const { return mean_mobility_; }

private:
    const Grid& g_;
    std::vector<double> wx_;
    std::vector<double> wy_;
    double mean_mobility_ = 1.0;
};

}  // namespace nsch::detail
