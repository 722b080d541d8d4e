#include "nsch/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace nsch {

namespace {
// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct NeumannDct::Plans {
    double* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
    double scale = 1.0;

    ~Plans() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (inverse) fftw_destroy_plan(inverse);
        if (buffer) fftw_free(buffer);
    }
};

NeumannDct::NeumannDct(const Grid& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
    const int nx = grid.nx();
    const int ny = grid.ny();
    const std::size_t n = grid.cell_count();

    eigenvalues_.resize(n);
    const double hx2 = grid.hx() * grid.hx();
    const double hy2 = grid.hy() * grid.hy();
    for (int l = 0; l < ny; ++l) {
        const double sy = std::sin(std::numbers::pi * l / (2.0 * ny));
        for (int k = 0; k < nx; ++k) {
            const double sx = std::sin(std::numbers::pi * k / (2.0 * nx));
            eigenvalues_[grid.cell(k, l)] = 4.0 * sx * sx / hx2 + (grid.is_1d() ? 0.0 : 4.0 * sy * sy / hy2);
        }
    }

    std::lock_guard lock(planner_mutex());
    plans_->buffer = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    if (grid.is_1d()) {
        plans_->forward = fftw_plan_r2r_1d(nx, plans_->buffer, plans_->buffer, FFTW_REDFT10, FFTW_ESTIMATE);
        plans_->inverse = fftw_plan_r2r_1d(nx, plans_->buffer, plans_->buffer, FFTW_REDFT01, FFTW_ESTIMATE);
        plans_->scale = 1.0 / (2.0 * nx);
    } else {
        plans_->forward = fftw_plan_r2r_2d(ny, nx, plans_->buffer, plans_->buffer, FFTW_REDFT10,
                                           FFTW_REDFT10, FFTW_ESTIMATE);
        plans_->inverse = fftw_plan_r2r_2d(ny, nx, plans_->buffer, plans_->buffer, FFTW_REDFT01,
                                           FFTW_REDFT01, FFTW_ESTIMATE);
        plans_->scale = 1.0 / (4.0 * nx * ny);
    }
}

NeumannDct::~NeumannDct() = default;

void NeumannDct::apply_symbol(std::span<const double> in, std::span<double> out,
                              const std::function<double(double)>& symbol) {
    const std::size_t n = eigenvalues_.size();
    double* buf = plans_->buffer;
    for (std::size_t k = 0; k < n; ++k) buf[k] = in[k];
    fftw_execute(plans_->forward);
    for (std::size_t k = 0; k < n; ++k) buf[k] *= symbol(eigenvalues_[k]) * plans_->scale;
    fftw_execute(plans_->inverse);
    for (std::size_t k = 0; k < n; ++k) out[k] = buf[k];
}

void NeumannDct::apply_diagonal(std::span<const double> in, std::span<double> out, std::span<const double> d) {
    const std::size_t n = eigenvalues_.size();
    double* buf = plans_->buffer;
    for (std::size_t k = 0; k < n; ++k) buf[k] = in[k];
    fftw_execute(plans_->forward);
    for (std::size_t k = 0; k < n; ++k) buf[k] *= d[k] * plans_->scale;
    fftw_execute(plans_->inverse);
    for (std::size_t k = 0; k < n; ++k) out[k] = buf[k];
}

NeumannDct& neumann_dct(const Grid& grid) {
    thread_local std::map<std::tuple<int, int, double, double>, std::unique_ptr<NeumannDct>> cache;
    const auto key = std::make_tuple(grid.nx(), grid.ny(), grid.lx(), grid.ly());
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_unique<NeumannDct>(grid)).first;
    }
    return *it->second;
}

}  // namespace nsch
