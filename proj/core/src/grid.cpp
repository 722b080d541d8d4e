#include "nsch/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nsch {

Grid::Grid(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
    if (nx < 4) {
        throw std::invalid_argument("Grid: nx must be >= 4, got " + std::to_string(nx));
    }
    if (ny < 1) {
        throw std::invalid_argument("Grid: ny must be >= 1, got " + std::to_string(ny));
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
        throw std::invalid_argument("Grid: side lengths must be positive and finite");
    }
}

double Grid::min_spacing() const {
    return is_1d() ? hx() : std::min(hx(), hy());
}

// ============================================================================
// ScalarField
// ============================================================================

ScalarField::ScalarField(const Grid& grid, double value)
    : grid_(grid), values_(grid.cell_count(), value) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.cell_count()) {
        throw std::invalid_argument("ScalarField: value count does not match grid");
    }
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

// ============================================================================
// MACVector
// ============================================================================

MACVector::MACVector(const Grid& grid)
    : grid_(grid), ux_(grid.x_face_count(), 0.0), uy_(grid.y_face_count(), 0.0) {}

bool MACVector::is_boundary(std::size_t k) const {
    if (k < ux_.size()) {
        const int i = static_cast<int>(k % (grid_.nx() + 1));
        return i == 0 || i == grid_.nx();
    }
    const int j = static_cast<int>((k - ux_.size()) / grid_.nx());
    return j == 0 || j == grid_.ny();
}

void MACVector::zero_boundary() {
    const int nx = grid_.nx();
    const int ny = grid_.ny();
    for (int j = 0; j < ny; ++j) {
        ux(0, j) = 0.0;
        ux(nx, j) = 0.0;
    }
    for (int i = 0; i < nx; ++i) {
        uy(i, 0) = 0.0;
        uy(i, ny) = 0.0;
    }
}

double MACVector::boundary_max_abs() const {
    const int nx = grid_.nx();
    const int ny = grid_.ny();
    double m = 0.0;
    for (int j = 0; j < ny; ++j) m = std::max({m, std::abs(ux(0, j)), std::abs(ux(nx, j))});
    for (int i = 0; i < nx; ++i) m = std::max({m, std::abs(uy(i, 0)), std::abs(uy(i, ny))});
    return m;
}

MACVector& MACVector::operator+=(const MACVector& other) {
    for (std::size_t k = 0; k < ux_.size(); ++k) ux_[k] += other.ux_[k];
    for (std::size_t k = 0; k < uy_.size(); ++k) uy_[k] += other.uy_[k];
    return *this;
}

MACVector& MACVector::operator-=(const MACVector& other) {
    for (std::size_t k = 0; k < ux_.size(); ++k) ux_[k] -= other.ux_[k];
    for (std::size_t k = 0; k < uy_.size(); ++k) uy_[k] -= other.uy_[k];
    return *this;
}

MACVector& MACVector::operator*=(double s) {
    for (auto& v : ux_) v *= s;
    for (auto& v : uy_) v *= s;
    return *this;
}

double MACVector::max_abs() const {
    double m = 0.0;
    for (double v : ux_) m = std::max(m, std::abs(v));
    for (double v : uy_) m = std::max(m, std::abs(v));
    return m;
}

bool MACVector::all_finite() const {
    auto finite = [](double v) { return std::isfinite(v); };
    return std::all_of(ux_.begin(), ux_.end(), finite) && std::all_of(uy_.begin(), uy_.end(), finite);
}

MACVector operator+(MACVector a, const MACVector& b) { return a += b; }
MACVector operator-(MACVector a, const MACVector& b) { return a -= b; }
MACVector operator*(double s, MACVector a) { return a *= s; }

// ============================================================================
// Operators
// ============================================================================

MACVector gradient_to_faces(const ScalarField& f) {
    const Grid& g = f.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    const double inv_hx = 1.0 / g.hx();
    const double inv_hy = 1.0 / g.hy();
    MACVector out(g);
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            out.ux(i, j) = (f(i, j) - f(i - 1, j)) * inv_hx;
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            out.uy(i, j) = (f(i, j) - f(i, j - 1)) * inv_hy;
        }
    }
    return out;
}

ScalarField divergence_mac(const MACVector& v) {
    const Grid& g = v.grid();
    const double inv_hx = 1.0 / g.hx();
    const double inv_hy = 1.0 / g.hy();
    ScalarField out(g);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            out(i, j) = (v.ux(i + 1, j) - v.ux(i, j)) * inv_hx + (v.uy(i, j + 1) - v.uy(i, j)) * inv_hy;
        }
    }
    return out;
}

ScalarField laplacian_neumann(const ScalarField& f) {
    return divergence_mac(gradient_to_faces(f));
}

ScalarField weighted_neg_laplacian(const MACVector& coef, const ScalarField& f) {
    MACVector flux = gradient_to_faces(f);
    for (std::size_t k = 0; k < flux.size(); ++k) flux[k] *= coef[k];
    ScalarField out = divergence_mac(flux);
    out *= -1.0;
    return out;
}

MACVector interpolate_cell_to_face(const ScalarField& f) {
    const Grid& g = f.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    MACVector out(g);
    for (int j = 0; j < ny; ++j) {
        out.ux(0, j) = f(0, j);
        for (int i = 1; i < nx; ++i) out.ux(i, j) = 0.5 * (f(i - 1, j) + f(i, j));
        out.ux(nx, j) = f(nx - 1, j);
    }
    for (int i = 0; i < nx; ++i) {
        out.uy(i, 0) = f(i, 0);
        for (int j = 1; j < ny; ++j) out.uy(i, j) = 0.5 * (f(i, j - 1) + f(i, j));
        out.uy(i, ny) = f(i, ny - 1);
    }
    return out;
}

ScalarField advect_scalar(const MACVector& u, const ScalarField& f) {
    return divergence_mac(face_product(u, interpolate_cell_to_face(f)));
}

MACVector face_product(const MACVector& a, const MACVector& b) {
    MACVector out(a.grid());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = a[k] * b[k];
    return out;
}

double velocity_gradient_sq(const MACVector& u) {
    const Grid& g = u.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    const double hx = g.hx();
    const double hy = g.hy();
    double cells = 0.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double exx = (u.ux(i + 1, j) - u.ux(i, j)) / hx;
            const double eyy = (u.uy(i, j + 1) - u.uy(i, j)) / hy;
            cells += exx * exx + eyy * eyy;
        }
    }
    double nodes = 0.0;
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            const double below = j > 0 ? u.ux(i, j - 1) : -u.ux(i, 0);
            const double above = j < ny ? u.ux(i, j) : -u.ux(i, ny - 1);
            const double left = i > 0 ? u.uy(i - 1, j) : -u.uy(0, j);
            const double right = i < nx ? u.uy(i, j) : -u.uy(nx - 1, j);
            const double dy = (above - below) / hy;
            const double dx = (right - left) / hx;
            const double w = ((i == 0 || i == nx) ? 0.5 : 1.0) * ((j == 0 || j == ny) ? 0.5 : 1.0);
            nodes += w * (dx * dx + dy * dy);
        }
    }
    return (cells + nodes) * g.cell_area();
}

double inner_cells(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s * a.grid().cell_area();
}

double inner_faces(const MACVector& a, const MACVector& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s * a.grid().cell_area();
}

double norm_cells(const ScalarField& a) { return std::sqrt(inner_cells(a, a)); }
double norm_faces(const MACVector& a) { return std::sqrt(inner_faces(a, a)); }

double integral(const ScalarField& a) {
    double s = 0.0;
    for (double v : a.values()) s += v;
    return s * a.grid().cell_area();
}

double mean(const ScalarField& a) {
    double s = 0.0;
    for (double v : a.values()) s += v;
    return s / static_cast<double>(a.size());
}

}  // namespace nsch
