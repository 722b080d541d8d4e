#pragma once

// Uniform MAC (marker-and-cell) grid on the rectangle [0,Lx] x [0,Ly].
//
// Scalars live at cell centres (row-major, index j*nx + i). The x-velocity
// lives on vertical faces, (nx+1)*ny values indexed j*(nx+1) + i with face i
// at x = i*hx. The y-velocity lives on horizontal faces, nx*(ny+1) values
// indexed j*nx + i with face j at y = j*hy. Faces on the domain boundary are
// "boundary faces"; no-slip velocities and zero-flux gradients vanish there.
//
// ny == 1 is the 1D mode: every y-face is a boundary face, so all y-derivatives
// vanish identically.

#include <cstddef>
#include <span>
#include <vector>

namespace nsch {

class Grid {
public:
    Grid(int nx, int ny, double lx, double ly);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double hx() const { return lx_ / nx_; }
    double hy() const { return ly_ / ny_; }
    double cell_area() const { return hx() * hy(); }
    double area() const { return lx_ * ly_; }
    bool is_1d() const { return ny_ == 1; }

    std::size_t cell_count() const { return static_cast<std::size_t>(nx_) * ny_; }
    std::size_t x_face_count() const { return static_cast<std::size_t>(nx_ + 1) * ny_; }
    std::size_t y_face_count() const { return static_cast<std::size_t>(nx_) * (ny_ + 1); }

    std::size_t cell(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
    std::size_t x_face(int i, int j) const { return static_cast<std::size_t>(j) * (nx_ + 1) + i; }
    std::size_t y_face(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

    double xc(int i) const { return (i + 0.5) * hx(); }
    double yc(int j) const { return (j + 0.5) * hy(); }

    /// Smallest spacing among the active directions (hy is ignored in 1D).
    double min_spacing() const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int nx_;
    int ny_;
    double lx_;
    double ly_;
};

enum class BoundaryCondition { NeumannZero, NoSlip };

class ScalarField {
public:
    explicit ScalarField(const Grid& grid, double value = 0.0);
    ScalarField(const Grid& grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(int i, int j) { return values_[grid_.cell(i, j)]; }
    double operator()(int i, int j) const { return values_[grid_.cell(i, j)]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);

    double min() const;
    double max() const;
    double max_abs() const;
    bool all_finite() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Face-centred vector field on the MAC grid (velocity, fluxes, gradients).
class MACVector {
public:
    explicit MACVector(const Grid& grid);

    const Grid& grid() const { return grid_; }

    double& ux(int i, int j) { return ux_[grid_.x_face(i, j)]; }
    double ux(int i, int j) const { return ux_[grid_.x_face(i, j)]; }
    double& uy(int i, int j) { return uy_[grid_.y_face(i, j)]; }
    double uy(int i, int j) const { return uy_[grid_.y_face(i, j)]; }

    std::span<double> ux() { return ux_; }
    std::span<const double> ux() const { return ux_; }
    std::span<double> uy() { return uy_; }
    std::span<const double> uy() const { return uy_; }

    /// Number of face values, x-faces first.
    std::size_t size() const { return ux_.size() + uy_.size(); }
    double& operator[](std::size_t k) { return k < ux_.size() ? ux_[k] : uy_[k - ux_.size()]; }
    double operator[](std::size_t k) const { return k < ux_.size() ? ux_[k] : uy_[k - ux_.size()]; }

    bool is_boundary(std::size_t k) const;
    void zero_boundary();
    double boundary_max_abs() const;

    MACVector& operator+=(const MACVector& other);
    MACVector& operator-=(const MACVector& other);
    MACVector& operator*=(double s);

    double max_abs() const;
    bool all_finite() const;

private:
    Grid grid_;
    std::vector<double> ux_;
    std::vector<double> uy_;
};

MACVector operator+(MACVector a, const MACVector& b);
MACVector operator-(MACVector a, const MACVector& b);
MACVector operator*(double s, MACVector a);

// ============================================================================
// Discrete operators
// ============================================================================

/// Face differences of a cell field; boundary faces carry zero (dn f = 0).
MACVector gradient_to_faces(const ScalarField& f);

/// MAC flux difference. Satisfies <grad f, v>_faces = -<f, div v>_cells for
/// every v with zero boundary faces.
ScalarField divergence_mac(const MACVector& v);

/// 5-point (3-point in 1D) Laplacian with reflected ghost cells; equals
/// divergence_mac(gradient_to_faces(f)).
ScalarField laplacian_neumann(const ScalarField& f);

/// -div(coef grad f) with a face coefficient; coef is ignored on boundary faces.
ScalarField weighted_neg_laplacian(const MACVector& coef, const ScalarField& f);

/// Two-point average onto interior faces; boundary faces copy the adjacent cell.
MACVector interpolate_cell_to_face(const ScalarField& f);

/// div(u f_face), the conservative advection term. Equals u . grad f discretely
/// when u is discretely divergence-free.
ScalarField advect_scalar(const MACVector& u, const ScalarField& f);

/// Face-wise product a*b.
MACVector face_product(const MACVector& a, const MACVector& b);

/// Discrete |grad u|^2 integrated over the domain: normal derivatives at cell
/// centres, tangential ones at grid nodes with no-slip ghost reflection.
double velocity_gradient_sq(const MACVector& u);

// Quadrature: every cell and every face carries weight hx*hy.
double inner_cells(const ScalarField& a, const ScalarField& b);
double inner_faces(const MACVector& a, const MACVector& b);
double norm_cells(const ScalarField& a);
double norm_faces(const MACVector& a);
double integral(const ScalarField& a);
double mean(const ScalarField& a);

}  // namespace nsch
