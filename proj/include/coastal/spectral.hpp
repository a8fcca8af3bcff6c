#pragma once

// Periodic-grid numerical kernel: real fields on a doubly periodic box,
// FFT-based derivatives, Helmholtz inversion, 2/3-rule dealiasing, Sobolev
// norms and cell-area weighted grid pairings.
//
// Transform convention: the forward transform is unnormalized and the
// inverse divides by nx*ny.  With this convention the Sobolev norm
//
//     ||f||_s^2 = (Lx*Ly / (nx*ny)^2) * sum_k (1 + |k|^2)^s |f_k|^2
//
// reduces for s = 0 to the L2 norm on the torus, i.e. the cell-area
// weighted grid sum of f^2 (Parseval).

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace coastal {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Doubly periodic box [0, lx) x [0, ly) sampled on an nx x ny node lattice.
class TorusGrid {
public:
    TorusGrid(int nx, int ny, double lx = kTwoPi, double ly = kTwoPi);

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    double lx() const noexcept { return lx_; }
    double ly() const noexcept { return ly_; }
    double hx() const noexcept { return lx_ / nx_; }
    double hy() const noexcept { return ly_ / ny_; }
    double cell_area() const noexcept { return hx() * hy(); }
    std::size_t size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }

    double x(int i) const noexcept { return i * hx(); }
    double y(int j) const noexcept { return j * hy(); }

    /// Row-major node index: rows run along y, columns along x.
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * nx_ + i;
    }

    /// Angular wavenumber of x-mode m and y-mode m (signed mode numbers).
    double kx(int m) const noexcept { return kTwoPi * m / lx_; }
    double ky(int m) const noexcept { return kTwoPi * m / ly_; }

    bool operator==(const TorusGrid&) const = default;

private:
    int nx_;
    int ny_;
    double lx_;
    double ly_;
};

/// Real nodal values on a TorusGrid.
class ScalarField {
public:
    explicit ScalarField(const TorusGrid& grid, double value = 0.0);
    ScalarField(const TorusGrid& grid, std::vector<double> values);

    static ScalarField from_function(const TorusGrid& grid,
                                     const std::function<double(double, double)>& f);

    const TorusGrid& grid() const noexcept { return grid_; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator[](std::size_t k) noexcept { return values_[k]; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }
    double& at(int i, int j) noexcept { return values_[grid_.index(i, j)]; }
    double at(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double a) noexcept;
    /// this += a * other
    ScalarField& axpy(double a, const ScalarField& other);

    double max_abs() const noexcept;
    bool all_finite() const noexcept;

private:
    TorusGrid grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double a, ScalarField f);
/// Pointwise product.
ScalarField operator*(const ScalarField& a, const ScalarField& b);

struct VectorField {
    ScalarField x;
    ScalarField y;

    explicit VectorField(const TorusGrid& grid) : x(grid), y(grid) {}
    VectorField(ScalarField x_, ScalarField y_);

    const TorusGrid& grid() const noexcept { return x.grid(); }
};

/// Throws DomainError unless both grids are identical.
void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where);

/// Half-complex spectrum of a real field (ny rows of nx/2+1 modes).
class Spectrum {
public:
    explicit Spectrum(const ScalarField& f);
    Spectrum(const TorusGrid& grid, std::vector<std::complex<double>> modes);

    const TorusGrid& grid() const noexcept { return grid_; }
    int cols() const noexcept { return grid_.nx() / 2 + 1; }

    std::complex<double>& mode(int i, int j) noexcept { return modes_[static_cast<std::size_t>(j) * cols() + i]; }
    std::complex<double> mode(int i, int j) const noexcept { return modes_[static_cast<std::size_t>(j) * cols() + i]; }

    /// Signed y-mode number of row j.
    int ymode(int j) const noexcept { return j <= grid_.ny() / 2 ? j : j - grid_.ny(); }

    ScalarField to_field() const;

    Spectrum ddx() const;
    Spectrum ddy() const;
    Spectrum laplacian() const;
    /// Multiplies every mode by symbol(kx, ky).
    Spectrum apply(const std::function<double(double, double)>& symbol) const;
    void dealias();

private:
    TorusGrid grid_;
    std::vector<std::complex<double>> modes_;
};

ScalarField ddx(const ScalarField& f);
ScalarField ddy(const ScalarField& f);
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
/// curl v = dv_y/dx - dv_x/dy
ScalarField curl(const VectorField& v);
ScalarField laplacian(const ScalarField& f);

/// Applies (1 - Laplacian).
ScalarField helmholtz_apply(const ScalarField& f);
/// Solves (1 - Laplacian) u = q; the symbol 1 + |k|^2 never vanishes.
ScalarField helmholtz_inverse(const ScalarField& q);

/// Zeroes every mode with 3|mx| > nx or 3|my| > ny.  Idempotent.
ScalarField dealias(const ScalarField& f);

/// Sobolev norm of one field (see the convention at the top of this file).
double sobolev_norm(const ScalarField& f, double s);
/// Sobolev norm of a multi-component field: sqrt of the sum of squares.
double sobolev_norm(std::span<const ScalarField> components, double s);

/// Cell-area weighted grid sum of f*g (exact quadrature for band-limited products).
double grid_inner(const ScalarField& f, const ScalarField& g);
double l2_norm(const ScalarField& f);

/// One multi-component snapshot of a trajectory.
struct Snapshot {
    double time = 0.0;
    std::vector<ScalarField> components;
};

/// Closed-form space-time test function with the same component count as
/// the trajectory it is paired with.
using TestFunctionSampler = std::function<std::vector<ScalarField>(const TorusGrid&, double t)>;

/// Discrete space-time pairing: trapezoidal rule over the (uniformly spaced)
/// snapshot times, cell-area weighted grid sum in space.
double pairing(std::span<const Snapshot> trajectory, const TestFunctionSampler& psi);

}  // namespace coastal
