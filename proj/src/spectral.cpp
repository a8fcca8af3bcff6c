#include "coastal/spectral.hpp"

#include "coastal/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>

namespace coastal {

namespace {

// FFTW plans are created once per grid shape.  The planner is not
// thread-safe, so creation is serialized; execution goes through the
// new-array interface, which is safe to call concurrently.  Plans are made
// with FFTW_ESTIMATE (deterministic algorithm choice) and FFTW_UNALIGNED so
// any std::vector buffer can be passed at execution time.
struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;

    PlanPair() = default;
    PlanPair(const PlanPair&) = delete;
    PlanPair& operator=(const PlanPair&) = delete;
    ~PlanPair() {
        if (forward) fftw_destroy_plan(forward);
        if (inverse) fftw_destroy_plan(inverse);
    }
};

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

const PlanPair& plans_for(int nx, int ny) {
    static std::map<std::pair<int, int>, std::unique_ptr<PlanPair>> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto& slot = cache[{nx, ny}];
    if (!slot) {
        auto plans = std::make_unique<PlanPair>();
        const std::size_t n = static_cast<std::size_t>(nx) * ny;
        const std::size_t nc = static_cast<std::size_t>(ny) * (nx / 2 + 1);
        std::vector<double> real(n);
        std::vector<std::complex<double>> cplx(nc);
        auto* c = reinterpret_cast<fftw_complex*>(cplx.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        plans->forward = fftw_plan_dft_r2c_2d(ny, nx, real.data(), c, flags);
        plans->inverse = fftw_plan_dft_c2r_2d(ny, nx, c, real.data(), flags);
        if (!plans->forward || !plans->inverse) {
            throw NumericError("FFTW failed to create plans for " + std::to_string(nx) + "x" +
                               std::to_string(ny));
        }
        slot = std::move(plans);
    }
    return *slot;
}

void require_finite(const ScalarField& f, const char* where) {
    if (!f.all_finite()) {
        throw NumericError(std::string(where) + ": field contains non-finite values");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// TorusGrid / fields

TorusGrid::TorusGrid(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
    if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0) {
        throw DomainError("TorusGrid: nx and ny must be even and >= 8 (got " + std::to_string(nx) +
                          "x" + std::to_string(ny) + ")");
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
        throw DomainError("TorusGrid: periods must be positive and finite");
    }
}

ScalarField::ScalarField(const TorusGrid& grid, double value) : grid_(grid), values_(grid.size(), value) {}

ScalarField::ScalarField(const TorusGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw DomainError("ScalarField: value count does not match grid size");
    }
}

ScalarField ScalarField::from_function(const TorusGrid& grid,
                                       const std::function<double(double, double)>& f) {
    ScalarField out(grid);
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.nx(); ++i) {
            out.at(i, j) = f(grid.x(i), grid.y(j));
        }
    }
    return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "ScalarField::operator+=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "ScalarField::operator-=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double a) noexcept {
    for (double& v : values_) v *= a;
    return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "ScalarField::axpy");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * other.values_[k];
    return *this;
}

double ScalarField::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool ScalarField::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double a, ScalarField f) { return f *= a; }

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "pointwise product");
    ScalarField out(a.grid());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = a[k] * b[k];
    return out;
}

VectorField::VectorField(ScalarField x_, ScalarField y_) : x(std::move(x_)), y(std::move(y_)) {
    require_same_grid(x.grid(), y.grid(), "VectorField");
}

void require_same_grid(const TorusGrid& a, const TorusGrid& b, const char* where) {
    if (!(a == b)) {
        throw DomainError(std::string(where) + ": grid mismatch");
    }
}

// ---------------------------------------------------------------------------
// Spectrum

Spectrum::Spectrum(const ScalarField& f)
    : grid_(f.grid()), modes_(static_cast<std::size_t>(f.grid().ny()) * (f.grid().nx() / 2 + 1)) {
    const PlanPair& plans = plans_for(grid_.nx(), grid_.ny());
    // r2c does not modify its input, but the FFTW signature is non-const.
    std::vector<double> in(f.values().begin(), f.values().end());
    fftw_execute_dft_r2c(plans.forward, in.data(), reinterpret_cast<fftw_complex*>(modes_.data()));
}

Spectrum::Spectrum(const TorusGrid& grid, std::vector<std::complex<double>> modes)
    : grid_(grid), modes_(std::move(modes)) {
    if (modes_.size() != static_cast<std::size_t>(grid_.ny()) * (grid_.nx() / 2 + 1)) {
        throw DomainError("Spectrum: mode count does not match grid");
    }
}

ScalarField Spectrum::to_field() const {
    const PlanPair& plans = plans_for(grid_.nx(), grid_.ny());
    std::vector<std::complex<double>> scratch(modes_);  // c2r overwrites its input
    std::vector<double> out(grid_.size());
    fftw_execute_dft_c2r(plans.inverse, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
    const double inv_n = 1.0 / static_cast<double>(grid_.size());
    for (double& v : out) v *= inv_n;
    return ScalarField(grid_, std::move(out));
}

Spectrum Spectrum::ddx() const {
    Spectrum out(*this);
    const int nyq = grid_.nx() / 2;
    for (int j = 0; j < grid_.ny(); ++j) {
        for (int i = 0; i < cols(); ++i) {
            const double k = (i == nyq) ? 0.0 : grid_.kx(i);
            out.mode(i, j) *= std::complex<double>(0.0, k);
        }
    }
    return out;
}

Spectrum Spectrum::ddy() const {
    Spectrum out(*this);
    const int nyq = grid_.ny() / 2;
    for (int j = 0; j < grid_.ny(); ++j) {
        const double k = (j == nyq) ? 0.0 : grid_.ky(ymode(j));
        for (int i = 0; i < cols(); ++i) {
            out.mode(i, j) *= std::complex<double>(0.0, k);
        }
    }
    return out;
}

Spectrum Spectrum::laplacian() const {
    return apply([](double kx, double ky) { return -(kx * kx + ky * ky); });
}

Spectrum Spectrum::apply(const std::function<double(double, double)>& symbol) const {
    Spectrum out(*this);
    for (int j = 0; j < grid_.ny(); ++j) {
        const double ky = grid_.ky(ymode(j));
        for (int i = 0; i < cols(); ++i) {
            out.mode(i, j) *= symbol(grid_.kx(i), ky);
        }
    }
    return out;
}

void Spectrum::dealias() {
    for (int j = 0; j < grid_.ny(); ++j) {
        const bool cut_y = 3 * std::abs(ymode(j)) > grid_.ny();
        for (int i = 0; i < cols(); ++i) {
            if (cut_y || 3 * i > grid_.nx()) mode(i, j) = 0.0;
        }
    }
}

// ---------------------------------------------------------------------------
// Field operators

ScalarField ddx(const ScalarField& f) {
    require_finite(f, "ddx");
    return Spectrum(f).ddx().to_field();
}

ScalarField ddy(const ScalarField& f) {
    require_finite(f, "ddy");
    return Spectrum(f).ddy().to_field();
}

VectorField gradient(const ScalarField& f) {
    require_finite(f, "gradient");
    const Spectrum s(f);
    return VectorField(s.ddx().to_field(), s.ddy().to_field());
}

ScalarField divergence(const VectorField& v) { return ddx(v.x) + ddy(v.y); }

ScalarField curl(const VectorField& v) { return ddx(v.y) - ddy(v.x); }

ScalarField laplacian(const ScalarField& f) {
    require_finite(f, "laplacian");
    return Spectrum(f).laplacian().to_field();
}

ScalarField helmholtz_apply(const ScalarField& f) {
    require_finite(f, "helmholtz_apply");
    return Spectrum(f).apply([](double kx, double ky) { return 1.0 + kx * kx + ky * ky; }).to_field();
}

ScalarField helmholtz_inverse(const ScalarField& q) {
    require_finite(q, "helmholtz_inverse");
    return Spectrum(q).apply([](double kx, double ky) { return 1.0 / (1.0 + kx * kx + ky * ky); }).to_field();
}

ScalarField dealias(const ScalarField& f) {
    Spectrum s(f);
    s.dealias();
    return s.to_field();
}

double sobolev_norm(const ScalarField& f, double s) {
    if (s < 0.0) throw DomainError("sobolev_norm: index must be >= 0");
    const Spectrum spec(f);
    const TorusGrid& g = f.grid();
    const int nyq = g.nx() / 2;
    double sum = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        const double ky = g.ky(spec.ymode(j));
        for (int i = 0; i < spec.cols(); ++i) {
            const double kx = g.kx(i);
            // Columns 1..nx/2-1 stand for themselves and their conjugate twins.
            const double w = (i == 0 || i == nyq) ? 1.0 : 2.0;
            sum += w * std::pow(1.0 + kx * kx + ky * ky, s) * std::norm(spec.mode(i, j));
        }
    }
    const double n = static_cast<double>(g.size());
    return std::sqrt(sum * g.lx() * g.ly() / (n * n));
}

double sobolev_norm(std::span<const ScalarField> components, double s) {
    double sum = 0.0;
    for (const auto& c : components) {
        const double v = sobolev_norm(c, s);
        sum += v * v;
    }
    return std::sqrt(sum);
}

double grid_inner(const ScalarField& f, const ScalarField& g) {
    require_same_grid(f.grid(), g.grid(), "grid_inner");
    double sum = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) sum += f[k] * g[k];
    return sum * f.grid().cell_area();
}

double l2_norm(const ScalarField& f) { return std::sqrt(grid_inner(f, f)); }

double pairing(std::span<const Snapshot> trajectory, const TestFunctionSampler& psi) {
    if (trajectory.empty()) return 0.0;
    const TorusGrid& grid = trajectory.front().components.at(0).grid();
    std::vector<double> integrand;
    integrand.reserve(trajectory.size());
    for (const Snapshot& snap : trajectory) {
        const std::vector<ScalarField> test = psi(grid, snap.time);
        if (test.size() != snap.components.size()) {
            throw DomainError("pairing: test function and trajectory have different component counts");
        }
        double value = 0.0;
        for (std::size_t c = 0; c < test.size(); ++c) {
            require_same_grid(snap.components[c].grid(), test[c].grid(), "pairing");
            value += grid_inner(snap.components[c], test[c]);
        }
        integrand.push_back(value);
    }
    double total = 0.0;
    for (std::size_t k = 1; k < trajectory.size(); ++k) {
        const double dt = trajectory[k].time - trajectory[k - 1].time;
        total += 0.5 * dt * (integrand[k] + integrand[k - 1]);
    }
    return total;
}

}  // namespace coastal
