#pragma once

// Uniform cell-centered grids on rectangles, sampled fields, and the
// cosine-spectral calculus that diagonalizes the Neumann Laplacian.
//
// A field u sampled at x_i = (i + 1/2) h is represented spectrally by the
// amplitudes c_j of its cosine interpolant
//
//     u(x) = sum_j c_j cos(pi j x / L)            (tensorized in 2D),
//
// so every mode is an eigenfunction of -Laplace with homogeneous Neumann
// conditions and eigenvalue lambda_j = (pi j / L)^2.

#include "chsmc/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

namespace chsmc {

class Grid {
public:
    /// One-dimensional grid of n cells on [0, length].
    Grid(std::size_t n, double length) : Grid(1, {n, 1}, {length, 1.0}) {}

    /// Two-dimensional grid on [0, lx] x [0, ly].
    Grid(std::size_t nx, std::size_t ny, double lx, double ly) : Grid(2, {nx, ny}, {lx, ly}) {}

    int dims() const noexcept { return dims_; }
    std::size_t n(int axis) const noexcept { return n_[axis]; }
    double length(int axis) const noexcept { return length_[axis]; }
    double spacing(int axis) const noexcept { return length_[axis] / static_cast<double>(n_[axis]); }
    std::size_t size() const noexcept { return n_[0] * n_[1]; }

    double cell_weight() const noexcept { return dims_ == 1 ? spacing(0) : spacing(0) * spacing(1); }
    double volume() const noexcept { return dims_ == 1 ? length_[0] : length_[0] * length_[1]; }
    double max_length() const noexcept { return dims_ == 1 ? length_[0] : std::max(length_[0], length_[1]); }

    /// Cell-center coordinate along an axis.
    double center(int axis, std::size_t i) const noexcept {
        return (static_cast<double>(i) + 0.5) * spacing(axis);
    }

    /// Splits a row-major flat index into (ix, iy). iy is 0 in 1D.
    std::pair<std::size_t, std::size_t> split(std::size_t k) const noexcept {
        return {k / n_[1], k % n_[1]};
    }

    /// Eigenvalue of -Laplace for the cosine mode at flat index k.
    double eigenvalue(std::size_t k) const noexcept {
        const auto [jx, jy] = split(k);
        const double kx = std::numbers::pi * static_cast<double>(jx) / length_[0];
        if (dims_ == 1) return kx * kx;
        const double ky = std::numbers::pi * static_cast<double>(jy) / length_[1];
        return kx * kx + ky * ky;
    }

    /// Integral of the squared cosine mode over the domain.
    double mode_weight(std::size_t k) const noexcept {
        const auto [jx, jy] = split(k);
        double w = volume();
        if (jx != 0) w *= 0.5;
        if (dims_ == 2 && jy != 0) w *= 0.5;
        return w;
    }

    friend bool operator==(const Grid& a, const Grid& b) noexcept {
        return a.dims_ == b.dims_ && a.n_ == b.n_ && a.length_ == b.length_;
    }

private:
    Grid(int dims, std::array<std::size_t, 2> n, std::array<double, 2> length)
        : dims_(dims), n_(n), length_(length) {
        for (int axis = 0; axis < dims_; ++axis) {
            if (n_[axis] < 4) throw ValidationError("grid", "need at least 4 points per axis");
            if (!(length_[axis] > 0.0) || !std::isfinite(length_[axis]))
                throw ValidationError("grid", "length must be positive");
        }
    }

    int dims_;
    std::array<std::size_t, 2> n_;
    std::array<double, 2> length_;
};

/// Real samples at cell centers, row-major (x slowest).
class Field {
public:
    explicit Field(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

    Field(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw std::invalid_argument("Field: sample count does not match grid");
        for (double v : values_)
            if (!std::isfinite(v)) throw std::invalid_argument("Field: non-finite sample");
    }

    static Field constant(Grid grid, double value) {
        Field f(grid);
        std::fill(f.values_.begin(), f.values_.end(), value);
        return f;
    }

    /// Samples fn(x) in 1D or fn(x, y) in 2D at the cell centers.
    template <class Fn>
    static Field sample(Grid grid, Fn&& fn) {
        Field f(grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const auto [ix, iy] = grid.split(k);
            if constexpr (std::is_invocable_r_v<double, Fn, double, double>) {
                f.values_[k] = fn(grid.center(0, ix), grid.dims() == 2 ? grid.center(1, iy) : 0.0);
            } else {
                f.values_[k] = fn(grid.center(0, ix));
            }
        }
        return f;
    }

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t k) const noexcept { return values_[k]; }
    double& operator[](std::size_t k) noexcept { return values_[k]; }

    bool all_finite() const noexcept {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    Field& operator+=(const Field& other) {
        check_same_grid(other);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
        return *this;
    }

    Field& operator-=(const Field& other) {
        check_same_grid(other);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
        return *this;
    }

    Field& operator*=(double s) noexcept {
        for (double& v : values_) v *= s;
        return *this;
    }

    friend Field operator+(Field a, const Field& b) { return a += b; }
    friend Field operator-(Field a, const Field& b) { return a -= b; }
    friend Field operator*(Field a, double s) { return a *= s; }
    friend Field operator*(double s, Field a) { return a *= s; }

private:
    void check_same_grid(const Field& other) const {
        if (!(grid_ == other.grid_)) throw std::invalid_argument("Field: grid mismatch");
    }

    Grid grid_;
    std::vector<double> values_;
};

/// Applies a scalar function samplewise.
template <class Fn>
Field map(const Field& u, Fn&& fn) {
    Field out(u.grid());
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = fn(u[k]);
    return out;
}

/// Cosine amplitudes of a Field, indexed like the Field (mode jx slowest).
struct SpectralField {
    Grid grid;
    std::vector<double> coeffs;
};

namespace detail {

enum class TransformDirection { forward, inverse };

// FFTW planning is not thread-safe; plans are created once per shape under a
// lock and executed concurrently through the new-array interface.
class CosinePlanCache {
public:
    static CosinePlanCache& instance() {
        static CosinePlanCache cache;
        return cache;
    }

    fftw_plan get(const Grid& grid, TransformDirection dir) {
        const Key key{grid.dims(), grid.n(0), grid.n(1), dir};
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        std::vector<double> in(grid.size()), out(grid.size());
        const fftw_r2r_kind kind = dir == TransformDirection::forward ? FFTW_REDFT10 : FFTW_REDFT01;
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        fftw_plan plan = grid.dims() == 1
            ? fftw_plan_r2r_1d(static_cast<int>(grid.n(0)), in.data(), out.data(), kind, flags)
            : fftw_plan_r2r_2d(static_cast<int>(grid.n(0)), static_cast<int>(grid.n(1)), in.data(),
                               out.data(), kind, kind, flags);
        if (plan == nullptr) throw Error("FFTW could not create a cosine transform plan");
        plans_.emplace(key, plan);
        return plan;
    }

    CosinePlanCache(const CosinePlanCache&) = delete;
    CosinePlanCache& operator=(const CosinePlanCache&) = delete;

    ~CosinePlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    CosinePlanCache() = default;

    using Key = std::tuple<int, std::size_t, std::size_t, TransformDirection>;
    std::mutex mutex_;
    std::map<Key, fftw_plan> plans_;
};

// Converts between raw DCT-II output and cosine amplitudes, per axis.
inline double amplitude_scale(const Grid& grid, std::size_t k) {
    const auto [jx, jy] = grid.split(k);
    double s = (jx == 0 ? 0.5 : 1.0) / static_cast<double>(grid.n(0));
    if (grid.dims() == 2) s *= (jy == 0 ? 0.5 : 1.0) / static_cast<double>(grid.n(1));
    return s;
}

inline double synthesis_scale(const Grid& grid, std::size_t k) {
    const auto [jx, jy] = grid.split(k);
    double s = jx == 0 ? 1.0 : 0.5;
    if (grid.dims() == 2) s *= jy == 0 ? 1.0 : 0.5;
    return s;
}

} // namespace detail

inline SpectralField cosine_transform(const Field& u) {
    const Grid& grid = u.grid();
    std::vector<double> in(u.values().begin(), u.values().end());
    SpectralField out{grid, std::vector<double>(grid.size())};
    fftw_execute_r2r(detail::CosinePlanCache::instance().get(grid, detail::TransformDirection::forward),
                     in.data(), out.coeffs.data());
    for (std::size_t k = 0; k < grid.size(); ++k) out.coeffs[k] *= detail::amplitude_scale(grid, k);
    return out;
}

inline Field inverse_cosine_transform(const SpectralField& s) {
    const Grid& grid = s.grid;
    std::vector<double> in(grid.size()), out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) in[k] = s.coeffs[k] * detail::synthesis_scale(grid, k);
    fftw_execute_r2r(detail::CosinePlanCache::instance().get(grid, detail::TransformDirection::inverse),
                     in.data(), out.data());
    return Field(grid, std::move(out));
}

/// Multiplies every cosine mode by symbol(lambda_j).
template <class Symbol>
Field apply_symbol(const Field& u, Symbol&& symbol) {
    SpectralField s = cosine_transform(u);
    for (std::size_t k = 0; k < s.coeffs.size(); ++k) s.coeffs[k] *= symbol(u.grid().eigenvalue(k));
    return inverse_cosine_transform(s);
}

inline double inner_h(const Field& u, const Field& v) {
    if (!(u.grid() == v.grid())) throw std::invalid_argument("inner_h: grid mismatch");
    double sum = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) sum += u[k] * v[k];
    return sum * u.grid().cell_weight();
}

/// Spatial average (1/|Omega|) * integral of u.
inline double mean(const Field& u) {
    double sum = 0.0;
    for (double v : u.values()) sum += v;
    return sum * u.grid().cell_weight() / u.grid().volume();
}

inline double norm_h(const Field& u) { return std::sqrt(inner_h(u, u)); }

/// L2 norm of the gradient of the cosine interpolant.
inline double gradient_norm(const Field& u) {
    const SpectralField s = cosine_transform(u);
    double sum = 0.0;
    for (std::size_t k = 0; k < s.coeffs.size(); ++k)
        sum += u.grid().eigenvalue(k) * s.coeffs[k] * s.coeffs[k] * u.grid().mode_weight(k);
    return std::sqrt(sum);
}

inline double norm_v(const Field& u) {
    const double h = norm_h(u);
    const double g = gradient_norm(u);
    return std::sqrt(h * h + g * g);
}

inline Field laplacian(const Field& u) {
    return apply_symbol(u, [](double lambda) { return -lambda; });
}

/// The operator N: solves -Laplace w = u with Neumann conditions and mean(w) = 0.
/// Throws NonZeroMean unless |mean(u)| <= 1e-10 ||u||_H.
inline Field inv_neumann_laplacian(const Field& u) {
    const double m = mean(u);
    if (std::abs(m) > 1e-10 * norm_h(u))
        throw NonZeroMean("inv_neumann_laplacian: input mean " + std::to_string(m) + " is not zero");
    return apply_symbol(u, [](double lambda) { return lambda > 0.0 ? 1.0 / lambda : 0.0; });
}

/// Dual norm: sqrt(||grad N(u - m(u))||^2 + m(u)^2).
inline double norm_vstar(const Field& u) {
    const SpectralField s = cosine_transform(u);
    const double m = s.coeffs[0];
    double sum = 0.0;
    for (std::size_t k = 1; k < s.coeffs.size(); ++k)
        sum += s.coeffs[k] * s.coeffs[k] * u.grid().mode_weight(k) / u.grid().eigenvalue(k);
    return std::sqrt(sum + m * m);
}

/// Norm on the domain of the Neumann Laplacian: ||u||_H + ||Laplace u||_H.
inline double norm_w(const Field& u) { return norm_h(u) + norm_h(laplacian(u)); }

/// Solves (I - eps Laplace) v = u with Neumann conditions. Mean is preserved exactly.
inline Field helmholtz_smooth(const Field& u, double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("helmholtz_smooth: eps must be non-negative");
    if (eps == 0.0) return u;
    return apply_symbol(u, [eps](double lambda) { return 1.0 / (1.0 + eps * lambda); });
}

} // namespace chsmc
