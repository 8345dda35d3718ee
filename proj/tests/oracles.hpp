#pragma once

// Independent reference computations for the test suites. Nothing here calls
// the library's transforms: cosine amplitudes come from direct O(n^2) sums
// over the cell-centred samples and the time recurrence is a dense 2x2
// matrix power per mode.

#include "chsmc/field.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

/// Amplitudes c_j with u(x_i) = sum_j c_j cos(pi j x_i / L) on a 1D grid.
inline std::vector<double> cosine_amplitudes(const chsmc::Field& u) {
    const std::size_t n = u.size();
    std::vector<double> c(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += u[i] * std::cos(std::numbers::pi * static_cast<double>(j) * (static_cast<double>(i) + 0.5)
                                 / static_cast<double>(n));
        c[j] = s / static_cast<double>(n) * (j == 0 ? 1.0 : 2.0);
    }
    return c;
}

inline chsmc::Field synthesize(const chsmc::Grid& g, const std::vector<double>& c) {
    const std::size_t n = g.n(0);
    chsmc::Field u(g);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            s += c[j] * std::cos(std::numbers::pi * static_cast<double>(j) * (static_cast<double>(i) + 0.5)
                                 / static_cast<double>(n));
        u[i] = s;
    }
    return u;
}

using Mat2 = std::array<std::array<double, 2>, 2>;

inline Mat2 mul(const Mat2& x, const Mat2& y) {
    Mat2 z{};
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) z[r][c] = x[r][0] * y[0][c] + x[r][1] * y[1][c];
    return z;
}

inline Mat2 inverse(const Mat2& m) {
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    return {{{m[1][1] / det, -m[0][1] / det}, {-m[1][0] / det, m[0][0] / det}}};
}

/// One step of the linear scheme for (theta, phi) at eigenvalue lam with
/// beta = pi = 0, A = 0, f = 0:
///
///   (1 + tau lam) theta+ + ell phi+            = theta + ell phi
///   -tau gamma lam theta+ + (1 + tau nu lam^2) phi+ = phi
inline Mat2 linear_step_matrix(double lam, double tau, double ell, double nu, double gamma) {
    const Mat2 lhs{{{1.0 + tau * lam, ell}, {-tau * gamma * lam, 1.0 + tau * nu * lam * lam}}};
    const Mat2 rhs{{{1.0, ell}, {0.0, 1.0}}};
    return mul(inverse(lhs), rhs);
}

inline Mat2 power(Mat2 m, unsigned k) {
    Mat2 r{{{1.0, 0.0}, {0.0, 1.0}}};
    while (k > 0) {
        if (k & 1u) r = mul(r, m);
        m = mul(m, m);
        k >>= 1u;
    }
    return r;
}

struct LinearSolution {
    chsmc::Field theta;
    chsmc::Field phi;
};

/// Evolves (theta0, phi0) for `steps` steps of the linear scheme on a 1D grid.
inline LinearSolution linear_recurrence(const chsmc::Field& theta0, const chsmc::Field& phi0, double tau, double ell,
                                        double nu, double gamma, unsigned steps) {
    const chsmc::Grid& g = theta0.grid();
    const std::vector<double> ct = cosine_amplitudes(theta0), cp = cosine_amplitudes(phi0);
    std::vector<double> ot(ct.size()), op(cp.size());
    for (std::size_t j = 0; j < ct.size(); ++j) {
        const double lam = std::pow(std::numbers::pi * static_cast<double>(j) / g.length(0), 2);
        const Mat2 m = power(linear_step_matrix(lam, tau, ell, nu, gamma), steps);
        ot[j] = m[0][0] * ct[j] + m[0][1] * cp[j];
        op[j] = m[1][0] * ct[j] + m[1][1] * cp[j];
    }
    return {synthesize(g, ot), synthesize(g, op)};
}

/// ||grad u||^2 from the directly computed amplitudes: sum_j lam_j c_j^2 L/2.
inline double gradient_norm_sq(const chsmc::Field& u) {
    const std::vector<double> c = cosine_amplitudes(u);
    const double L = u.grid().length(0);
    double s = 0.0;
    for (std::size_t j = 1; j < c.size(); ++j) s += std::pow(std::numbers::pi * static_cast<double>(j) / L, 2) * c[j] * c[j] * 0.5 * L;
    return s;
}

/// Midpoint quadrature of g(u_i) over a 1D grid.
template <class G>
double integrate(const chsmc::Field& u, G g) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += g(u[i]);
    return s * u.grid().length(0) / static_cast<double>(u.size());
}

} // namespace oracle
