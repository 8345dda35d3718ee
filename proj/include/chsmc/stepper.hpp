#pragma once

// Linearly implicit time stepping of the regularized system
//
//   d/dt (theta + ell phi) - Laplace theta + zeta = f
//   d/dt phi - Laplace mu = 0
//   mu = -nu Laplace phi + xi + pi(phi) - gamma theta
//   zeta = A_eps(a theta + b phi - eta*),   xi = beta_eps(phi)
//
// with homogeneous Neumann conditions. Laplacians and gamma theta are
// implicit, beta_eps and pi explicit, so every cosine mode decouples into a
// 2x2 linear solve. zeta is either lagged or applied through the resolvent
// of A_eps in a second substep.

#include "chsmc/errors.hpp"
#include "chsmc/field.hpp"
#include "chsmc/graphs.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace chsmc {

/// Source term f(t), piecewise constant from the left on its sample times.
/// An empty source is identically zero.
class Source {
public:
    Source() = default;

    explicit Source(Field constant) { samples_.emplace_back(0.0, std::move(constant)); }

    /// times must be increasing; the first sample is used before times[0].
    Source(std::vector<double> times, std::vector<Field> fields) {
        if (times.size() != fields.size()) throw std::invalid_argument("Source: times and fields differ in length");
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (i > 0 && !(times[i] > times[i - 1])) throw std::invalid_argument("Source: times must increase");
            samples_.emplace_back(times[i], std::move(fields[i]));
        }
    }

    bool is_zero() const noexcept { return samples_.empty(); }

    Field at(double t, const Grid& grid) const {
        if (samples_.empty()) return Field(grid);
        std::size_t i = 0;
        while (i + 1 < samples_.size() && samples_[i + 1].first <= t) ++i;
        return samples_[i].second;
    }

private:
    std::vector<std::pair<double, Field>> samples_;
};

enum class ZetaTreatment {
    lagged,    ///< zeta = A_eps(eta^n), fully explicit
    resolvent, ///< eta^{n+1} = (I + a tau A_eps)^{-1} eta~ after the linear solve
};

struct ModelParams {
    explicit ModelParams(const Grid& grid) : eta_star(grid) {}

    double ell = 1.0;
    double nu = 1e-2;
    double gamma = 1.0;
    double a = 1.0;
    double b = 1.0;
    double eps_beta = 1e-2;
    double eps_A = 1e-2;
    MonotoneGraph graph{GraphKind::polynomial};
    SmoothPerturbation perturbation = SmoothPerturbation::linear(1.0);
    HilbertOperator A = HilbertOperator::zero();
    Field eta_star;
    Source source;
    double T = 1.0;
    double tau = 1e-3;
    ZetaTreatment zeta_treatment = ZetaTreatment::resolvent;

    const Grid& grid() const noexcept { return eta_star.grid(); }

    void validate() const {
        auto positive = [](const char* name, double v) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(name, "must be positive");
        };
        positive("ell", ell);
        positive("nu", nu);
        positive("gamma", gamma);
        positive("tau", tau);
        if (!std::isfinite(a)) throw ValidationError("a", "must be finite");
        if (!std::isfinite(b)) throw ValidationError("b", "must be finite");
        if (!(T >= tau)) throw ValidationError("T", "must be at least tau");
        if (!(eps_beta > 0.0 && eps_beta <= 1.0)) throw ValidationError("eps_beta", "must lie in (0, 1]");
        if (!(eps_A > 0.0 && eps_A <= 1.0)) throw ValidationError("eps_A", "must lie in (0, 1]");
    }
};

struct SimState {
    double t = 0.0;
    Field theta;
    Field phi;
    Field mu;
    Field xi;
    Field zeta;
    double m0 = 0.0;

    const Grid& grid() const noexcept { return phi.grid(); }
};

/// eta = a theta + b phi - eta*.
inline Field shifted_variable(const Field& theta, const Field& phi, const ModelParams& p) {
    return theta * p.a + phi * p.b - p.eta_star;
}

inline Field shifted_variable(const SimState& s, const ModelParams& p) { return shifted_variable(s.theta, s.phi, p); }

/// mu = -nu Laplace phi + beta_eps(phi) + pi(phi) - gamma theta.
inline Field compute_mu(const Field& theta, const Field& phi, const ModelParams& p) {
    Field mu = laplacian(phi) * (-p.nu);
    for (std::size_t k = 0; k < mu.size(); ++k)
        mu[k] += p.graph.yosida(p.eps_beta, phi[k]) + p.perturbation.pi(phi[k]) - p.gamma * theta[k];
    return mu;
}

inline Field compute_mu(const SimState& s, const ModelParams& p) { return compute_mu(s.theta, s.phi, p); }

namespace detail {

inline SimState assemble_state(double t, Field theta, Field phi, double m0, const ModelParams& p) {
    Field xi = map(phi, [&](double r) { return p.graph.yosida(p.eps_beta, r); });
    Field mu = compute_mu(theta, phi, p);
    Field zeta = p.A.apply_yosida(p.eps_A, shifted_variable(theta, phi, p));
    return SimState{t, std::move(theta), std::move(phi), std::move(mu), std::move(xi), std::move(zeta), m0};
}

} // namespace detail

/// Builds the initial state, optionally smoothing both fields with
/// (I - smooth_eps Laplace)^{-1}. smooth_eps = 0 keeps the data as given.
inline SimState prepare_initial_state(const Field& theta0, const Field& phi0, const ModelParams& p, double smooth_eps) {
    p.validate();
    if (!(theta0.grid() == p.grid()) || !(phi0.grid() == p.grid()))
        throw std::invalid_argument("prepare_initial_state: grid mismatch");
    for (double v : phi0.values())
        if (!std::isfinite(p.graph.potential(v)))
            throw PotentialInfinite("beta_hat(phi0) is infinite at sample value " + std::to_string(v));
    const double m0 = mean(phi0);
    if (!p.graph.domain().interior_contains(m0))
        throw MeanOutsideDomain("initial mean " + std::to_string(m0) + " is outside int(D(beta))");

    Field theta = helmholtz_smooth(theta0, smooth_eps);
    Field phi = helmholtz_smooth(phi0, smooth_eps);
    return detail::assemble_state(0.0, std::move(theta), std::move(phi), m0, p);
}

inline constexpr double kBlowupThreshold = 1e12;

/// Advances the state by one step of length tau.
inline SimState step(const SimState& s, const ModelParams& p) {
    const Grid& grid = s.grid();
    const double tau = p.tau;

    Field nonlinear = s.xi;
    for (std::size_t k = 0; k < nonlinear.size(); ++k) nonlinear[k] += p.perturbation.pi(s.phi[k]);

    Field forcing = p.source.at(s.t, grid);
    if (p.zeta_treatment == ZetaTreatment::lagged || p.a <= 0.0) forcing -= s.zeta;

    const SpectralField theta_hat = cosine_transform(s.theta);
    const SpectralField phi_hat = cosine_transform(s.phi);
    const SpectralField nonlinear_hat = cosine_transform(nonlinear);
    const SpectralField forcing_hat = cosine_transform(forcing);

    SpectralField theta_next{grid, std::vector<double>(grid.size())};
    SpectralField phi_next{grid, std::vector<double>(grid.size())};

    // Per mode:  [ ell            1 + tau lam  ] [phi+  ]   [ theta + ell phi + tau (f - zeta) ]
    //            [ 1 + tau nu lam^2  -tau gamma lam ] [theta+] = [ phi - tau lam N                  ]
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double lam = grid.eigenvalue(k);
        const double a11 = p.ell;
        const double a12 = 1.0 + tau * lam;
        const double a21 = 1.0 + tau * p.nu * lam * lam;
        const double a22 = -tau * p.gamma * lam;
        const double r1 = theta_hat.coeffs[k] + p.ell * phi_hat.coeffs[k] + tau * forcing_hat.coeffs[k];
        const double r2 = phi_hat.coeffs[k] - tau * lam * nonlinear_hat.coeffs[k];
        const double det = a11 * a22 - a12 * a21;
        phi_next.coeffs[k] = (r1 * a22 - a12 * r2) / det;
        theta_next.coeffs[k] = (a11 * r2 - a21 * r1) / det;
    }
    phi_next.coeffs[0] = phi_hat.coeffs[0];

    Field theta = inverse_cosine_transform(theta_next);
    Field phi = inverse_cosine_transform(phi_next);

    if (p.zeta_treatment == ZetaTreatment::resolvent && p.a > 0.0 && p.A.kind() != OperatorKind::zero) {
        // theta+ = theta~ - tau A_eps(eta+) with phi frozen, i.e.
        // eta+ = (I + a tau A_eps)^{-1} eta~.
        const Field eta_tilde = shifted_variable(theta, phi, p);
        const Field eta_next = p.A.resolvent_of_yosida(p.eps_A, p.a * tau, eta_tilde);
        theta += (eta_next - eta_tilde) * (1.0 / p.a);
    }

    for (const Field* f : {&theta, &phi})
        if (!f->all_finite() || f->max_abs() > kBlowupThreshold)
            throw Blowup("state exceeded " + std::to_string(kBlowupThreshold) + " at t = " + std::to_string(s.t + tau)
                         + "; tau is too large for the explicit terms");

    return detail::assemble_state(s.t + tau, std::move(theta), std::move(phi), s.m0, p);
}

/// Called as observer(previous, current, step_index) after every stride-th step
/// and once for the initial state (with previous == current, step_index 0).
using Observer = std::function<void(const SimState& previous, const SimState& current, std::size_t step_index)>;

struct RunResult {
    SimState final_state;
    std::size_t steps;
};

inline std::size_t step_count(double t0, const ModelParams& p) {
    const double remaining = (p.T - t0) / p.tau;
    if (remaining <= 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(remaining - 1e-9));
}

/// Steps until t >= T. Observers only read the states they are handed.
inline RunResult run(const SimState& initial, const ModelParams& p, const std::vector<Observer>& observers,
                     std::size_t stride = 1) {
    p.validate();
    if (stride == 0) stride = 1;
    const std::size_t total = step_count(initial.t, p);
    for (const auto& obs : observers) obs(initial, initial, 0);

    SimState current = initial;
    for (std::size_t n = 1; n <= total; ++n) {
        SimState next = step(current, p);
        next.t = initial.t + static_cast<double>(n) * p.tau;
        if (n % stride == 0 || n == total)
            for (const auto& obs : observers) obs(current, next, n);
        current = std::move(next);
    }
    return {std::move(current), total};
}

} // namespace chsmc
