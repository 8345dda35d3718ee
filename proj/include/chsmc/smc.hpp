#pragma once

// Sliding-mode experiments for the control law A = rho Sign with a = 1 and
// ell = b. The controlled quantity is psi(t) = ||theta + b phi - eta*||_H;
// for rho large enough it reaches zero in finite time and stays there.

#include "chsmc/errors.hpp"
#include "chsmc/field.hpp"
#include "chsmc/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace chsmc {

struct SmcConfig {
    double rho;
    double b;
    double tol_rel = 1e-3;
    ModelParams params;

    /// Pins a = 1, ell = b and A = rho Sign on top of base.
    static SmcConfig make(ModelParams base, double rho, double tol_rel = 1e-3) {
        if (!(rho >= 0.0)) throw ValidationError("rho", "must be non-negative");
        if (!(base.b > 0.0)) throw ValidationError("b", "must be positive for sliding mode");
        base.a = 1.0;
        base.ell = base.b;
        base.A = HilbertOperator::scaled_sign(rho);
        base.validate();
        return SmcConfig{rho, base.b, tol_rel, std::move(base)};
    }
};

struct PsiSample {
    double t;
    double psi;
    double sigma_norm;
};

struct ReachingReport {
    std::vector<PsiSample> psi_series;
    std::optional<double> t_star;
    std::optional<double> bound; ///< 2 psi0 / (rho - a0^2 - 2 b0) when the denominator is positive
    bool monotone_before = true;
    bool stays_after = true;
    bool inequality_holds = true;
    double max_inequality_excess = 0.0;
    double c_hat = 0.0;
    double a0 = 0.0;
    double b0 = 0.0;
    double psi0 = 0.0;
    double tol_abs = 0.0;
    double rho = 0.0;
    double rho_star = 0.0;
};

inline double psi(const SimState& s, const ModelParams& p) { return norm_h(shifted_variable(s, p)); }

/// rho* = c^2 + 2c + (2/T) ||theta0 + b phi0 - eta*||_H.
inline double rho_star(double c_hat, double T, const Field& theta0, const Field& phi0, const Field& eta_star, double b) {
    return c_hat * c_hat + 2.0 * c_hat + 2.0 / T * norm_h(theta0 + phi0 * b - eta_star);
}

/// ||f - b Laplace phi + Laplace eta*||_H, the forcing seen by the sliding variable.
inline double forcing_norm(const SimState& s, const ModelParams& p) {
    Field g = p.source.at(s.t, s.grid()) + laplacian(p.eta_star - s.phi * p.b);
    return norm_h(g);
}

/// max over the trajectory of ||f - b Laplace phi + Laplace eta*|| / (1 + sqrt(rho)).
inline double estimate_c_hat(std::span<const SimState> trajectory, const ModelParams& p, double rho) {
    double g = 0.0;
    for (const SimState& s : trajectory) g = std::max(g, forcing_norm(s, p));
    return g / (1.0 + std::sqrt(std::max(rho, 0.0)));
}

/// Smallest sampled t with psi(s) <= tol_abs for every later sample s.
inline std::optional<double> reaching_time(std::span<const PsiSample> series, double tol_abs) {
    std::optional<double> t_star;
    for (auto it = series.rbegin(); it != series.rend(); ++it) {
        if (it->psi > tol_abs) break;
        t_star = it->t;
    }
    return t_star;
}

/// Runs the controlled system from (theta0, phi0) and checks the reaching
/// behaviour against the differential inequality and the reaching-time bound,
/// both with the constant c_hat measured on this very run.
inline ReachingReport run_smc_experiment(const SmcConfig& cfg, const Field& theta0, const Field& phi0) {
    const ModelParams& p = cfg.params;
    const double tau = p.tau;
    const double rho = cfg.rho;

    std::vector<SimState> trajectory;
    trajectory.reserve(step_count(0.0, p) + 1);
    trajectory.push_back(prepare_initial_state(theta0, phi0, p, 0.0));
    const std::size_t steps = step_count(0.0, p);
    for (std::size_t n = 1; n <= steps; ++n) {
        SimState next = step(trajectory.back(), p);
        next.t = static_cast<double>(n) * tau;
        trajectory.push_back(std::move(next));
    }

    ReachingReport rep;
    rep.rho = rho;
    rep.psi0 = psi(trajectory.front(), p);
    rep.tol_abs = std::max(cfg.tol_rel * std::max(rep.psi0, 1.0), 10.0 * p.eps_A);
    for (const SimState& s : trajectory)
        rep.psi_series.push_back({s.t, psi(s, p), rho > 0.0 ? norm_h(s.zeta) / rho : 0.0});

    rep.c_hat = estimate_c_hat(trajectory, p, rho);
    rep.a0 = rep.b0 = rep.c_hat;
    rep.rho_star = rho_star(rep.c_hat, p.T, trajectory.front().theta, trajectory.front().phi, p.eta_star, cfg.b);
    const double denom = rho - rep.a0 * rep.a0 - 2.0 * rep.b0;
    if (denom > 0.0) rep.bound = 2.0 * rep.psi0 / denom;
    rep.t_star = reaching_time(rep.psi_series, rep.tol_abs);

    const double slack = 10.0 * tau * (1.0 + rho);
    const double rhs = rep.c_hat * (std::sqrt(rho) + 1.0);
    // The sigma acting during step n -> n+1 is the one at n+1 for the
    // resolvent treatment and the one at n for the lagged treatment.
    const bool implicit = p.zeta_treatment == ZetaTreatment::resolvent;
    const auto& series = rep.psi_series;
    for (std::size_t n = 0; n + 1 < series.size(); ++n) {
        const double dpsi = series[n + 1].psi - series[n].psi;
        const double sigma = implicit ? series[n + 1].sigma_norm : series[n].sigma_norm;
        const double excess = dpsi / tau + rho * sigma * sigma - rhs;
        rep.max_inequality_excess = std::max(rep.max_inequality_excess, excess);
        if ((!rep.t_star || series[n + 1].t <= *rep.t_star) && dpsi > slack) rep.monotone_before = false;
    }
    rep.inequality_holds = rep.max_inequality_excess <= slack;
    if (rep.t_star)
        for (const PsiSample& s : series)
            if (s.t >= *rep.t_star && s.psi > rep.tol_abs) rep.stays_after = false;
    return rep;
}

} // namespace chsmc
