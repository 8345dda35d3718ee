#pragma once

#include "chsmc/errors.hpp"
#include "chsmc/field.hpp"
#include "chsmc/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace chsmc {

/// E = gamma/(2 ell) ||theta||^2 + nu/2 ||grad phi||^2 + int (beta_hat_eps(phi) + pi_hat(phi)).
inline double energy(const SimState& s, const ModelParams& p) {
    const double theta_h = norm_h(s.theta);
    const double grad_phi = gradient_norm(s.phi);
    double bulk = 0.0;
    for (double v : s.phi.values()) bulk += p.graph.moreau_envelope(p.eps_beta, v) + p.perturbation.pi_hat(v);
    bulk *= s.grid().cell_weight();
    return 0.5 * p.gamma / p.ell * theta_h * theta_h + 0.5 * p.nu * grad_phi * grad_phi + bulk;
}

struct DiagnosticsRecord {
    double t;
    double mass;
    double energy;
    double theta_h;
    double phi_v;
    double mu_v;
    double xi_h;
    double zeta_h;
    double dphidt_vstar;
    double psi;

    static const char* csv_header() {
        return "t,mass,energy,theta_h,phi_v,mu_v,xi_h,zeta_h,dphidt_vstar,psi";
    }

    void write_csv(std::ostream& os) const {
        const auto old = os.precision(std::numeric_limits<double>::max_digits10);
        os << t << ',' << mass << ',' << energy << ',' << theta_h << ',' << phi_v << ',' << mu_v << ',' << xi_h
           << ',' << zeta_h << ',' << dphidt_vstar << ',' << psi << '\n';
        os.precision(old);
    }
};

/// Monitor row for `current`. The time derivative of phi is the backward
/// difference against `previous`; it is 0 when both states share a time.
inline DiagnosticsRecord record(const SimState& current, const SimState& previous, const ModelParams& p) {
    double dphidt = 0.0;
    if (current.t > previous.t) dphidt = norm_vstar(current.phi - previous.phi) / (current.t - previous.t);
    return DiagnosticsRecord{
        current.t,
        mean(current.phi),
        energy(current, p),
        norm_h(current.theta),
        norm_v(current.phi),
        norm_v(current.mu),
        norm_h(current.xi),
        norm_h(current.zeta),
        dphidt,
        norm_h(shifted_variable(current, p)),
    };
}

/// Initial data and forcing of one trajectory in a continuous-dependence comparison.
struct TrajectoryData {
    Field theta0;
    Field phi0;
    Source source;
    Field eta_star;
};

struct ContDepReport {
    double lhs;
    double rhs;
    double ratio;
};

/// Runs both trajectories with the shared discretization in p (its eta_star
/// and source are replaced per trajectory) and measures both sides of the
/// continuous-dependence estimate. Time norms: max over steps for L-infinity,
/// midpoint rule with step tau for L2.
inline ContDepReport cont_dep_experiment(const TrajectoryData& d1, const TrajectoryData& d2, const ModelParams& p) {
    if (!(p.a > 0.0 && p.b > 0.0)) throw ParamMismatch("continuous dependence needs a, b > 0");
    if (std::abs(p.a * p.ell - p.b) > 1e-12 * std::max(1.0, std::abs(p.b)))
        throw ParamMismatch("continuous dependence needs a * ell = b");
    const double m1 = mean(d1.phi0), m2 = mean(d2.phi0);
    if (std::abs(m1 - m2) > 1e-12 * (1.0 + std::abs(m1))) throw MeanMismatch("initial masses differ");

    ModelParams p1 = p, p2 = p;
    p1.eta_star = d1.eta_star;
    p1.source = d1.source;
    p2.eta_star = d2.eta_star;
    p2.source = d2.source;

    SimState s1 = prepare_initial_state(d1.theta0, d1.phi0, p1, 0.0);
    SimState s2 = prepare_initial_state(d2.theta0, d2.phi0, p2, 0.0);

    const Grid& grid = p.grid();
    const double tau = p.tau;
    const std::size_t steps = step_count(0.0, p);

    double eta_linf = 0.0, eta_l2v = 0.0, phi_linf = 0.0, phi_l2v = 0.0, f_l2 = 0.0;
    Field eta_diff = shifted_variable(s1, p1) - shifted_variable(s2, p2);
    Field phi_diff = s1.phi - s2.phi;
    eta_linf = norm_h(eta_diff);
    phi_linf = norm_vstar(phi_diff);

    for (std::size_t n = 0; n < steps; ++n) {
        const double f_diff = norm_h(p1.source.at(s1.t, grid) - p2.source.at(s2.t, grid));
        f_l2 += tau * f_diff * f_diff;

        s1 = step(s1, p1);
        s2 = step(s2, p2);
        Field eta_next = shifted_variable(s1, p1) - shifted_variable(s2, p2);
        Field phi_next = s1.phi - s2.phi;
        eta_linf = std::max(eta_linf, norm_h(eta_next));
        phi_linf = std::max(phi_linf, norm_vstar(phi_next));
        const double ev = norm_v((eta_diff + eta_next) * 0.5);
        const double pv = norm_v((phi_diff + phi_next) * 0.5);
        eta_l2v += tau * ev * ev;
        phi_l2v += tau * pv * pv;
        eta_diff = std::move(eta_next);
        phi_diff = std::move(phi_next);
    }

    const double lhs = eta_linf + std::sqrt(eta_l2v) + phi_linf + std::sqrt(phi_l2v);
    const Field eta0_1 = shifted_variable(d1.theta0, d1.phi0, p1);
    const Field eta0_2 = shifted_variable(d2.theta0, d2.phi0, p2);
    const double rhs = norm_vstar(d1.phi0 - d2.phi0) + norm_h(eta0_1 - eta0_2) + std::sqrt(f_l2)
                       + norm_w(d1.eta_star - d2.eta_star);
    const double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
    return {lhs, rhs, ratio};
}

} // namespace chsmc
