#pragma once

// Randomized property checks over every module, run by `chsmc selftest`.

#include "chsmc/diagnostics.hpp"
#include "chsmc/field.hpp"
#include "chsmc/graphs.hpp"
#include "chsmc/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace chsmc {

struct CheckResult {
    std::string name;
    bool pass;
    double measured;
    double threshold;
};

namespace detail {

inline Field random_field(const Grid& grid, std::mt19937_64& rng, bool zero_mean) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Field f(grid);
    for (double& v : f.values()) v = normal(rng);
    if (zero_mean) {
        const double m = mean(f);
        for (double& v : f.values()) v -= m;
    }
    return f;
}

inline double relative_error(const Field& a, const Field& b) {
    return norm_h(a - b) / std::max(norm_h(b), std::numeric_limits<double>::min());
}

/// Sample points inside the region where the graph is evaluated.
inline double random_point(GraphKind kind, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    switch (kind) {
    case GraphKind::polynomial: return 3.0 * u(rng);
    default: return 2.0 * u(rng);
    }
}

} // namespace detail

struct YosidaCheck {
    double monotone_violation = 0.0;  ///< max of -(b(r)-b(s))(r-s), clipped at 0
    double lipschitz_excess = 0.0;    ///< max of eps |b(r)-b(s)| / |r-s| - 1
    double domination_excess = 0.0;   ///< max of |b_eps| - |b0| on D(beta)
    double nonexpansive_excess = 0.0; ///< max of |J r - J s| / |r - s| - 1
    double envelope_derivative_error = 0.0;

    bool pass() const {
        return monotone_violation <= 0.0 && lipschitz_excess <= 1e-9 && domination_excess <= 1e-12
               && nonexpansive_excess <= 1e-9 && envelope_derivative_error <= 1e-5;
    }
};

/// Pairwise Yosida properties on `pairs` random samples (r, s, eps).
inline YosidaCheck check_yosida_properties(const MonotoneGraph& g, std::size_t pairs, std::mt19937_64& rng) {
    YosidaCheck c;
    std::uniform_real_distribution<double> log_eps(-3.0, 0.0);
    const Interval dom = g.domain();
    for (std::size_t i = 0; i < pairs; ++i) {
        const double eps = std::pow(10.0, log_eps(rng));
        const double r = detail::random_point(g.kind(), rng);
        const double s = detail::random_point(g.kind(), rng);
        const double br = g.yosida(eps, r), bs = g.yosida(eps, s);
        if (r != s) {
            c.monotone_violation = std::max(c.monotone_violation, -(br - bs) * (r - s));
            c.lipschitz_excess = std::max(c.lipschitz_excess, eps * std::abs(br - bs) / std::abs(r - s) - 1.0);
            const double jr = g.resolvent(eps, r), js = g.resolvent(eps, s);
            c.nonexpansive_excess = std::max(c.nonexpansive_excess, std::abs(jr - js) / std::abs(r - s) - 1.0);
        }
        if (dom.contains(r))
            c.domination_excess = std::max(c.domination_excess, std::abs(br) - std::abs(g.minimal_section(r)));
        // Central difference of the envelope, relative to the slope scale.
        const double h = 1e-5 * eps * std::max(1.0, std::abs(r));
        const double fd = (g.moreau_envelope(eps, r + h) - g.moreau_envelope(eps, r - h)) / (2.0 * h);
        c.envelope_derivative_error = std::max(c.envelope_derivative_error, std::abs(fd - br) / std::max(1.0, std::abs(br)));
    }
    return c;
}

inline std::vector<CheckResult> run_selftest(std::uint64_t seed) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);

    {
        double worst = 0.0;
        for (std::size_t n : {16u, 64u, 512u}) {
            const Grid g(n, 1.7);
            const Field u = detail::random_field(g, rng, false);
            worst = std::max(worst, detail::relative_error(inverse_cosine_transform(cosine_transform(u)), u));
        }
        const Grid g2(32, 16, 1.0, 2.0);
        const Field u2 = detail::random_field(g2, rng, false);
        worst = std::max(worst, detail::relative_error(inverse_cosine_transform(cosine_transform(u2)), u2));
        out.push_back({"field: cosine transform round trip", worst <= 1e-12, worst, 1e-12});
    }
    {
        double worst = 0.0, worst_mean = 0.0, worst_sym = 0.0;
        for (std::size_t n : {64u, 128u, 256u}) {
            const Grid g(n, 1.0);
            const Field u = detail::random_field(g, rng, true);
            const Field v = detail::random_field(g, rng, true);
            const Field w = inv_neumann_laplacian(u);
            worst = std::max(worst, detail::relative_error(laplacian(w) * -1.0, u));
            worst_mean = std::max(worst_mean, std::abs(mean(w)));
            const double uv = inner_h(u, inv_neumann_laplacian(v)), vu = inner_h(v, inv_neumann_laplacian(u));
            worst_sym = std::max(worst_sym, std::abs(uv - vu) / std::max(std::abs(uv), 1.0));
        }
        out.push_back({"field: -Laplace N = I on zero-mean fields", worst <= 1e-10, worst, 1e-10});
        out.push_back({"field: mean of N u vanishes", worst_mean <= 1e-13, worst_mean, 1e-13});
        out.push_back({"field: <u, N v> symmetric", worst_sym <= 1e-12, worst_sym, 1e-12});
    }
    {
        const Grid g(64, 2.5);
        const double constant = std::sqrt(1.0 + std::pow(g.max_length() / std::numbers::pi, 2));
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const Field u = detail::random_field(g, rng, true);
            worst = std::max(worst, norm_v(u) / (constant * gradient_norm(u)));
        }
        out.push_back({"field: Poincare bound on zero-mean fields", worst <= 1.0 + 1e-12, worst, 1.0});
    }
    for (GraphKind kind : {GraphKind::polynomial, GraphKind::obstacle, GraphKind::logarithmic}) {
        const MonotoneGraph g(kind);
        const YosidaCheck c = check_yosida_properties(g, 2000, rng);
        out.push_back({"graphs: Yosida properties (" + std::string(g.name()) + ")", c.pass(),
                       std::max({c.monotone_violation, c.lipschitz_excess, c.domination_excess, c.nonexpansive_excess,
                                 c.envelope_derivative_error}),
                       1e-5});
    }
    {
        const Grid g(32, 1.0);
        std::vector<Field> samples;
        for (double amp : {0.0, 0.5, 5.0, 500.0}) samples.push_back(detail::random_field(g, rng, false) * amp);
        const HilbertOperator sign = HilbertOperator::scaled_sign(3.0);
        const GrowthReport r = check_linear_growth(sign, 1e-3, samples);
        out.push_back({"graphs: rho Sign_eps linear growth with C_A = rho", r.pass, r.max_ratio, 3.0});
    }
    {
        const Grid g(64, 1.0);
        ModelParams p(g);
        p.nu = 1e-3;
        p.tau = 1e-4;
        p.T = 0.05;
        const Field phi0 = Field::sample(g, [](double x) { return 0.05 * std::cos(2.0 * std::numbers::pi * x); })
                           + detail::random_field(g, rng, true) * 0.01;
        const Field theta0 = Field::sample(g, [](double x) { return 0.1 * std::cos(std::numbers::pi * x); });
        SimState s = prepare_initial_state(theta0, phi0, p, 0.0);
        double drift = 0.0, increase = 0.0, e = energy(s, p);
        for (std::size_t n = 0; n < step_count(0.0, p); ++n) {
            s = step(s, p);
            drift = std::max(drift, std::abs(mean(s.phi) - s.m0));
            const double e1 = energy(s, p);
            increase = std::max(increase, e1 - e);
            e = e1;
        }
        out.push_back({"stepper: mass conservation", drift <= 1e-12, drift, 1e-12});
        out.push_back({"stepper: energy non-increasing (f = 0, A = 0)", increase <= 1e-8, increase, 1e-8});
    }
    return out;
}

} // namespace chsmc
