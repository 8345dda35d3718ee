#pragma once

// Scalar maximal monotone graphs beta = d(beta_hat) with their resolvents,
// Yosida regularizations and Moreau-Yosida envelopes, plus the operators A
// acting on whole fields.

#include "chsmc/errors.hpp"
#include "chsmc/field.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chsmc {

namespace detail {

/// Root of an increasing function on [lo, hi] with g(lo) <= 0 <= g(hi).
/// Newton steps are accepted while they stay inside the shrinking bracket;
/// otherwise the bracket is bisected. Converged when |g| <= tol.
template <class G, class DG>
double solve_increasing(G&& g, DG&& dg, double lo, double hi, double x0, double tol) {
    constexpr int kMaxIterations = 200;
    double x = std::clamp(x0, lo, hi);
    for (int it = 0; it < kMaxIterations; ++it) {
        const double gx = g(x);
        if (std::abs(gx) <= tol) return x;
        if (gx < 0.0) lo = x; else hi = x;
        // Bracket collapsed to neighbouring doubles: nothing left to resolve.
        if (std::nextafter(lo, hi) >= hi) return std::abs(g(lo)) < std::abs(g(hi)) ? lo : hi;
        const double slope = dg(x);
        double next = slope > 0.0 ? x - gx / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    throw NoConvergence("scalar resolvent solve did not converge in 200 iterations");
}

} // namespace detail

enum class GraphKind { none, polynomial, obstacle, logarithmic };

/// Effective domain of a graph as an interval with open or closed ends.
struct Interval {
    double lo;
    double hi;
    bool lo_closed;
    bool hi_closed;

    bool contains(double r) const noexcept {
        return (lo_closed ? r >= lo : r > lo) && (hi_closed ? r <= hi : r < hi);
    }
    bool interior_contains(double r) const noexcept { return r > lo && r < hi; }
};

/// beta = d(beta_hat) for one of the shipped convex potentials:
///   none         beta_hat = 0
///   polynomial   beta_hat(r) = r^4 / 4,            beta(r) = r^3
///   obstacle     beta_hat = indicator of [-1, 1]
///   logarithmic  beta_hat(r) = (1+r)ln(1+r) + (1-r)ln(1-r),  beta(r) = ln((1+r)/(1-r))
class MonotoneGraph {
public:
    explicit MonotoneGraph(GraphKind kind = GraphKind::none) : kind_(kind) {}

    static MonotoneGraph from_name(std::string_view name) {
        if (name == "none") return MonotoneGraph(GraphKind::none);
        if (name == "polynomial") return MonotoneGraph(GraphKind::polynomial);
        if (name == "obstacle") return MonotoneGraph(GraphKind::obstacle);
        if (name == "logarithmic") return MonotoneGraph(GraphKind::logarithmic);
        throw ValidationError("graph", "unknown graph kind '" + std::string(name) + "'");
    }

    GraphKind kind() const noexcept { return kind_; }

    std::string_view name() const noexcept {
        switch (kind_) {
        case GraphKind::none: return "none";
        case GraphKind::polynomial: return "polynomial";
        case GraphKind::obstacle: return "obstacle";
        case GraphKind::logarithmic: return "logarithmic";
        }
        return "none";
    }

    /// D(beta).
    Interval domain() const noexcept {
        constexpr double inf = std::numeric_limits<double>::infinity();
        switch (kind_) {
        case GraphKind::obstacle: return {-1.0, 1.0, true, true};
        case GraphKind::logarithmic: return {-1.0, 1.0, false, false};
        default: return {-inf, inf, false, false};
        }
    }

    /// beta_hat(r); +inf outside D(beta_hat).
    double potential(double r) const noexcept {
        constexpr double inf = std::numeric_limits<double>::infinity();
        switch (kind_) {
        case GraphKind::none: return 0.0;
        case GraphKind::polynomial: return 0.25 * r * r * r * r;
        case GraphKind::obstacle: return std::abs(r) <= 1.0 ? 0.0 : inf;
        case GraphKind::logarithmic: {
            if (std::abs(r) > 1.0) return inf;
            return xlogx(1.0 + r) + xlogx(1.0 - r);
        }
        }
        return 0.0;
    }

    /// beta^0(r), the element of least modulus in beta(r). Requires r in D(beta).
    double minimal_section(double r) const {
        if (!domain().contains(r)) throw std::domain_error("minimal_section: r outside D(beta)");
        switch (kind_) {
        case GraphKind::none: return 0.0;
        case GraphKind::polynomial: return r * r * r;
        case GraphKind::obstacle: return 0.0;
        case GraphKind::logarithmic: return std::log1p(r) - std::log1p(-r);
        }
        return 0.0;
    }

    /// (I + eps beta)^{-1}(r).
    double resolvent(double eps, double r) const {
        check_eps(eps);
        switch (kind_) {
        case GraphKind::none: return r;
        case GraphKind::obstacle: return std::clamp(r, -1.0, 1.0);
        case GraphKind::polynomial: return polynomial_resolvent(eps, r);
        case GraphKind::logarithmic: return r - eps * logarithmic_yosida(eps, r);
        }
        return r;
    }

    /// beta_eps(r) = (r - resolvent(eps, r)) / eps.
    double yosida(double eps, double r) const {
        check_eps(eps);
        switch (kind_) {
        case GraphKind::none: return 0.0;
        case GraphKind::logarithmic: return logarithmic_yosida(eps, r);
        default: return (r - resolvent(eps, r)) / eps;
        }
    }

    /// Moreau-Yosida envelope beta_hat_eps(r) = min_y beta_hat(y) + |r - y|^2 / (2 eps).
    double moreau_envelope(double eps, double r) const {
        check_eps(eps);
        if (kind_ == GraphKind::logarithmic) {
            // r - J r = eps u, and the potential is evaluated through 1 -+ x
            // computed from u to keep precision near the endpoints.
            const double u = logarithmic_yosida(eps, r);
            const double one_minus = u >= 0.0 ? 2.0 / (1.0 + std::exp(u)) : 2.0 - 2.0 / (1.0 + std::exp(-u));
            const double one_plus = 2.0 - one_minus;
            return xlogx(one_plus) + xlogx(one_minus) + 0.5 * eps * u * u;
        }
        const double x = resolvent(eps, r);
        return potential(x) + (r - x) * (r - x) / (2.0 * eps);
    }

private:
    static void check_eps(double eps) {
        if (!(eps > 0.0)) throw std::invalid_argument("graph: eps must be positive");
    }

    static double xlogx(double x) noexcept { return x > 0.0 ? x * std::log(x) : 0.0; }

    // x + eps x^3 = r; the root has the sign of r and |x| <= |r|.
    static double polynomial_resolvent(double eps, double r) {
        if (r == 0.0) return 0.0;
        const double lo = std::min(0.0, r);
        const double hi = std::max(0.0, r);
        const double guess = std::abs(r) > 1.0 / std::sqrt(eps) ? std::cbrt(r / eps) : r;
        return detail::solve_increasing([&](double x) { return x + eps * x * x * x - r; },
                                        [&](double x) { return 1.0 + 3.0 * eps * x * x; },
                                        lo, hi, guess, 1e-12 * (1.0 + std::abs(r)));
    }

    // Parametrizing the resolvent by u = beta(x), x = tanh(u/2), turns
    // x + eps beta(x) = r into tanh(u/2) + eps u = r on the whole line. The
    // root u is the Yosida value itself and lies in [(r-1)/eps, (r+1)/eps].
    static double logarithmic_yosida(double eps, double r) {
        if (r == 0.0) return 0.0;
        const double lo = (r - 1.0) / eps;
        const double hi = (r + 1.0) / eps;
        const double guess = std::abs(r) < 1.0 ? std::log1p(r) - std::log1p(-r) : (r - std::copysign(1.0, r)) / eps;
        return detail::solve_increasing(
            [&](double u) { return std::tanh(0.5 * u) + eps * u - r; },
            [&](double u) {
                const double t = std::tanh(0.5 * u);
                return 0.5 * (1.0 - t * t) + eps;
            },
            lo, hi, guess, 1e-12 * (1.0 + std::abs(r)));
    }

    GraphKind kind_;
};

/// A Lipschitz perturbation pi = pi_hat' of the convex potential, with pi_hat(0) = 0.
struct SmoothPerturbation {
    std::function<double(double)> pi;
    std::function<double(double)> pi_hat;
    double lipschitz_constant = 0.0;

    /// pi(r) = -kappa r, pi_hat(r) = -kappa r^2 / 2. kappa = 1 gives the double well
    /// r^4/4 - r^2/2 when paired with the polynomial graph.
    static SmoothPerturbation linear(double kappa) {
        return {[kappa](double r) { return -kappa * r; },
                [kappa](double r) { return -0.5 * kappa * r * r; },
                std::abs(kappa)};
    }

    static SmoothPerturbation none() { return linear(0.0); }

    struct Check {
        double max_lipschitz_ratio;
        double max_derivative_error;
        bool ok;
    };

    /// Checks the Lipschitz bound on consecutive pairs and pi_hat' = pi by central differences.
    Check verify(std::span<const double> points) const {
        Check c{0.0, 0.0, true};
        for (std::size_t i = 0; i + 1 < points.size(); ++i) {
            const double r = points[i], s = points[i + 1];
            if (r != s) c.max_lipschitz_ratio = std::max(c.max_lipschitz_ratio, std::abs(pi(r) - pi(s)) / std::abs(r - s));
        }
        constexpr double h = 1e-5;
        for (double r : points) {
            const double fd = (pi_hat(r + h) - pi_hat(r - h)) / (2.0 * h);
            c.max_derivative_error = std::max(c.max_derivative_error, std::abs(fd - pi(r)));
        }
        c.ok = c.max_lipschitz_ratio <= lipschitz_constant * (1.0 + 1e-12) && c.max_derivative_error <= 1e-6
               && pi_hat(0.0) == 0.0;
        return c;
    }
};

/// Yosida regularization of the norm subdifferential: v / max(eps, ||v||_H).
inline Field sign_eps(const Field& v, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("sign_eps: eps must be positive");
    return v * (1.0 / std::max(eps, norm_h(v)));
}

enum class OperatorKind { zero, scaled_sign, pointwise };

/// Maximal monotone operator A on H with 0 in A(0).
class HilbertOperator {
public:
    static HilbertOperator zero() { return HilbertOperator(OperatorKind::zero, 0.0, MonotoneGraph(), 0.0); }

    /// rho * Sign, the subdifferential of rho ||.||_H.
    static HilbertOperator scaled_sign(double rho) {
        if (!(rho >= 0.0)) throw ValidationError("rho", "must be non-negative");
        return HilbertOperator(OperatorKind::scaled_sign, rho, MonotoneGraph(), rho);
    }

    /// A graph applied samplewise. growth_constant is the C_A the caller claims.
    static HilbertOperator pointwise(MonotoneGraph graph, double growth_constant) {
        return HilbertOperator(OperatorKind::pointwise, 0.0, graph, growth_constant);
    }

    static HilbertOperator from_name(std::string_view name, double rho, std::string_view graph_name,
                                     double growth_constant) {
        if (name == "zero") return zero();
        if (name == "sign") return scaled_sign(rho);
        if (name == "pointwise") return pointwise(MonotoneGraph::from_name(graph_name), growth_constant);
        throw ValidationError("operator", "unknown operator kind '" + std::string(name) + "'");
    }

    OperatorKind kind() const noexcept { return kind_; }
    double rho() const noexcept { return rho_; }
    double growth_constant() const noexcept { return growth_constant_; }
    const MonotoneGraph& graph() const noexcept { return graph_; }

    std::string_view name() const noexcept {
        switch (kind_) {
        case OperatorKind::zero: return "zero";
        case OperatorKind::scaled_sign: return "sign";
        case OperatorKind::pointwise: return "pointwise";
        }
        return "zero";
    }

    /// A_eps(eta) = (eta - (I + eps A)^{-1} eta) / eps.
    ///
    /// For rho Sign the resolvent is the shrinkage eta (1 - eps rho / ||eta||)_+,
    /// so A_eps(eta) = rho eta / ||eta|| when ||eta|| > rho eps and eta / eps
    /// otherwise, i.e. rho Sign_{rho eps}(eta).
    Field apply_yosida(double eps, const Field& eta) const {
        switch (kind_) {
        case OperatorKind::zero: return Field(eta.grid());
        case OperatorKind::scaled_sign: return rho_ == 0.0 ? Field(eta.grid()) : sign_eps(eta, rho_ * eps) * rho_;
        case OperatorKind::pointwise: return map(eta, [&](double r) { return graph_.yosida(eps, r); });
        }
        return Field(eta.grid());
    }

    /// A^0(eta), the least-norm element of A(eta). Samples outside D(beta) of a
    /// pointwise graph are reported as +inf through the returned norm.
    Field apply_minimal_section(const Field& eta) const {
        switch (kind_) {
        case OperatorKind::zero: return Field(eta.grid());
        case OperatorKind::scaled_sign: {
            const double n = norm_h(eta);
            return n > 0.0 ? eta * (rho_ / n) : Field(eta.grid());
        }
        case OperatorKind::pointwise: {
            std::vector<double> out(eta.size());
            for (std::size_t k = 0; k < eta.size(); ++k) {
                const double r = eta[k];
                out[k] = graph_.domain().contains(r) ? graph_.minimal_section(r) : std::numeric_limits<double>::max();
            }
            return Field(eta.grid(), std::move(out));
        }
        }
        return Field(eta.grid());
    }

    /// (I + s A_eps)^{-1}(eta): the implicit step for the regularized operator.
    Field resolvent_of_yosida(double eps, double s, const Field& eta) const {
        if (!(s >= 0.0)) throw std::invalid_argument("resolvent_of_yosida: step must be non-negative");
        switch (kind_) {
        case OperatorKind::zero: return eta;
        case OperatorKind::scaled_sign: {
            // Radial problem r + s rho r / max(rho eps, r) = R.
            const double big_r = norm_h(eta);
            if (big_r == 0.0 || rho_ == 0.0) return eta;
            const double r = big_r >= rho_ * (eps + s) ? big_r - s * rho_ : big_r * eps / (eps + s);
            return eta * (r / big_r);
        }
        case OperatorKind::pointwise:
            // (I + s beta_eps)^{-1} = eps/(eps+s) I + s/(eps+s) (I + (eps+s) beta)^{-1}
            return map(eta, [&](double r) {
                return (eps * r + s * graph_.resolvent(eps + s, r)) / (eps + s);
            });
        }
        return eta;
    }

private:
    HilbertOperator(OperatorKind kind, double rho, MonotoneGraph graph, double growth_constant)
        : kind_(kind), rho_(rho), graph_(graph), growth_constant_(growth_constant) {}

    OperatorKind kind_;
    double rho_;
    MonotoneGraph graph_;
    double growth_constant_;
};

struct GrowthReport {
    double max_ratio;
    bool pass;
};

/// max over samples of ||A_eps eta|| / (1 + ||eta||), compared with C_A.
/// eps = 0 evaluates the unregularized minimal section A^0.
inline GrowthReport check_linear_growth(const HilbertOperator& op, double eps, std::span<const Field> samples) {
    if (samples.empty()) throw std::invalid_argument("check_linear_growth: no samples");
    double ratio = 0.0;
    for (const Field& eta : samples) {
        const Field v = eps > 0.0 ? op.apply_yosida(eps, eta) : op.apply_minimal_section(eta);
        ratio = std::max(ratio, norm_h(v) / (1.0 + norm_h(eta)));
    }
    return {ratio, ratio <= op.growth_constant() * (1.0 + 1e-12)};
}

} // namespace chsmc
