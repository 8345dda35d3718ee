#include "chsmc/diagnostics.hpp"
#include "chsmc/stepper.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace chsmc;
using std::numbers::pi;

namespace {

Field noise(const Grid& g, std::uint64_t seed, double amp) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amp, amp);
    Field f(g);
    for (double& v : f.values()) v = u(rng);
    const double m = mean(f);
    for (double& v : f.values()) v -= m;
    return f;
}

double max_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

ModelParams linear_params(const Grid& g) {
    ModelParams p(g);
    p.graph = MonotoneGraph(GraphKind::none);
    p.perturbation = SmoothPerturbation::none();
    p.A = HilbertOperator::zero();
    p.nu = 1e-2;
    p.tau = 1e-3;
    p.T = 0.1;
    return p;
}

} // namespace

TEST(ModelParams, Validation) {
    const Grid g(16, 1.0);
    ModelParams p(g);
    EXPECT_NO_THROW(p.validate());
    p.nu = 0.0;
    EXPECT_THROW(p.validate(), ValidationError);
    p = ModelParams(g);
    p.T = p.tau / 2.0;
    EXPECT_THROW(p.validate(), ValidationError);
    p = ModelParams(g);
    p.eps_A = 1.5;
    EXPECT_THROW(p.validate(), ValidationError);
}

TEST(PrepareInitialState, IdentityWithoutSmoothing) {
    const Grid g(32, 1.0);
    const ModelParams p(g);
    const Field phi0 = Field::sample(g, [](double x) { return 0.2 * std::cos(pi * x) + 0.1; });
    const Field theta0 = Field::constant(g, 0.4);
    const SimState s = prepare_initial_state(theta0, phi0, p, 0.0);
    EXPECT_EQ(s.t, 0.0);
    EXPECT_EQ(max_diff(s.phi, phi0), 0.0);
    EXPECT_EQ(max_diff(s.theta, theta0), 0.0);
    EXPECT_NEAR(s.m0, 0.1, 1e-15);
}

TEST(PrepareInitialState, SmoothsEigenfunction) {
    const Grid g(64, 1.0);
    const ModelParams p(g);
    const Field c = Field::sample(g, [](double x) { return std::cos(pi * x); });
    const SimState s = prepare_initial_state(Field(g), c, p, 1.0);
    EXPECT_LE(max_diff(s.phi, c * (1.0 / (1.0 + pi * pi))), 1e-14);
    EXPECT_NEAR(s.m0, 0.0, 1e-15);
}

TEST(PrepareInitialState, Errors) {
    const Grid g(16, 1.0);
    ModelParams p(g);
    p.graph = MonotoneGraph(GraphKind::obstacle);
    EXPECT_THROW(prepare_initial_state(Field(g), Field::constant(g, 1.5), p, 0.0), PotentialInfinite);
    EXPECT_THROW(prepare_initial_state(Field(g), Field::constant(g, 1.0), p, 0.0), MeanOutsideDomain);
    p.graph = MonotoneGraph(GraphKind::logarithmic);
    EXPECT_THROW(prepare_initial_state(Field(g), Field::constant(g, -1.0), p, 0.0), MeanOutsideDomain);
}

TEST(ComputeMu, Examples) {
    const Grid g(16, 1.0);
    ModelParams p(g);
    EXPECT_EQ(compute_mu(Field(g), Field(g), p).max_abs(), 0.0);
    const Field mu = compute_mu(Field(g), Field::constant(g, 0.6), p);
    const double expected = p.graph.yosida(p.eps_beta, 0.6) - 0.6;
    for (std::size_t k = 0; k < mu.size(); ++k) EXPECT_NEAR(mu[k], expected, 1e-14);
}

TEST(ComputeMu, MatchesFiniteDifferenceEvaluation) {
    const std::size_t n = 32;
    const Grid g(n, 1.0);
    ModelParams p(g);
    const Field phi = Field::sample(g, [](double x) { return 0.4 * std::cos(pi * x) + 0.2 * std::cos(2.0 * pi * x); });
    const Field theta = Field::sample(g, [](double x) { return 0.3 * std::cos(3.0 * pi * x); });
    const Field mu = compute_mu(theta, phi, p);
    const double h = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        // mirrored ghost cells give the homogeneous Neumann condition
        const double left = phi[i == 0 ? 0 : i - 1];
        const double right = phi[i + 1 == n ? n - 1 : i + 1];
        const double lap = (left - 2.0 * phi[i] + right) / (h * h);
        const double r = phi[i];
        const double direct = -p.nu * lap + p.graph.yosida(p.eps_beta, r) - r - p.gamma * theta[i];
        EXPECT_NEAR(mu[i], direct, 1e-3);
    }
}

TEST(Step, HomogeneousEquilibriumIsStationary) {
    const Grid g(32, 1.0);
    ModelParams p(g);
    p.tau = 1e-2;
    const SimState s0 = prepare_initial_state(Field::constant(g, 0.7), Field::constant(g, -0.35), p, 0.0);
    SimState s = s0;
    for (int n = 0; n < 20; ++n) s = step(s, p);
    EXPECT_LE(max_diff(s.phi, s0.phi), 1e-13);
    EXPECT_LE(max_diff(s.theta, s0.theta), 1e-13);
    EXPECT_NEAR(s.t, 0.2, 1e-13);
}

TEST(Step, ConstantSourceFeedsZeroMode) {
    const Grid g(32, 1.0);
    ModelParams p(g);
    p.tau = 1e-2;
    const double c = 3.0;
    p.source = Source(Field::constant(g, c));
    const SimState s = step(prepare_initial_state(Field(g), Field(g), p, 0.0), p);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_NEAR(s.theta[k], p.tau * c, 1e-15);
        EXPECT_NEAR(s.phi[k], 0.0, 1e-15);
    }
}

TEST(Step, LinearRegimeMatchesDenseRecurrence) {
    const Grid g(48, 1.3);
    const ModelParams p = linear_params(g);
    const Field theta0 = noise(g, 1, 1.0) + Field::constant(g, 0.2);
    const Field phi0 = noise(g, 2, 1.0) + Field::constant(g, -0.1);
    SimState s = prepare_initial_state(theta0, phi0, p, 0.0);
    for (int n = 0; n < 100; ++n) s = step(s, p);
    const auto ref = oracle::linear_recurrence(theta0, phi0, p.tau, p.ell, p.nu, p.gamma, 100);
    EXPECT_LE(max_diff(s.theta, ref.theta), 1e-12);
    EXPECT_LE(max_diff(s.phi, ref.phi), 1e-12);
}

TEST(Step, MassConservedOverManySteps) {
    const Grid g(64, 1.0);
    ModelParams p(g);
    p.nu = 1e-3;
    p.tau = 1e-4;
    p.A = HilbertOperator::scaled_sign(2.0);
    p.source = Source(Field::sample(g, [](double x) { return std::cos(3.0 * pi * x); }));
    SimState s = prepare_initial_state(noise(g, 3, 0.1), noise(g, 4, 0.05) + Field::constant(g, 0.1), p, 0.0);
    for (int n = 0; n < 2000; ++n) {
        s = step(s, p);
        ASSERT_LE(std::abs(mean(s.phi) - s.m0), 1e-13 * (1.0 + std::abs(s.m0)));
    }
}

TEST(Step, BlowupIsReported) {
    const Grid g(64, 1.0);
    ModelParams p(g);
    p.graph = MonotoneGraph(GraphKind::polynomial);
    p.eps_beta = 1.0;
    p.perturbation = SmoothPerturbation::linear(-1e6);
    p.tau = 1.0;
    p.T = 200.0;
    SimState s = prepare_initial_state(Field(g), noise(g, 5, 0.5), p, 0.0);
    EXPECT_THROW(
        {
            for (int n = 0; n < 200; ++n) s = step(s, p);
        },
        Blowup);
}

TEST(Step, FirstOrderInTime) {
    const Grid g(64, 1.0);
    ModelParams p(g);
    p.nu = 1e-2;
    p.T = 0.05;
    const Field theta0 = Field::sample(g, [](double x) { return 0.3 * std::cos(pi * x); });
    const Field phi0 = Field::sample(g, [](double x) { return 0.2 * std::cos(2.0 * pi * x) + 0.05 * std::cos(5.0 * pi * x); });
    auto final_phi = [&](double tau) {
        ModelParams q = p;
        q.tau = tau;
        return run(prepare_initial_state(theta0, phi0, q, 0.0), q, {}).final_state.phi;
    };
    const Field u1 = final_phi(1e-3), u2 = final_phi(5e-4), u3 = final_phi(2.5e-4);
    const double d12 = norm_h(u1 - u2), d23 = norm_h(u2 - u3);
    EXPECT_GT(d12 / d23, 1.6);
    EXPECT_LT(d12 / d23, 2.5);
}

TEST(Run, StepCountAndFinalTime) {
    const Grid g(16, 1.0);
    ModelParams p(g);
    p.tau = 0.01;
    p.T = 10 * p.tau;
    const SimState s0 = prepare_initial_state(Field(g), noise(g, 6, 0.1), p, 0.0);
    std::vector<std::size_t> seen;
    const RunResult r = run(s0, p, {[&](const SimState&, const SimState&, std::size_t n) { seen.push_back(n); }}, 3);
    EXPECT_EQ(r.steps, 10u);
    EXPECT_NEAR(r.final_state.t, p.T, 1e-12);
    EXPECT_EQ(seen, (std::vector<std::size_t>{0, 3, 6, 9, 10}));
    const RunResult bare = run(s0, p, {});
    EXPECT_EQ(max_diff(bare.final_state.phi, r.final_state.phi), 0.0);
    EXPECT_EQ(max_diff(bare.final_state.theta, r.final_state.theta), 0.0);
}

TEST(Run, SpinodalCoarsensAndLowersEnergy) {
    const Grid g(128, 1.0);
    ModelParams p(g);
    p.nu = 1e-3;
    p.tau = 1e-4;
    p.T = 0.5;
    const SimState s0 = prepare_initial_state(Field(g), noise(g, 7, 0.05), p, 0.0);
    const SimState s1 = run(s0, p, {}).final_state;
    EXPECT_LT(energy(s1, p), energy(s0, p));
    // separated phases: the profile moved toward the wells at +-1
    EXPECT_GT(s1.phi.max_abs(), 0.5);
    EXPECT_LT(gradient_norm(s1.phi) / norm_h(s1.phi), gradient_norm(s0.phi) / norm_h(s0.phi));
}
