#include "chsmc/field.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace chsmc;
using std::numbers::pi;

namespace {

Field random_field(const Grid& g, std::mt19937_64& rng, bool zero_mean) {
    std::normal_distribution<double> normal;
    Field f(g);
    for (double& v : f.values()) v = normal(rng);
    if (zero_mean) {
        // Independent of mean(): plain sample average (uniform weights).
        double s = 0.0;
        for (double v : f.values()) s += v;
        s /= static_cast<double>(f.size());
        for (double& v : f.values()) v -= s;
    }
    return f;
}

double max_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

} // namespace

TEST(Grid, RejectsDegenerateShapes) {
    EXPECT_THROW(Grid(3, 1.0), ValidationError);
    EXPECT_THROW(Grid(8, 0.0), ValidationError);
    EXPECT_THROW(Grid(8, 3, 1.0, 1.0), ValidationError);
    EXPECT_THROW(Grid(8, 8, 1.0, -2.0), ValidationError);
}

TEST(Grid, EigenvaluesAreNonNegativeWithZeroFirst) {
    const Grid g(16, 12, 1.5, 0.7);
    EXPECT_EQ(g.eigenvalue(0), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_GE(g.eigenvalue(k), 0.0);
    // mode (jx, jy) = (2, 3) sits at flat index 2 * ny + 3
    const double expected = std::pow(2.0 * pi / 1.5, 2) + std::pow(3.0 * pi / 0.7, 2);
    EXPECT_NEAR(g.eigenvalue(2 * 12 + 3), expected, 1e-12 * expected);
}

TEST(Field, RejectsNonFiniteOrMissizedSamples) {
    const Grid g(8, 1.0);
    EXPECT_THROW(Field(g, std::vector<double>(7, 0.0)), std::invalid_argument);
    std::vector<double> v(8, 0.0);
    v[3] = std::nan("");
    EXPECT_THROW(Field(g, v), std::invalid_argument);
}

TEST(Mean, Examples) {
    const Grid g(64, 1.0);
    EXPECT_NEAR(mean(Field::constant(g, 0.3)), 0.3, 1e-15);
    EXPECT_NEAR(mean(Field::sample(g, [](double x) { return std::cos(pi * x); })), 0.0, 1e-14);
    const Field u = Field::sample(g, [](double x) { return 0.3 + std::cos(pi * x); });
    double oracle = 0.0;
    for (std::size_t i = 0; i < 64; ++i) oracle += u[i] * (1.0 / 64.0);
    EXPECT_NEAR(mean(u), oracle, 1e-14);
    EXPECT_NEAR(mean(u), 0.3, 1e-14);
}

TEST(Mean, EqualsZeroCosineMode) {
    std::mt19937_64 rng(11);
    const Grid g(32, 24, 2.0, 3.0);
    const Field u = random_field(g, rng, false);
    EXPECT_NEAR(mean(u), cosine_transform(u).coeffs[0], 1e-14);
}

TEST(Laplacian, Examples) {
    const Grid g(64, 2.0);
    EXPECT_LE(laplacian(Field::constant(g, 1.7)).max_abs(), 1e-12);
    const Field c = Field::sample(g, [](double x) { return std::cos(pi * x / 2.0); });
    const double lambda = std::pow(pi / 2.0, 2);
    EXPECT_LE(max_diff(laplacian(c), c * -lambda), 1e-12 * lambda);
}

TEST(Laplacian, TensorEigenfunction) {
    const double lx = 1.3, ly = 0.8;
    const Grid g(32, 48, lx, ly);
    const Field u = Field::sample(g, [&](double x, double y) { return std::cos(pi * x / lx) * std::cos(2.0 * pi * y / ly); });
    const double lambda = std::pow(pi / lx, 2) + std::pow(2.0 * pi / ly, 2);
    EXPECT_LE(max_diff(laplacian(u), u * -lambda), 1e-11 * lambda);
}

TEST(InvNeumannLaplacian, Examples) {
    const Grid g(64, 1.0);
    EXPECT_EQ(inv_neumann_laplacian(Field(g)).max_abs(), 0.0);
    const Field c = Field::sample(g, [](double x) { return std::cos(pi * x); });
    EXPECT_LE(max_diff(inv_neumann_laplacian(c), c * (1.0 / (pi * pi))), 1e-14);
    EXPECT_THROW(inv_neumann_laplacian(c + Field::constant(g, 1e-3)), NonZeroMean);
}

TEST(InvNeumannLaplacian, RecoversRandomZeroMeanFields) {
    std::mt19937_64 rng(5);
    const Grid g(128, 1.0);
    for (int i = 0; i < 10; ++i) {
        const Field w = random_field(g, rng, true);
        const Field u = inv_neumann_laplacian(laplacian(w));
        EXPECT_LE(norm_h(u + w), 1e-12 * norm_h(w));
    }
}

TEST(Norms, Examples) {
    const Grid g(128, 1.0);
    EXPECT_NEAR(norm_h(Field::constant(g, -0.7)), 0.7, 1e-15);
    EXPECT_NEAR(norm_v(Field::constant(g, -0.7)), 0.7, 1e-15);
    EXPECT_EQ(norm_h(Field(g)), 0.0);
    EXPECT_EQ(norm_v(Field(g)), 0.0);
    EXPECT_EQ(norm_vstar(Field(g)), 0.0);
    const Field c = Field::sample(g, [](double x) { return std::cos(pi * x); });
    EXPECT_NEAR(norm_h(c), std::sqrt(0.5), 1e-14);
    // |cos|^2 + |pi sin|^2 integrates to (1 + pi^2) / 2
    EXPECT_NEAR(norm_v(c), std::sqrt(0.5 * (1.0 + pi * pi)), 1e-12);
    EXPECT_NEAR(norm_vstar(Field::constant(g, 0.4)), 0.4, 1e-15);
    EXPECT_NEAR(norm_vstar(c), std::sqrt(0.5) / pi, 1e-14);
}

TEST(Norms, VStarMatchesGradientOfN) {
    std::mt19937_64 rng(9);
    const Grid g(64, 1.7);
    Field u = random_field(g, rng, false);
    const double m = mean(u);
    const Field w = inv_neumann_laplacian(u - Field::constant(g, m));
    EXPECT_NEAR(norm_vstar(u), std::sqrt(std::pow(gradient_norm(w), 2) + m * m), 1e-12);
}

TEST(Norms, VStarEmbedsIntoH) {
    std::mt19937_64 rng(17);
    const Grid g(64, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Field u = random_field(g, rng, false);
        worst = std::max(worst, norm_vstar(u) / norm_h(u));
    }
    // the embedding constant is max(1/sqrt|Omega|, L / pi) for the two parts
    EXPECT_TRUE(std::isfinite(worst));
    EXPECT_LE(worst, std::max(1.0 / std::sqrt(2.0), 2.0 / pi) + 1e-12);
}

TEST(HelmholtzSmooth, Examples) {
    const Grid g(64, 1.0);
    const Field k = Field::constant(g, 2.5);
    EXPECT_LE(max_diff(helmholtz_smooth(k, 0.3), k), 1e-14);
    const Field c = Field::sample(g, [](double x) { return std::cos(pi * x); });
    EXPECT_LE(max_diff(helmholtz_smooth(c, 1.0), c * (1.0 / (1.0 + pi * pi))), 1e-14);
    std::mt19937_64 rng(2);
    const Field u = random_field(g, rng, false);
    EXPECT_NEAR(mean(helmholtz_smooth(u, 0.05)), mean(u), 1e-14);
}

TEST(Transform, RoundTripUpTo512) {
    std::mt19937_64 rng(1);
    for (std::size_t n : {4u, 7u, 64u, 100u, 512u}) {
        const Grid g(n, 3.0);
        const Field u = random_field(g, rng, false);
        EXPECT_LE(norm_h(inverse_cosine_transform(cosine_transform(u)) - u), 1e-12 * norm_h(u)) << "n=" << n;
    }
    const Grid g2(64, 32, 1.0, 0.5);
    const Field u2 = random_field(g2, rng, false);
    EXPECT_LE(norm_h(inverse_cosine_transform(cosine_transform(u2)) - u2), 1e-12 * norm_h(u2));
}

TEST(Transform, AmplitudesMatchDirectCosineSum) {
    // u(x_i) = sum_j c_j cos(pi j x_i / L), evaluated directly.
    std::mt19937_64 rng(4);
    const std::size_t n = 24;
    const double L = 1.9;
    const Grid g(n, L);
    const SpectralField s{g, [&] {
        std::vector<double> c(n);
        std::normal_distribution<double> normal;
        for (double& v : c) v = normal(rng);
        return c;
    }()};
    const Field u = inverse_cosine_transform(s);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (static_cast<double>(i) + 0.5) * L / static_cast<double>(n);
        double direct = 0.0;
        for (std::size_t j = 0; j < n; ++j) direct += s.coeffs[j] * std::cos(pi * static_cast<double>(j) * x / L);
        EXPECT_NEAR(u[i], direct, 1e-12);
    }
}

TEST(Properties, InvNeumannRightInverseAndSymmetry) {
    std::mt19937_64 rng(23);
    for (std::size_t n : {64u, 128u, 256u}) {
        const Grid g(n, 1.0);
        for (int i = 0; i < 5; ++i) {
            const Field u = random_field(g, rng, true);
            const Field v = random_field(g, rng, true);
            const Field w = inv_neumann_laplacian(u);
            EXPECT_LE(norm_h(laplacian(w) + u), 1e-10 * norm_h(u));
            EXPECT_LE(std::abs(mean(w)), 1e-13);
            const double uv = inner_h(u, inv_neumann_laplacian(v));
            const double vu = inner_h(v, inv_neumann_laplacian(u));
            EXPECT_LE(std::abs(uv - vu), 1e-12 * std::max(1.0, std::abs(uv)));
        }
    }
}

TEST(Properties, PoincareWithDiscreteConstant) {
    std::mt19937_64 rng(31);
    const Grid g(64, 48, 2.0, 3.0);
    const double c = std::sqrt(1.0 + std::pow(3.0 / pi, 2));
    for (int i = 0; i < 20; ++i) {
        const Field u = random_field(g, rng, true);
        EXPECT_LE(norm_v(u), c * gradient_norm(u) * (1.0 + 1e-12));
    }
}
