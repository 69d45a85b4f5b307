#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "chemo/model.hpp"

using namespace chemo;

namespace {

// Adaptive Simpson quadrature; independent of the closed form it checks.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double adaptive_integral(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, tol, 60);
}

double phi_integrand(double s) {
    const double e = std::numbers::e;
    return s / (s + e) + e * s / ((s + e) * (s + e));
}

}  // namespace

TEST(ModelParams, Validation) {
    ModelParams p;
    p.tau = 2;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.mu = -1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.p = -0.1;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(ModelParams, TheoremRegimeFlag) {
    EXPECT_TRUE((ModelParams{0, 1.0, 1.0, 0.0}.theorem_regime()));
    EXPECT_TRUE((ModelParams{1, 0.5, 2.0, 0.99}.theorem_regime()));
    EXPECT_FALSE((ModelParams{0, 1.0, 1.0, 1.0}.theorem_regime()));
    EXPECT_FALSE((ModelParams{0, 1.0, 0.0, 0.5}.theorem_regime()));
    EXPECT_FALSE((ModelParams{0, -1.0, 1.0, 0.5}.theorem_regime()));
    // Exploratory sets are accepted but annotated.
    const ModelParams outside{0, 1.0, 0.0, 1.5};
    EXPECT_NO_THROW(outside.validate());
    EXPECT_EQ(outside.warnings().size(), 2u);
    EXPECT_TRUE((ModelParams{0, 1.0, 1.0, 0.5}.warnings().empty()));
}

TEST(Source, Examples) {
    EXPECT_EQ(source(0.0, {0, 3.0, 2.0, 0.7}), 0.0);
    EXPECT_EQ(source(2.0, {0, 1.0, 1.0, 0.0}), -2.0);
    const long double e = std::numbers::e_v<long double>;
    const long double u = e * e - e;  // ln(u + e) = 2
    const double expected = static_cast<double>(-(u * u) / 2.0L);
    EXPECT_NEAR(source(static_cast<double>(u), {0, 0.0, 1.0, 1.0}), expected, 1e-13 * std::abs(expected));
    EXPECT_NEAR(expected, -10.9081, 1e-3);
}

TEST(Source, RejectsNegativeDensity) {
    EXPECT_THROW((void)source(-1e-3, {}), std::domain_error);
}

TEST(Source, DampingIsNonPositive) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> pdist(0.0, 2.0);
    std::uniform_real_distribution<double> mudist(0.0, 5.0);
    std::uniform_real_distribution<double> rdist(-2.0, 2.0);
    for (int k = 0; k < 200; ++k) {
        const ModelParams params{0, rdist(rng), mudist(rng), pdist(rng)};
        for (double u = 0.0; u < 1e6; u = 3.0 * u + 0.01) {
            EXPECT_LE(source(u, params), params.r * u);
        }
    }
}

TEST(Source, ClassicalLogisticAtPZeroIsBitExact) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> dist(0.0, 100.0);
    for (int k = 0; k < 500; ++k) {
        const double u = dist(rng);
        const double r = dist(rng) / 10;
        const double mu = dist(rng) / 10;
        EXPECT_EQ(source(u, {0, r, mu, 0.0}), r * u - mu * u * u);
    }
}

TEST(Phi, ClosedFormMatchesQuadrature) {
    int checked = 0;
    for (double u = 1e-3; u <= 1e4; u *= 1.9) {
        const double quad = adaptive_integral(phi_integrand, 0.0, u, 1e-13 * std::max(1.0, u));
        EXPECT_NEAR(phi(u), quad, 1e-10 * std::max(phi(u), 1e-12)) << "u = " << u;
        ++checked;
    }
    EXPECT_GE(checked, 20);
}

TEST(Phi, Examples) {
    EXPECT_EQ(phi(0.0), 0.0);
    EXPECT_NEAR(phi(std::numbers::e), std::numbers::e / 2.0, 1e-15);
    EXPECT_NEAR(phi(std::numbers::e), 1.35914, 1e-5);
    for (double u : {1e-3, 1.0, 1e3, 1e8}) {
        EXPECT_LE(phi(u), u);
    }
    EXPECT_THROW((void)phi(-1.0), std::domain_error);
}

TEST(Phi, BoundedByMinOfUAndUSquaredOverE) {
    EXPECT_EQ(phi(0.0), 0.0);
    for (double lg = -12.0; lg <= 12.0; lg += 0.05) {
        const double u = std::pow(10.0, lg);
        const double v = phi(u);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, u);
        EXPECT_LE(v, u * u / std::numbers::e * (1 + 1e-15));
    }
}

TEST(Phi, DerivativeMatchesFiniteDifference) {
    for (double u : {0.01, 0.3, 1.0, std::numbers::e, 17.0, 250.0, 1e4}) {
        const double h = 1e-5 * std::max(1.0, u);
        const double fd = (phi(u + h) - phi(u - h)) / (2 * h);
        EXPECT_NEAR(phi_derivative(u), fd, 1e-6 * std::abs(fd));
    }
}

TEST(SourceField, PointwiseLift) {
    const GridSpec g(8, 5, 1.0, 1.0);
    const ModelParams params{0, 1.3, 0.7, 0.4};
    const Field zero = source_field(Field(g), params);
    for (double v : zero.values()) {
        EXPECT_EQ(v, 0.0);
    }
    const Field constant = source_field(Field(g, 2.5), params);
    for (double v : constant.values()) {
        EXPECT_EQ(v, source(2.5, params));
    }
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 50.0);
    Field u(g);
    for (double& v : u.values()) {
        v = dist(rng);
    }
    const Field out = source_field(u, params);
    for (std::size_t k = 0; k < u.size(); ++k) {
        EXPECT_EQ(out[k], source(u[k], params));
    }
}

TEST(SourceField, ClampsUndershootWithinToleranceOnly) {
    const GridSpec g(4, 4, 1.0, 1.0);
    Field u(g, 1.0);
    u(1, 2) = -1e-12;
    const Field out = source_field(u, {0, 1.0, 1.0, 0.5}, 1e-10);
    EXPECT_EQ(out(1, 2), 0.0);
    u(1, 2) = -1e-6;
    try {
        (void)source_field(u, {0, 1.0, 1.0, 0.5}, 1e-10);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("(1, 2)"), std::string::npos) << e.what();
    }
}

TEST(State, RequiresSharedGrid) {
    const GridSpec a(4, 4, 1.0, 1.0);
    const GridSpec b(4, 5, 1.0, 1.0);
    EXPECT_THROW(State(Field(a), Field(a), Field(b), Field(a)), NumericalError);
}
