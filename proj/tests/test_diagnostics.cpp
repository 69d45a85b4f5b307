#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "chemo/diagnostics.hpp"
#include "test_fields.hpp"

using namespace chemo;

namespace {

constexpr double e = std::numbers::e;

// Independent face-by-face Dirichlet energy.
double dirichlet(const Field& f) {
    const GridSpec& g = f.grid();
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i + 1 < g.nx(); ++i) {
            s += std::pow((f(i + 1, j) - f(i, j)) / g.hx(), 2);
        }
    }
    for (int j = 0; j + 1 < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            s += std::pow((f(i, j + 1) - f(i, j)) / g.hy(), 2);
        }
    }
    return s * g.cell_area();
}

// C(delta) from the stationarity condition of u^2 (1 - delta L^q), L = ln(u + e), q = 1 - p:
// 2 (1 - delta L^q) = delta q L^{q-1} u / (u + e). Bisection on the sign of the derivative.
double inequality_constant_oracle(double p, double delta, double u_max) {
    const double q = 1.0 - p;
    auto gap = [&](double u) { return u * u * (1.0 - delta * std::pow(std::log(u + e), q)); };
    auto slope = [&](double u) {
        const double l = std::log(u + e);
        return 2.0 * (1.0 - delta * std::pow(l, q)) - delta * q * std::pow(l, q - 1.0) * u / (u + e);
    };
    if (slope(u_max) > 0.0) {
        return std::max(0.0, gap(u_max));
    }
    double lo = 1e-12;
    double hi = u_max;
    for (int it = 0; it < 400; ++it) {
        const double mid = std::sqrt(lo * hi);
        (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    return std::max(0.0, gap(0.5 * (lo + hi)));
}

State zero_state(const GridSpec& g) { return State(g); }

}  // namespace

TEST(LLogL, Examples) {
    const GridSpec unit(8, 8, 1.0, 1.0);
    EXPECT_EQ(l_log_l(Field(unit)), 0.0);
    EXPECT_NEAR(l_log_l(Field(unit, 1.0)), std::log(1.0 + e), 1e-14);
    EXPECT_NEAR(l_log_l(Field(unit, 1.0)), 1.31326, 1e-5);
    const GridSpec rect(6, 4, 2.0, 3.0);
    EXPECT_NEAR(l_log_l(Field(rect, 2.0)), 6.0 * 2.0 * std::log(2.0 + e), 1e-13);
}

TEST(LLogL, ToleratesTinyUndershootOnly) {
    const GridSpec g(4, 4, 1.0, 1.0);
    Field f(g, 1.0);
    f(2, 2) = -1e-12;
    EXPECT_NEAR(l_log_l(f), 15.0 / 16.0 * std::log(1.0 + e), 1e-14);
    f(2, 2) = -1e-3;
    EXPECT_THROW((void)l_log_l(f), NumericalError);
}

TEST(EnergyParams, WorkedExample) {
    const EnergyParams ep = make_energy_params({0, 1.0, 4.0, 0.5}, 1.0, 1.0, 1.0);
    const double eps = 1.0 / (3.0 * (1.0 + e));
    EXPECT_NEAR(ep.epsilon, eps, 1e-15);
    EXPECT_NEAR(ep.epsilon, 0.0896471, 1e-7);
    EXPECT_NEAR(ep.a_coef, 2.0 * eps, 1e-15);
    EXPECT_NEAR(ep.b_coef, eps + 3.0 * (1.0 + e) / 4.0, 1e-14);
    // Small mu selects the other branch of the minimum.
    const EnergyParams small = make_energy_params({0, 1.0, 0.04, 0.5}, 1.0, 1.0, 1.0);
    EXPECT_EQ(small.epsilon, 0.01);
}

TEST(EnergyParams, CoefficientIdentitiesHold) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> logu(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        const double mu = std::pow(10.0, logu(rng));
        const double mass = std::pow(10.0, logu(rng));
        const double area = std::pow(10.0, logu(rng) / 3);
        const double c_gn = std::pow(10.0, logu(rng) / 3);
        const EnergyParams ep = make_energy_params({1, 1.0, mu, 0.3}, mass, area, c_gn);
        const double eps = ep.epsilon;
        EXPECT_LE(eps, mu / 4.0);
        EXPECT_LE(eps, 1.0 / (3.0 * c_gn * (mass + e * area)) * (1 + 1e-15));
        const double a = ep.a_coef;
        const double b = ep.b_coef;
        EXPECT_LE(std::abs(a * a / (4.0 * eps) + eps - a), 1e-14 * std::max(1.0, a));
        EXPECT_LE(std::abs(eps + 1.0 / (4.0 * eps) - b), 1e-14 * std::max(1.0, b));
    }
}

TEST(EnergyParams, RejectsUndefinedEpsilon) {
    EXPECT_THROW((void)make_energy_params({0, 1.0, 0.0, 0.5}, 1.0, 1.0), std::invalid_argument);
    EXPECT_THROW((void)make_energy_params({0, 1.0, 1.0, 0.5}, 1.0, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW((void)make_energy_params({0, 1.0, 1.0, 0.5}, -1.0, 1.0), std::invalid_argument);
}

TEST(Energy, ParabolicTermsWeighGradients) {
    const GridSpec g(16, 12, 1.0, 1.0);
    std::mt19937_64 rng(4);
    State s(testing_fields::smooth_nonnegative_field(g, rng),
            testing_fields::smooth_nonnegative_field(g, rng),
            testing_fields::smooth_nonnegative_field(g, rng),
            testing_fields::smooth_nonnegative_field(g, rng));
    const ModelParams elliptic{0, 1.0, 2.0, 0.5};
    const ModelParams parabolic{1, 1.0, 2.0, 0.5};
    const EnergyParams ep = make_energy_params(parabolic, integrate(s.w), g.area());
    const double y0 = energy(s, ep, elliptic);
    const double y1 = energy(s, ep, parabolic);
    EXPECT_NEAR(y0, l_log_l(s.u) + l_log_l(s.w), 1e-13 * y0);
    EXPECT_NEAR(y1 - y0, 0.5 * ep.a_coef * dirichlet(s.v) + 0.5 * ep.b_coef * dirichlet(s.z),
                1e-12 * y1);
}

TEST(Energy, UniformStateExample) {
    const GridSpec g(8, 8, 1.0, 1.0);
    const State s(Field(g, 1.0), Field(g, 1.0), Field(g, 1.0), Field(g, 1.0));
    const ModelParams params{1, 1.0, 1.0, 0.0};
    const EnergyParams ep = make_energy_params(params, 1.0, 1.0);
    EXPECT_NEAR(energy(s, ep, params), 2.0 * std::log(1.0 + e), 1e-14);
}

TEST(Record, ZeroStateGivesZeroColumns) {
    const GridSpec g(8, 8, 1.0, 1.0);
    const DiagnosticsRecord rec = record(zero_state(g), std::nullopt, {1, 1.0, 0.0, 0.5}, 0.0);
    for (double v : rec.values()) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Record, MatchesIndependentComputation) {
    const GridSpec g(20, 10, 2.0, 1.0);
    std::mt19937_64 rng(8);
    State s(testing_fields::smooth_nonnegative_field(g, rng),
            testing_fields::smooth_nonnegative_field(g, rng),
            testing_fields::smooth_nonnegative_field(g, rng),
            testing_fields::smooth_nonnegative_field(g, rng), 0.25);
    const ModelParams params{1, 1.0, 3.0, 0.7};
    const EnergyParams ep = make_energy_params(params, integrate(s.w), g.area());
    const State before = s;
    const DiagnosticsRecord rec = record(s, ep, params, 1e-3);
    EXPECT_EQ(s, before);
    EXPECT_EQ(rec.t, 0.25);
    EXPECT_EQ(rec.dt_used, 1e-3);
    EXPECT_EQ(rec.energy_y, energy(s, ep, params));
    double mass = 0.0;
    for (double v : s.u.values()) {
        mass += v;
    }
    EXPECT_NEAR(rec.mass_u, mass * g.cell_area(), 1e-13 * rec.mass_u);
    EXPECT_EQ(rec.linf_w, s.w.max());
    EXPECT_EQ(rec.min_u, s.u.min());
    EXPECT_NEAR(rec.grad_z_sq, dirichlet(s.z), 1e-13 * std::max(1.0, rec.grad_z_sq));
    EXPECT_EQ(DiagnosticsRecord::column_names().front(), "t");
    EXPECT_EQ(DiagnosticsRecord::column_names().back(), "dt_used");
}

TEST(Record, WithoutEnergyParamsDropsGradientWeights) {
    const GridSpec g(8, 8, 1.0, 1.0);
    std::mt19937_64 rng(2);
    State s(testing_fields::smooth_nonnegative_field(g, rng),
            testing_fields::smooth_nonnegative_field(g, rng),
            testing_fields::smooth_nonnegative_field(g, rng),
            testing_fields::smooth_nonnegative_field(g, rng));
    const DiagnosticsRecord rec = record(s, std::nullopt, {1, 1.0, 0.0, 0.5}, 0.0);
    EXPECT_EQ(rec.energy_y, rec.l_log_l_u + rec.l_log_l_w);
}

TEST(DetectBlowup, ThresholdOnSumOfNorms) {
    const GridSpec g(8, 8, 1.0, 1.0);
    State s(g);
    s.u = Field(g, 1.0);
    s.w = Field(g, 1.0);
    s.u(5, 3) = 6e4;
    s.w(1, 1) = 4e4 + 1.0;
    const auto hit = detect_blowup(s, 1e5);
    ASSERT_TRUE(hit.has_value());
    EXPECT_EQ(hit->field, "u");
    EXPECT_EQ(hit->i, 5);
    EXPECT_EQ(hit->j, 3);
    EXPECT_EQ(hit->max_value, 6e4);
    EXPECT_FALSE(hit->non_finite);
    s.w(1, 1) = 4e4 - 1.0;
    EXPECT_FALSE(detect_blowup(s, 1e5).has_value());
}

TEST(DetectBlowup, NonFiniteAnywhere) {
    const GridSpec g(8, 8, 1.0, 1.0);
    State s(g);
    s.z(2, 6) = std::numeric_limits<double>::quiet_NaN();
    const auto hit = detect_blowup(s, 1e5);
    ASSERT_TRUE(hit.has_value());
    EXPECT_TRUE(hit->non_finite);
    EXPECT_EQ(hit->field, "z");
    EXPECT_EQ(hit->i, 2);
    EXPECT_EQ(hit->j, 6);
}

TEST(Inequality, LargeDeltaNeedsNoConstant) {
    for (double p : {0.0, 0.5, 0.9}) {
        for (double delta : {1.0, 2.0}) {
            const auto rep = verify_interpolation_inequality(p, delta, 1e8, 5000);
            EXPECT_EQ(rep.c_delta, 0.0);
            EXPECT_TRUE(rep.holds);
            EXPECT_TRUE(rep.phi_bound_holds);
        }
    }
}

TEST(Inequality, ConstantMatchesStationarityOracle) {
    for (double p : {0.0, 0.5, 0.9}) {
        for (double delta : {0.1, 0.3, 0.7}) {
            const auto rep = verify_interpolation_inequality(p, delta, 1e8, 20000);
            const double oracle = inequality_constant_oracle(p, delta, 1e8);
            EXPECT_NEAR(rep.c_delta, oracle, 1e-10 * oracle) << "p=" << p << " delta=" << delta;
            EXPECT_TRUE(rep.holds);
        }
    }
}

TEST(Inequality, PZeroDeltaTenthHasInteriorMaximum) {
    const auto rep = verify_interpolation_inequality(0.0, 0.1, 1e8, 20000);
    EXPECT_FALSE(rep.argmax_at_boundary);
    // Stationarity 2 (1 - delta L) = delta u / (u + e) at the reported arg-max.
    const double u = rep.argmax_u;
    EXPECT_NEAR(2.0 * (1.0 - 0.1 * std::log(u + e)), 0.1 * u / (u + e), 1e-6);
}

TEST(Inequality, SlowGrowthPushesMaximumToEdge) {
    const auto rep = verify_interpolation_inequality(0.9, 0.1, 1e8, 20000);
    EXPECT_TRUE(rep.argmax_at_boundary);
    EXPECT_EQ(rep.argmax_u, 1e8);
}

TEST(Inequality, SurvivesTenfoldRecertification) {
    for (double p : {0.0, 0.5, 0.9}) {
        for (double delta : {0.01, 0.1, 0.5}) {
            const auto rep = verify_interpolation_inequality(p, delta, 1e8, 2000);
            EXPECT_TRUE(certify_interpolation_inequality(p, delta, 1e8, 20000, rep.c_delta))
                << "p=" << p << " delta=" << delta;
        }
    }
    EXPECT_FALSE(certify_interpolation_inequality(0.0, 0.1, 1e8, 20000, 0.0));
}

TEST(Inequality, ConstantDecreasesInDelta) {
    double prev = std::numeric_limits<double>::infinity();
    for (double delta : {0.01, 0.05, 0.1, 0.5, 1.0}) {
        const double c = verify_interpolation_inequality(0.5, delta, 1e8, 5000).c_delta;
        EXPECT_LE(c, prev);
        prev = c;
    }
}

TEST(Inequality, RejectsCriticalExponentAndBadDelta) {
    EXPECT_THROW((void)verify_interpolation_inequality(1.0, 0.1), std::invalid_argument);
    EXPECT_THROW((void)verify_interpolation_inequality(1.5, 0.1), std::invalid_argument);
    EXPECT_THROW((void)verify_interpolation_inequality(0.5, 0.0), std::invalid_argument);
    EXPECT_THROW((void)verify_interpolation_inequality(-0.1, 0.1), std::invalid_argument);
}

TEST(LogSpacedSamples, Layout) {
    const auto u = log_spaced_samples(1e8, 101);
    ASSERT_EQ(u.size(), 101u);
    EXPECT_EQ(u[0], 0.0);
    EXPECT_NEAR(u[1], 1e-6, 1e-20);
    EXPECT_EQ(u.back(), 1e8);
    for (std::size_t k = 1; k < u.size(); ++k) {
        EXPECT_GT(u[k], u[k - 1]);
    }
}

TEST(GnRatio, ConstantFieldsClosedForm) {
    for (const GridSpec& g : {GridSpec(16, 16, 1.0, 1.0), GridSpec(12, 20, 2.0, 1.5)}) {
        for (double c : {0.0, 1.0, 10.0}) {
            const double expected = c * c / ((c + e) * (c + e) * g.area());
            EXPECT_NEAR(empirical_gn_ratio(Field(g, c)), expected, 1e-12 * std::max(1.0, expected));
        }
    }
}

TEST(GnRatio, RejectsNegativeField) {
    const GridSpec g(8, 8, 1.0, 1.0);
    Field f(g, 1.0);
    f(0, 0) = -0.5;
    EXPECT_THROW((void)empirical_gn_ratio(f), NumericalError);
}

TEST(GnRatio, FiniteOnRoughData) {
    const GridSpec g(32, 32, 1.0, 1.0);
    std::mt19937_64 rng(21);
    for (int k = 0; k < 50; ++k) {
        const double r = empirical_gn_ratio(testing_fields::random_field(g, rng, 0.0, 100.0));
        EXPECT_TRUE(std::isfinite(r));
        EXPECT_GT(r, 0.0);
    }
}
