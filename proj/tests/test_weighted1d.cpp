#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pfence/weighted1d.hpp"

using namespace pfence;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double J_exponential(double a, double x) {
    return (std::exp(a * x) - 1.0) * (std::exp(a) - std::exp(a * x)) / (a * (std::exp(a) - 1.0) * std::exp(a * x));
}

// F(a, x) from the exponential reduction; equal to J of e^{at}.
double F_exponential(double a, double x) {
    return (std::exp(a) - std::exp(a * x) - std::exp(a * (1.0 - x)) + 1.0) / (a * (std::exp(a) - 1.0));
}

// J for ρ = 1 + s t in closed form.
double J_affine(double s, double x) {
    const double P = x + s * x * x / 2.0, T = 1.0 + s / 2.0;
    return P * (T - P) / (T * (1.0 + s * x));
}

Weight1D constant_weight(double c = 1.0) {
    return Weight1D::sample([c](double) { return c; });
}

}  // namespace

TEST(Weight, RejectsNonpositiveSamples) {
    EXPECT_THROW(Weight1D({1.0, 0.0, 1.0}), Error);
    EXPECT_THROW(Weight1D({1.0, -1.0, 1.0}), Error);
    EXPECT_THROW(Weight1D({1.0, 1.0}), Error);
    EXPECT_NO_THROW(Weight1D({0.0, 1.0, 0.0}));
    EXPECT_THROW(Weight1D::product([](double) { return 1.0; }, AffinePart{0.1, -2.0, 1.0}), Error);
}

TEST(Weight, MassesAddUp) {
    auto w = Weight1D::sample([](double t) { return 1.0 + t * t; }, 1001);
    for (double x : {0.0, 0.1234, 0.5, 0.9999, 1.0})
        EXPECT_NEAR(w.mass_below(x) + w.mass_above(x), w.total(), 1e-15);
    EXPECT_NEAR(w.total(), 4.0 / 3.0, 1e-6);
}

TEST(Weight, PowerConcavityTag) {
    auto tent = Weight1D::sample([](double t) { return 0.1 + std::min(t, 1.0 - t); });
    EXPECT_NO_THROW(tent.with_m(1));
    auto sq = Weight1D::sample([](double t) { return std::pow(0.1 + std::min(t, 1.0 - t), 2); });
    EXPECT_THROW(sq.with_m(1), Error);
    EXPECT_NO_THROW(sq.with_m(2));
    EXPECT_THROW(tent.with_m(0), Error);
}

TEST(JRho, ConstantWeight) {
    auto w = constant_weight();
    EXPECT_NEAR(J_rho(w, 0.3), 0.21, 1e-14);
    auto mj = max_J(w);
    EXPECT_NEAR(mj.value, 0.25, 1e-14);
    EXPECT_NEAR(mj.x, 0.5, 1e-6);
    EXPECT_THROW(J_rho(w, 0.0), Error);
    EXPECT_THROW(J_rho(w, 1.0), Error);
}

TEST(JRho, ExponentialClosedForm) {
    for (double a : {-3.0, 0.5, 2.0, 5.0}) {
        auto w = Weight1D::sample([a](double t) { return std::exp(a * t); });
        for (double x : {0.001, 0.1, 0.37, 0.5, 0.8123, 0.999}) {
            const double ref = J_exponential(a, x);
            EXPECT_NEAR(J_rho(w, x), ref, 1e-8 * ref) << "a=" << a << " x=" << x;
        }
    }
}

TEST(JRho, InvariantUnderScaling) {
    auto w = Weight1D::sample([](double t) { return std::exp(-t * t); });
    auto w3 = Weight1D::sample([](double t) { return 3.0 * std::exp(-t * t); });
    for (double x : {0.2, 0.5, 0.7}) EXPECT_NEAR(J_rho(w, x), J_rho(w3, x), 1e-14);
}

TEST(Sigma1D, ConstantWeight) {
    auto s = sigma1_1d(constant_weight());
    EXPECT_NEAR(s.value, 2.0, 1e-12);
    EXPECT_NEAR(s.cut, 0.5, 1e-6);
    EXPECT_GE(s.oracle_value, s.value);
}

TEST(Sigma1D, LinearWeightAgainstDenseScan) {
    auto w = Weight1D::sample([](double t) { return t; }).with_m(1);
    auto s = sigma1_1d(w);
    // J(x) = x(1 − x²)/2, scanned on 10⁶ points.
    double best = 0.0;
    for (int i = 1; i < 1000000; ++i) {
        const double x = i * 1e-6;
        best = std::max(best, x * (1.0 - x * x) / 2.0);
    }
    EXPECT_NEAR(s.value, 1.0 / (2.0 * best), 1e-8);
    EXPECT_NEAR(s.value, 3.0 * std::sqrt(3.0) / 2.0, 1e-8);
    EXPECT_NEAR(s.cut, 1.0 / std::sqrt(3.0), 1e-5);
}

TEST(Sigma1D, RescaledInterval) {
    auto w = Weight1D::sample([](double t) { return 1.0 + 0.7 * t - 0.5 * t * t; });
    const double s = sigma1_1d(w).value;
    for (double d : {0.5, 0.8, 2.0}) {
        auto r = sigma1_1d(w.with_length(d));
        EXPECT_NEAR(r.value, s / d, 1e-8 * s / d);
    }
}

TEST(Sigma1D, DefinitionConsistency) {
    Rng rng(11);
    for (int i = 0; i < 10; ++i) {
        auto w = random_power_concave(rng, 1 + i % 3);
        auto s = sigma1_1d(w);
        EXPECT_NEAR(s.value * 2.0 * max_J(w).value, 1.0, 1e-12);
    }
}

TEST(Sigma1D, TwoCutOracleMatchesSingleCutLimit) {
    // For ρ(0) → 0 a two-cut set with a → 0 approaches the best single cut
    // from above.
    auto w = Weight1D::sample([](double t) { return t; });
    auto tc = two_cut_oracle(w, 400);
    auto s = sigma1_1d(w);
    EXPECT_GE(tc.value, s.value);
    EXPECT_LT(tc.a, 0.01);
}

TEST(LogConcave, ConstantIsEqualityCase) {
    auto r = logconcave_bound_check(constant_weight(0.4));
    EXPECT_TRUE(r.constant);
    EXPECT_NEAR(r.max_margin, 0.0, 1e-14);
}

TEST(LogConcave, GaussianStrictlyBelow) {
    auto w = Weight1D::sample([](double t) { return std::exp(-t * t); });
    auto r = logconcave_bound_check(w);
    EXPECT_FALSE(r.constant);
    EXPECT_LE(r.max_margin, 1e-9);
    // Closed form through erf.
    const double T = std::sqrt(kPi) / 2.0 * std::erf(1.0);
    for (double x : {0.1, 0.3, 0.5, 0.8}) {
        const double P = std::sqrt(kPi) / 2.0 * std::erf(x);
        const double J = P * (T - P) / (T * std::exp(-x * x));
        EXPECT_NEAR(J_rho(w, x), J, 1e-10);
        EXPECT_LT(J - x * (1.0 - x), -1e-4);
    }
}

TEST(LogConcave, RejectsCosineBump) {
    auto w = Weight1D::sample([](double t) { return 2.0 + std::cos(2.0 * kPi * t); });
    EXPECT_THROW(logconcave_bound_check(w), Error);
    try {
        logconcave_bound_check(w);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotLogConcave);
    }
}

TEST(Properties, AcostaDuranOnPowerConcaveCorpus) {
    Rng rng(2024);
    for (int i = 0; i < 200; ++i) {
        const int m = 1 + i % 3;
        auto w = random_power_concave(rng, m);
        ASSERT_TRUE(w.is_normalized());
        auto mj = max_J(w);
        EXPECT_LE(mj.value, 0.25 + 1e-9) << "weight " << i;
        auto s = sigma1_1d(w);
        EXPECT_GE(s.value, 2.0 - 1e-8) << "weight " << i;
    }
}

TEST(Properties, LogConcaveCorpus) {
    Rng rng(77);
    for (int i = 0; i < 200; ++i) {
        auto w = random_log_concave(rng);
        auto r = logconcave_bound_check(w);
        EXPECT_LE(r.max_margin, 1e-9) << "weight " << i;
        EXPECT_NO_THROW(sigma1_1d(w)) << "weight " << i;
    }
}

TEST(RefinedII, ConstantHGivesSentinel) {
    auto w = Weight1D::product([](double t) { return 0.5 + std::min(t, 1.0 - t); }, AffinePart{0.1, 0.0, 1.0});
    auto r = refined_margin_ii(w, 0.1);
    EXPECT_EQ(r.lambda, kInf);
    EXPECT_GE(r.base_margin, -1e-9);
}

TEST(RefinedII, AffineWeightAgainstClosedForm) {
    auto w = Weight1D::product([](double) { return 1.0; }, AffinePart{0.1, 1.0, 1.0});
    auto r = refined_margin_ii(w, 0.1);
    const double c = 1.0 / (1.9 * 1.9);
    double ref = kInf;
    for (int i = 0; i <= 600000; ++i) {
        const double x = 0.2 + 0.6 * i / 600000.0;
        ref = std::min(ref, (x * (1.0 - x) - J_affine(1.0, x)) / c);
    }
    EXPECT_GT(r.lambda, 0.0);
    EXPECT_NEAR(r.lambda, ref, 1e-6 * ref);
}

TEST(RefinedII, ScaleInvariant) {
    auto w1 = Weight1D::product([](double t) { return 1.0 + t * (1.0 - t); }, AffinePart{0.1, 0.5, 1.0});
    auto w3 = Weight1D::product([](double t) { return 1.0 + t * (1.0 - t); }, AffinePart{0.1, 1.5, 3.0});
    const double a = refined_margin_ii(w1, 0.1).lambda, b = refined_margin_ii(w3, 0.1).lambda;
    EXPECT_NEAR(a, b, 1e-9 * a);
    EXPECT_NEAR(refined_margin_ii(w1.normalized(), 0.1).lambda, a, 1e-9 * a);
}

TEST(RefinedII, Preconditions) {
    auto w = Weight1D::product([](double) { return 1.0; }, AffinePart{0.1, 1.0, 1.0});
    EXPECT_THROW(refined_margin_ii(constant_weight(), 0.1), Error);
    EXPECT_THROW(refined_margin_ii(w, 0.05), Error);
    EXPECT_THROW(refined_margin_ii(w, 0.3), Error);
    EXPECT_THROW(refined_margin_ii(w.with_length(2.0), 0.1), Error);
}

TEST(RefinedIII, ConstantGivesSentinel) {
    auto r = refined_margin_iii(constant_weight().with_m(1), 0.1);
    EXPECT_EQ(r.lambda, kInf);
    EXPECT_GE(r.base_margin, -1e-12);
}

TEST(RefinedIII, SmoothedTent) {
    const double s = 0.05;
    auto w = Weight1D::sample([s](double t) { return 0.52 + s - std::hypot(t - 0.5, s); }).normalized().with_m(1);
    auto r = refined_margin_iii(w, 0.2);
    EXPECT_GT(r.lambda, 0.0);
    EXPECT_LT(r.lambda, kInf);
}

TEST(RefinedIII, ExponentialMatchesF) {
    for (double a : {-2.0, 1.0, 3.0}) {
        auto w = Weight1D::sample([a](double t) { return std::exp(a * t); }).normalized();
        for (double delta : {0.1, 0.3}) {
            auto r = refined_margin_iii(w, delta);
            double ref = kInf;
            for (int i = 0; i <= 100000; ++i) {
                const double x = delta + (1.0 - 2.0 * delta) * i / 100000.0;
                ref = std::min(ref, (0.25 - F_exponential(a, x)) / (a * a));
            }
            EXPECT_NEAR(r.lambda, ref, 1e-6 * ref) << "a=" << a << " delta=" << delta;
        }
    }
}

TEST(RefinedIII, RequiresConcavityHypothesis) {
    auto w = Weight1D::sample([](double t) { return 2.0 + std::cos(2.0 * kPi * t); });
    EXPECT_THROW(refined_margin_iii(w, 0.1), Error);
}

TEST(Properties, RefinedMarginsOnCorpus) {
    Rng rng(99);
    for (int i = 0; i < 60; ++i) {
        const int m = 1 + i % 3;
        auto prod = random_affine_product(rng, m, 0.1);
        auto r2 = refined_margin_ii(prod, 0.1);
        EXPECT_GT(r2.lambda, 0.0) << "product " << i;
        auto pc = random_power_concave(rng, m);
        auto r3 = refined_margin_iii(pc, 0.15);
        EXPECT_GT(r3.lambda, 0.0) << "weight " << i;
    }
}

TEST(Prop1D, ConstantHPassesTrivially) {
    auto w = Weight1D::product([](double t) { return 0.3 + std::min(t, 1.0 - t); }, AffinePart{0.1, 0.0, 1.0});
    auto r = prop1d_check(w, 0.1);
    EXPECT_TRUE(r.passes);
    EXPECT_EQ(r.C_tilde, kInf);
    EXPECT_GE(r.sigma, 2.0 - 1e-8);
}

TEST(Prop1D, AffineWeight) {
    auto w = Weight1D::product([](double) { return 1.0; }, AffinePart{0.1, 0.3, 1.0});
    auto r = prop1d_check(w, 0.1);
    double best = 0.0;
    for (int i = 1; i < 1000000; ++i) best = std::max(best, J_affine(0.3, i * 1e-6));
    EXPECT_NEAR(r.sigma, 1.0 / (2.0 * best), 1e-8);
    EXPECT_TRUE(r.hypothesis_met);
    EXPECT_NEAR(r.h_term, 0.09 / (1.27 * 1.27), 1e-12);
    EXPECT_GT(r.C_tilde, 0.0);
    EXPECT_TRUE(r.passes);
}

TEST(Prop1D, RescaledForm) {
    const double d = 0.8, d0 = 0.1;
    auto w = Weight1D::product([](double) { return 1.0; }, AffinePart{d0, 0.3, 1.0});
    auto base = prop1d_check(w, d0);
    auto wd = w.with_length(d);
    const double sd = sigma1_1d(wd).value;
    EXPECT_LE(sd, 3.0 / d);
    // h(y) = 1 + 0.3 y/d on [d·δ₀, d − d·δ₀]; (h'/h)² is smallest where h is largest.
    const double hmax = 1.0 + 0.3 * (1.0 - d0);
    const double min_term = (0.3 / d) * (0.3 / d) / (hmax * hmax);
    EXPECT_GE(sd, 2.0 / d + base.C_tilde * d * min_term - 1e-8);
    EXPECT_NEAR(prop1d_check(wd, d0).C_tilde, base.C_tilde, 1e-8 * base.C_tilde);
}

TEST(Prop1D, HypothesisNotMet) {
    // Mass concentrated in the middle pushes σ above 5/2.
    auto w = Weight1D::product([](double t) { return std::pow(0.01 + std::min(t, 1.0 - t), 3); },
                               AffinePart{0.1, 0.2, 1.0});
    auto r = prop1d_check(w, 0.1);
    EXPECT_FALSE(r.hypothesis_met);
    EXPECT_TRUE(r.passes);
}

TEST(Properties, Prop1DOnCorpus) {
    Rng rng(5);
    int met = 0;
    for (int i = 0; i < 60; ++i) {
        auto w = random_affine_product(rng, 1 + i % 3, 0.1);
        auto r = prop1d_check(w, 0.1);
        EXPECT_TRUE(r.passes) << "product " << i;
        if (r.hypothesis_met) ++met;
    }
    EXPECT_GT(met, 10);
}

TEST(PiP, Values) {
    EXPECT_NEAR(pi_p(2.0), kPi, 1e-15);
    EXPECT_NEAR(pi_p(1.0 + 1e-9), 2.0, 1e-6);
    EXPECT_NEAR(pi_p(1e9), 2.0, 1e-6);
    EXPECT_EQ(pi_p(kInf), 2.0);
    EXPECT_THROW(pi_p(1.0), Error);
    EXPECT_THROW(pi_p(0.5), Error);
    EXPECT_THROW(pi_p(std::nan("")), Error);
}

TEST(K0, MatchesDirectEvaluation) {
    // Small K∞ keeps every constant representable.
    for (double p : {1.5, 2.0, 3.0}) {
        AppendixParams prm{p, 2, 1, 0.02};
        auto r = K0_constant(prm);
        const double pp = std::pow(pi_p(p), p) + 1.0;
        const double gamma = prm.K_infinity * std::pow(pp, 2.0 / p) / std::pow(1.0 / 12.0, 1.0 / p);
        const double a = 1.0 / (4.0 * std::pow(gamma, p));
        const double s = 1.0 / std::pow(4.0 * gamma, 1.0 / (p - 1.0));
        const double t = std::pow(4.0 * std::pow(gamma, p), 2.0) * pp;
        const double q = p / (p - 1.0);
        const double b0 = std::min(a / 2.0, std::pow(0.5 * (p - 1.0) / p * s / t, q));
        const double M = std::pow((p - 1.0) / p, p - 1.0) * std::min(b0 * b0 / 2.0, b0 / 2.0 * std::pow(s, q));
        const double K1 = std::pow(2.0, -1.0 / (p - 1.0)) * std::exp(-2.0 * 16.0 * std::pow(gamma, 3.0 * p)) /
                          std::pow(gamma, (2.0 * p * p - p) / (p - 1.0)) * M;
        const double kk = (p + 1.0) * std::pow(2.0, (2.0 + 3.0 * p) / 2.0) * std::pow(2.0, 2.0 + p);
        const double K2 = 1.0 / 8.0 / (std::pow(prm.K_infinity, p) * std::pow(kk, 3.0));
        const double K0 = K1 * K2 * K2 / (6.0 * std::pow(7.0 * 16.0 * 256.0, 2.0));
        ASSERT_GT(K0, 0.0) << "p=" << p;
        EXPECT_NEAR(r.gamma, gamma, 1e-12 * gamma);
        EXPECT_NEAR(r.b0, b0, 1e-10 * b0);
        EXPECT_NEAR(r.M, M, 1e-10 * M);
        EXPECT_NEAR(r.K_kroger, kk, 1e-12 * kk);
        EXPECT_NEAR(r.log_K0, std::log(K0), 1e-9 * std::abs(std::log(K0)));
    }
}

TEST(K0, B0BelowHalfA) {
    for (double p : {1.01, 1.1, 1.5, 2.0, 4.0}) {
        for (double kinf : {0.1, 1.0, 10.0}) {
            auto r = K0_constant({p, 2, 1, kinf});
            EXPECT_LE(r.log_b0, std::log(r.a / 2.0) + 1e-12);
            EXPECT_TRUE(std::isfinite(r.log_K0));
        }
    }
}

TEST(K0, TendsToZeroNearOne) {
    // Along p = 1 + 2^{-k} the constant decreases once k >= 8 and tends to 0.
    double prev = K0_constant({1.0 + std::ldexp(1.0, -8), 2, 1, 1.0}).log_K0;
    for (int k = 9; k <= 20; ++k) {
        const double cur = K0_constant({1.0 + std::ldexp(1.0, -k), 2, 1, 1.0}).log_K0;
        EXPECT_LT(cur, prev) << "k=" << k;
        prev = cur;
    }
    EXPECT_LT(prev, -1e13);
}

TEST(K0, Preconditions) {
    EXPECT_THROW(K0_constant({1.0, 2, 1, 1.0}), Error);
    EXPECT_THROW(K0_constant({1.5, 2, 1, 0.0}), Error);
    EXPECT_THROW(K0_constant({1.5, 0, 1, 1.0}), Error);
}
