#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "wild_euler/rng.hpp"
#include "wild_euler/symmetry_breaking.hpp"

using namespace we;

namespace {

const Domain kDom;  // delta 0.5, R 2, z_period 1, T 1
const FanParams kFan;  // r0 1, lambda 0.1, eps 0.1

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::ConfigInvalid;
}

// Composite Simpson over the fan of (eps/2)(1/(2r^2))(3/2)(1 - r lambda)(1 - f^2), times 2 pi z_period.
double deficit_oracle(const FanParams& fp, double t, int n = 20000) {
    const double lo = fp.r0 - fp.lambda * t, hi = fp.r0 + fp.lambda * t;
    auto g = [&](double r) {
        const double f = (r - fp.r0) / (fp.lambda * t);
        return 0.5 * fp.eps * 1.5 * (1 - r * fp.lambda) * (1 - f * f) / (2 * r * r);
    };
    const double h = (hi - lo) / n;
    double s = g(lo) + g(hi);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * g(lo + i * h);
    return s * h / 3 * 2 * std::numbers::pi * kDom.z_period;
}

}  // namespace

TEST(Burgers, RarefactionExamples) {
    const BreakingSubsolution bs(kDom, kFan);
    EXPECT_EQ(bs.f(1.0, 0.5), 0.0);
    EXPECT_NEAR(bs.f(1.0 + 0.1 * 0.5 / 2, 0.5), 0.5, 1e-13);
    // the jump datum at t = 0 keeps |f| = 1
    EXPECT_EQ(std::abs(bs.f(1.0, 0.0)), 1.0);
    EXPECT_EQ(bs.f(0.8, 0.5), -1.0);
    EXPECT_EQ(bs.f(1.2, 0.5), 1.0);
    EXPECT_EQ(bs.f(0.9, 0.0), -1.0);
    EXPECT_EQ(bs.f(1.1, 0.0), 1.0);
    Rng rng(2);
    for (int k = 0; k < 1000; ++k) {
        const double r = rng.uniform(0.5, 2), t = rng.uniform(0, 1), f = bs.f(r, t);
        ASSERT_LE(std::abs(f), 1.0);
        if (!bs.in_fan(r, t)) ASSERT_EQ(std::abs(f), 1.0);
    }
}

TEST(Burgers, ParamValidation) {
    EXPECT_EQ(code_of([] { BreakingSubsolution(kDom, FanParams{1.0, 0.6, 0.1, 1.0}); }), ErrorCode::FanTooFast);
    EXPECT_EQ(code_of([] { BreakingSubsolution(kDom, FanParams{0.55, 0.1, 0.1, 1.0}); }), ErrorCode::InvalidDomain);
    EXPECT_EQ(code_of([] { BreakingSubsolution(kDom, FanParams{1.0, 0.1, 1.0, 1.0}); }), ErrorCode::InvalidField);
    EXPECT_EQ(code_of([] { BreakingSubsolution(kDom, FanParams{1.0, -0.1, 0.1, 1.0}); }), ErrorCode::InvalidField);
}

// Independent FD oracle for the Burgers residual inside each smooth piece.
TEST(Burgers, FiniteDifferenceResidualOffKinks) {
    const BreakingSubsolution bs(kDom, kFan);
    Rng rng(8);
    const double h = 1e-6;
    for (int k = 0; k < 2000; ++k) {
        const double t = rng.uniform(0.1, 1), r = rng.uniform(0.6, 1.9);
        const auto [lo, hi] = bs.fan_edges(t);
        if (std::abs(r - lo) < 1e-3 || std::abs(r - hi) < 1e-3) continue;
        const double ft = (bs.f(r, t + h) - bs.f(r, t - h)) / (2 * h);
        const double fr2 = (std::pow(bs.f(r + h, t), 2) - std::pow(bs.f(r - h, t), 2)) / (2 * h);
        ASSERT_NEAR(ft + 0.05 * fr2, 0.0, 1e-7) << r << " " << t;
        ASSERT_LT(bs.strong_residual(r, t).cwiseAbs().maxCoeff(), 1e-12 * bs.residual_scale(r, t));
    }
}

TEST(Breaking, ClosedForms) {
    const BreakingSubsolution bs(kDom, kFan);
    const double t = 0.5;
    // fan centre r = 1: f = 0
    EXPECT_DOUBLE_EQ(bs.alpha(1.0, t), 0.0);
    EXPECT_NEAR(bs.gamma_fn(1.0, t), -0.05, 1e-16);
    EXPECT_NEAR(bs.energy_closed(1.0, t), 0.5 * (1 - 0.9), 1e-16);
    EXPECT_NEAR(bs.energy_closed(1.0, t), 0.05, 1e-15);
    // outside: gamma_fn = 0, beta = -alpha^2/2
    EXPECT_EQ(bs.gamma_fn(1.5, t), 0.0);
    EXPECT_DOUBLE_EQ(bs.beta(1.5, t), -0.5 / (1.5 * 1.5));
    EXPECT_DOUBLE_EQ(bs.energy_closed(1.5, t), bs.half_v0_sq(1.5));
}

TEST(Breaking, EigenAgreementInFan) {
    const BreakingSubsolution bs(kDom, kFan);
    Rng rng(3);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const double t = rng.uniform(0.01, 1);
        const auto [lo, hi] = bs.fan_edges(t);
        const double r = rng.uniform(lo, hi);
        const double a = bs.alpha(r, t), g = bs.gamma_fn(r, t);
        // characteristic polynomial roots {0, a^2/2 +- |g|}
        const double oracle = std::max(0.0, a * a / 2 + std::abs(g));
        worst = std::max({worst, std::abs(bs.energy_eigen(r, t) - oracle), std::abs(bs.energy_closed(r, t) - oracle)});
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(Breaking, EbarExamples) {
    const BreakingSubsolution bs(kDom, kFan);
    EXPECT_NEAR(bs.ebar(1.0, 0.0, 0.5), 0.4775, 1e-15);
    EXPECT_LT(bs.ebar(1.0, std::numbers::pi / 2, 0.5), bs.ebar(1.0, 0.0, 0.5));
    for (double th : {0.0, 0.7, 2.0, 4.5}) {
        EXPECT_DOUBLE_EQ(bs.ebar(1.7, th, 0.5), bs.half_v0_sq(1.7));
        EXPECT_DOUBLE_EQ(bs.ebar(1.02, th, 0.0), bs.half_v0_sq(1.02));
    }
}

TEST(Breaking, QMatchesDefinition) {
    const BreakingSubsolution bs(kDom, kFan);
    const double t = 0.6;
    // q_r = alpha alpha_r + alpha^2 / (2 r): check by central differences off the kinks
    for (double r : {0.7, 0.97, 1.0, 1.03, 1.5}) {
        const double h = 1e-5;
        const double dq = (bs.q(r + h, t) - bs.q(r - h, t)) / (2 * h);
        const double da = (bs.alpha(r + h, t) - bs.alpha(r - h, t)) / (2 * h);
        const double a = bs.alpha(r, t);
        EXPECT_NEAR(dq, a * da + a * a / (2 * r), 1e-7) << r;
    }
    EXPECT_EQ(bs.q(1.0, 0.5), 0.0);
    // outside the fan for r < 1 - lambda t: alpha^2 = 1/r^2 so int_1^r differs only through the fan
    EXPECT_NEAR(bs.q(0.6, 0.0), 0.5 / 0.36 + 0.5 * (-(1 / (2 * 0.36)) + 0.5), 1e-12);
}

TEST(Breaking, DeficitAgainstQuadratureOracle) {
    const BreakingSubsolution bs(kDom, kFan);
    EXPECT_EQ(bs.deficit(0.0), 0.0);
    for (double t : {0.5, 0.1, 1.0}) {
        const double d = bs.deficit(t), ref = deficit_oracle(kFan, t);
        EXPECT_GT(d, 0.0);
        EXPECT_NEAR(d, ref, 1e-10 * ref) << t;
    }
}

TEST(Breaking, DeficitLinearInEps) {
    FanParams a = kFan, b = kFan;
    b.eps = 2 * a.eps;
    const BreakingSubsolution A(kDom, a), B(kDom, b);
    for (double t : {0.1, 0.5, 1.0}) EXPECT_NEAR(B.deficit(t), 2 * A.deficit(t), 1e-12 * B.deficit(t));
}

TEST(Breaking, ThetaVariance) {
    const BreakingSubsolution bs(kDom, kFan);
    EXPECT_EQ(bs.theta_variance(1.0, 0.0), 0.0);
    EXPECT_EQ(bs.theta_variance(1.5, 0.5), 0.0);
    EXPECT_GT(bs.theta_variance(1.0, 0.5), 0.0);
    // ebar = c0 - c1 sin^2: variance of sin^2 over equispaced angles is 1/8
    const double c1 = 0.5 * kFan.eps * (1 - kFan.lambda) / 2.0;
    EXPECT_NEAR(bs.theta_variance(1.0, 0.5), c1 * c1 / 8, 1e-15);
}

TEST(Breaking, VerifyPasses) {
    const BreakingSubsolution bs(kDom, kFan);
    BreakingGrid g;
    for (int k = 0; k <= 10; ++k) g.times.push_back(0.1 * k);
    const auto rep = verify_breaking(bs, g);
    EXPECT_TRUE(rep.passed());
    for (const auto& c : rep.checks)
        if (c.asserted) EXPECT_TRUE(c.pass) << c.name << " " << c.value;
    const auto* d41 = rep.find("definition_two_thirds_bound");
    ASSERT_NE(d41, nullptr);
    EXPECT_FALSE(d41->asserted);
    // outside the fan lambda_max = 1/(2r^2) > 1/(3r^2)
    EXPECT_FALSE(d41->pass);
    EXPECT_EQ(rep.find("theta_variance_zero_at_t0")->value, 0.0);
    EXPECT_EQ(rep.data["curve"].size(), 11u);
}

TEST(Breaking, FanUnresolved) {
    const BreakingSubsolution bs(kDom, kFan);
    BreakingGrid g;
    g.nr = 16;
    g.times = {0.0, 1e-4};
    EXPECT_EQ(code_of([&] { verify_breaking(bs, g); }), ErrorCode::FanUnresolved);
    g.nr = 2;
    EXPECT_EQ(code_of([&] { verify_breaking(bs, g); }), ErrorCode::GridTooCoarse);
}

// Global weak residual of Burgers, bumps straddling the fan edges; kinks are Lipschitz so O(h^2).
TEST(Breaking, BurgersWeakResidualSecondOrder) {
    for (const FanParams& fp : {kFan, FanParams{1.2, 0.2, 0.3, 1.0}}) {
        const BreakingSubsolution bs(kDom, fp);
        for (std::uint64_t seed : {4u, 5u}) {
            const auto st = burgers_weak_study(bs, seed);
            ASSERT_EQ(st.errors.size(), 5u);
            EXPECT_GE(st.fitted_order, 1.7) << fp.r0 << " " << seed;
            // O(h^2) as a bound at every level
            for (std::size_t i = 0; i < st.n.size(); ++i)
                EXPECT_LT(st.errors[i] * st.n[i] * st.n[i], 0.2) << st.n[i];
        }
    }
}

TEST(Breaking, BurgersInitialRowIsCellAveraged) {
    const BreakingSubsolution bs(kDom, kFan);
    const Grid g{kDom, 64, 4, 8};
    const auto f = sample_burgers(bs, g);
    // only the node whose cell contains r0 = 1 is averaged
    const double h = g.hr();
    for (int i = 0; i <= g.nr; ++i) {
        if (std::abs(g.r(i) - 1.0) < h / 2) EXPECT_NEAR(f(i, 0, 0), (g.r(i) - 1.0) / (h / 2), 1e-14) << i;
        else EXPECT_EQ(f(i, 0, 0), g.r(i) < 1.0 ? -1.0 : 1.0) << i;
    }
    EXPECT_EQ(f(40, 0, 3), bs.f(g.r(40), g.t(3)));
}
