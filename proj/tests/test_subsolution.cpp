#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "support.hpp"
#include "wild_euler/rng.hpp"
#include "wild_euler/subsolution.hpp"

using namespace we;

namespace {

const DensityPressure<double> kDp{2.0};

// e of the explicit triple in closed form: chi~^2 r/2 + sqrt((chi~^2 r/2 - r^gamma)^2 + (chi~' r^2/2)^2)
double closed_energy(double r, double c, double dc, double gamma) {
    const double a = c * c * r / 2;
    return a + std::hypot(a - std::pow(r, gamma), dc * r * r / 2);
}

SubsolutionState explicit_with_chi(const Grid& g, double chi, const ChiTilde& ct = ChiTilde::constant(1.0)) {
    SubsolutionState sub = build_explicit_subsolution(g, kDp, ct);
    attach_chi(sub, ChiProfile::constant(chi, g.domain.T));
    return sub;
}

}  // namespace

TEST(ChiTilde, Profiles) {
    const auto c = ChiTilde::cosine(1.0, 0.3, 2.0);
    EXPECT_NEAR(c.value(0.25), 1.0 + 0.3 * std::cos(std::numbers::pi), 1e-15);
    EXPECT_NEAR(c.deriv(0.1), -0.3 * 4 * std::numbers::pi * std::sin(0.4 * std::numbers::pi), 1e-14);
    // derivative consistent with values
    const double h = 1e-3;
    for (double t : {0.2, 0.5, 0.8})
        EXPECT_NEAR((c.value(t + h) - c.value(t - h)) / (2 * h), c.deriv(t), 1e-4);
    EXPECT_THROW(ChiTilde::constant(-1.0).validate(1.0), Error);
    EXPECT_THROW(ChiTilde::cosine(1.0, 1.5, 1.0).validate(1.0), Error);
    const auto s = ChiTilde::sampled({0.0, 0.5, 1.0}, {1.0, 1.5, 2.0}, {1.0, 1.0, 1.0});
    EXPECT_NEAR(s.value(0.3), 1.3, 1e-15);
    EXPECT_NEAR(s.deriv(0.7), 1.0, 1e-14);
}

TEST(Subsolution, ExplicitStateExamples) {
    const auto s = explicit_state(1.0, 0.4, kDp, ChiTilde::constant(1.0), 0.0);
    EXPECT_EQ(s.m(0), 0.0);
    EXPECT_EQ(s.m(1), 1.0);
    EXPECT_EQ(s.U.u, -1.0);
    EXPECT_EQ(s.U.w, 0.0);  // time independent for constant chi~
    EXPECT_EQ(-s.U.u, 1.0); // U_zz

    const auto lin = ChiTilde::sampled({0.0, 1.0}, {1.0, 2.0}, {1.0, 1.0});
    for (double t : {0.0, 0.3, 0.9}) EXPECT_NEAR(explicit_state(0.5, t, kDp, lin, 0.0).U.w, -0.125, 1e-15);
}

TEST(Subsolution, StrongResidualVanishes) {
    Rng rng(3);
    const auto ct = ChiTilde::cosine(1.0, 0.3, 1.5);
    for (int k = 0; k < 1000; ++k) {
        const double r = rng.uniform(0.5, 2), z = rng.uniform(0, 1), t = rng.uniform(0, 1);
        for (const auto& c : {ChiTilde::constant(1.0), ct})
            ASSERT_LT(explicit_strong_residual(r, z, t, kDp, c).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Subsolution, BuildMatchesClosedFormAndBoundary) {
    const Grid g{Domain{}, 16, 8, 8};
    const auto ct = ChiTilde::cosine(1.0, 0.3, 1.0);
    const auto sub = build_explicit_subsolution(g, kDp, ct);
    EXPECT_TRUE(sub.analytic);
    for (int k = 0; k < g.n_t(); ++k)
        for (int j = 0; j < g.nz; ++j) {
            EXPECT_EQ(sub.m(0, j, k, 0), 0.0);
            EXPECT_EQ(sub.m(g.nr, j, k, 0), 0.0);
            for (int i = 0; i < g.n_r(); ++i) {
                const double r = g.r(i), t = g.t(k);
                ASSERT_DOUBLE_EQ(sub.m(i, j, k, 1), ct.value(t) * r);
                ASSERT_DOUBLE_EQ(sub.U(i, j, k, 0), -r * r);
                ASSERT_DOUBLE_EQ(sub.U(i, j, k, 1), -ct.deriv(t) * r * r / 2);
            }
        }
}

TEST(Subsolution, ThresholdDefaultScenario) {
    const auto sub = build_explicit_subsolution(Grid{Domain{}, 128, 16, 8}, kDp, ChiTilde::constant(1.0));
    const auto th = chi_threshold(sub);
    // sup e = e(R) = 1 + |1 - 4| = 4
    EXPECT_NEAR(closed_energy(2.0, 1.0, 0.0, 2.0), 4.0, 1e-15);
    EXPECT_NEAR(th.sup(), 8.0, 1e-12);
    EXPECT_NEAR(th.at(0.37), 8.0, 1e-12);
}

TEST(Subsolution, ThresholdAgainstClosedForm) {
    struct Case {
        Domain dom;
        ChiTilde ct;
    };
    const std::vector<Case> cases{
        {Domain{0.9, 1.1, 1.0, 1.0}, ChiTilde::constant(1.0)},
        {Domain{0.5, 1.5, 1.0, 1.0}, ChiTilde::constant(1e-6)},
        {Domain{0.5, 2.0, 1.0, 1.0}, ChiTilde::cosine(1.5, 0.4, 1.0)},
        {Domain{0.3, 0.8, 1.0, 1.0}, ChiTilde::constant(2.0)},
    };
    for (const auto& c : cases) {
        const auto sub = build_explicit_subsolution(Grid{c.dom, 64, 4, 16}, kDp, c.ct);
        const auto th = chi_threshold(sub);
        for (double t : {0.0, 0.3, 0.75}) {
            // dense scan of the closed form as oracle
            double sup = 0.0;
            for (int i = 0; i <= 200000; ++i) {
                const double r = c.dom.delta + (c.dom.R - c.dom.delta) * i / 200000.0;
                sup = std::max(sup, closed_energy(r, c.ct.value(t), c.ct.deriv(t), 2.0));
            }
            EXPECT_NEAR(th.at(t), 2 * sup, 1e-9 * (1 + sup)) << c.dom.delta << " " << t;
        }
    }
    // chi~ -> 0 leaves e = r^gamma
    const auto sub = build_explicit_subsolution(Grid{Domain{0.5, 1.5, 1.0, 1.0}, 64, 4, 4}, kDp, ChiTilde::constant(1e-9));
    EXPECT_NEAR(chi_threshold(sub).sup(), 2 * 1.5 * 1.5, 1e-9);
    // the narrow strip closes at the right endpoint
    const auto narrow = build_explicit_subsolution(Grid{Domain{0.9, 1.1, 1.0, 1.0}, 64, 4, 4}, kDp, ChiTilde::constant(1.0));
    EXPECT_NEAR(chi_threshold(narrow).sup(), 2 * closed_energy(1.1, 1.0, 0.0, 2.0), 1e-12);
}

class Validate : public ::testing::Test {
protected:
    static void SetUpTestSuite() { grid_ = new Grid{Domain{}, 64, 64, 32}; }
    static void TearDownTestSuite() { delete grid_; }
    static Grid* grid_;
};
Grid* Validate::grid_ = nullptr;

TEST_F(Validate, PassesAboveThresholdWithExpectedMargin) {
    const auto sub = explicit_with_chi(*grid_, 8.8);
    const auto rep = validate_subsolution(sub, *sub.chi);
    EXPECT_TRUE(rep.passed());
    EXPECT_NEAR(rep.find("energy_margin")->value, 0.05 * 8.0, 1e-12);
    EXPECT_NEAR(rep.data["margin_at"]["r"].get<double>(), 2.0, 1e-12);
    EXPECT_EQ(rep.find("boundary_m_r")->value, 0.0);
    EXPECT_LE(rep.find("q_consistency")->value, 1e-12);
}

TEST_F(Validate, FailsBelowThreshold) {
    for (double chi : {7.0, 4.0}) {
        const auto sub = explicit_with_chi(*grid_, chi);
        const auto rep = validate_subsolution(sub, *sub.chi);
        EXPECT_FALSE(rep.passed());
        EXPECT_FALSE(rep.find("energy_margin")->pass);
        EXPECT_LT(rep.find("energy_margin")->value, 0.0);
    }
}

TEST_F(Validate, MonotoneInChi) {
    bool seen_pass = false;
    for (double chi = 6.0; chi <= 10.0; chi += 0.25) {
        const auto sub = explicit_with_chi(*grid_, chi);
        const bool pass = validate_subsolution(sub, *sub.chi).find("energy_margin")->pass;
        if (seen_pass) EXPECT_TRUE(pass) << chi;
        seen_pass = seen_pass || pass;
        EXPECT_EQ(pass, chi > 8.0) << chi;
    }
}

TEST_F(Validate, ZeroStateFailsMomentumRow) {
    const Grid& g = *grid_;
    SubsolutionState sub;
    sub.m = GridField(g, Rank::Vec2);
    sub.U = GridField(g, Rank::Sym2Traceless);
    sub.q = GridField::sample(g, Rank::Scalar, [](double r, double, double, double* o) { o[0] = r * r + 2.0; });
    sub.dp = kDp;
    const auto rep = validate_subsolution(sub, ChiProfile::constant(4.0, 1.0));
    EXPECT_TRUE(rep.find("energy_margin")->pass);
    EXPECT_TRUE(rep.find("divergence_weak_residual")->pass);
    EXPECT_FALSE(rep.find("momentum_weak_residual")->pass);
    EXPECT_FALSE(rep.passed());
}

TEST_F(Validate, GridMismatch) {
    auto sub = explicit_with_chi(*grid_, 9.0);
    sub.q = GridField(Grid{Domain{}, 32, 64, 32}, Rank::Scalar);
    try {
        validate_subsolution(sub, *sub.chi);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
    }
}

TEST(Subsolution, TargetStateGap) {
    const Grid g{Domain{}, 256, 4, 2};
    auto sub = explicit_with_chi(g, 9.0);
    const auto ts = target_state(sub, *sub.chi);
    // 9 * 1.875 - 2.625
    EXPECT_NEAR(ts.gap0, 14.25, 2 * g.hr() * g.hr());
    EXPECT_NEAR(ts.target(10, 1, 1), 9.0 * g.r(10), 1e-13);

    auto zero = build_explicit_subsolution(g, kDp, ChiTilde::constant(1e-12));
    attach_chi(zero, ChiProfile::constant(9.0, 1.0));
    EXPECT_NEAR(target_state(zero, *zero.chi).gap0, 9.0 * 1.875, 1e-9);
}

TEST(Subsolution, EnergyGapPositiveForAdmittedChi) {
    const Grid g{Domain{}, 64, 8, 8};
    for (double chi : {8.01, 8.8, 12.0, 40.0}) {
        auto sub = explicit_with_chi(g, chi);
        const auto ts = target_state(sub, *sub.chi);
        EXPECT_GT(ts.gap0, 0.0);
    }
}

TEST(Subsolution, AttachChiSetsQ) {
    const Grid g{Domain{}, 8, 4, 4};
    auto sub = build_explicit_subsolution(g, kDp, ChiTilde::constant(1.0));
    EXPECT_DOUBLE_EQ(sub.q(3, 1, 2), g.r(3) * g.r(3));
    attach_chi(sub, ChiProfile::constant(6.0, 1.0));
    EXPECT_DOUBLE_EQ(sub.q(3, 1, 2), g.r(3) * g.r(3) + 3.0);
}

// Grid weak residual of the explicit triple, refined in t.
TEST(Subsolution, WeakResidualSecondOrder) {
    const auto study = test_support::explicit_order_study();
    ASSERT_EQ(study.orders.size(), 2u);
    for (double p : study.orders) EXPECT_NEAR(p, 2.0, 0.3);
    EXPECT_LT(study.errors.back(), 1e-4);
}
