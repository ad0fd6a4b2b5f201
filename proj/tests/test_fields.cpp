#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "wild_euler/fields.hpp"
#include "wild_euler/rng.hpp"

using namespace we;

namespace {

const Domain kDom{};  // delta 0.5, R 2, z_period 1, T 1

GridField scalar_field(const Grid& g, double (*fn)(double, double, double)) {
    return GridField::sample(g, Rank::Scalar, [fn](double r, double z, double t, double* out) { out[0] = fn(r, z, t); });
}

double max_err_dz_sin(int nz) {
    const Grid g{kDom, 8, nz, 4};
    const auto f = scalar_field(g, [](double, double z, double) { return std::sin(2 * std::numbers::pi * z); });
    const auto d = fd_derivative(f, Axis::z);
    double e = 0.0;
    for (int j = 0; j < g.nz; ++j)
        e = std::max(e, std::abs(d(3, j, 1) - 2 * std::numbers::pi * std::cos(2 * std::numbers::pi * g.z(j))));
    return e;
}

}  // namespace

TEST(Fields, DomainValidation) {
    EXPECT_NO_THROW(kDom.validate());
    for (const Domain bad : {Domain{0.0, 2.0, 1.0, 1.0}, Domain{2.0, 2.0, 1.0, 1.0}, Domain{0.5, 2.0, 0.0, 1.0},
                             Domain{0.5, 2.0, 1.0, -1.0}, Domain{0.5, NAN, 1.0, 1.0}}) {
        try {
            bad.validate();
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidDomain);
        }
    }
}

TEST(Fields, GridSpacingAndPeriodicNodes) {
    const Grid g{kDom, 128, 64, 32};
    EXPECT_DOUBLE_EQ(g.hr(), 1.5 / 128);
    EXPECT_DOUBLE_EQ(g.hz(), 1.0 / 64);
    EXPECT_DOUBLE_EQ(g.ht(), 1.0 / 32);
    EXPECT_DOUBLE_EQ(g.r(0), 0.5);
    EXPECT_DOUBLE_EQ(g.r(128), 2.0);
    EXPECT_DOUBLE_EQ(g.z(0), 0.5 / 64);
}

TEST(Fields, NonFiniteSamplesRejected) {
    GridField f(Grid{kDom, 4, 4, 4}, Rank::Scalar);
    EXPECT_NO_THROW(f.check_finite());
    f(1, 2, 3) = NAN;
    EXPECT_THROW(f.check_finite(), Error);
}

TEST(Fields, DerivativeOfConstantAndLinear) {
    const Grid g{kDom, 16, 8, 8};
    const auto c = scalar_field(g, [](double, double, double) { return 3.0; });
    for (Axis a : {Axis::r, Axis::z, Axis::t}) EXPECT_LT(fd_derivative(c, a).max_abs(0), 1e-12);
    const auto lin = scalar_field(g, [](double r, double, double) { return r; });
    const auto d = fd_derivative(lin, Axis::r);
    for (int i = 0; i < g.n_r(); ++i) EXPECT_NEAR(d(i, 3, 2), 1.0, 1e-12);
    const auto lt = scalar_field(g, [](double, double, double t) { return 2 * t - 1; });
    const auto dt = fd_derivative(lt, Axis::t);
    for (int k = 0; k < g.n_t(); ++k) EXPECT_NEAR(dt(5, 1, k), 2.0, 1e-12);
}

TEST(Fields, DerivativeOneSidedIsSecondOrder) {
    // r^3: boundary stencils are exact for quadratics only
    auto err = [](int nr) {
        const Grid g{kDom, nr, 4, 4};
        const auto f = scalar_field(g, [](double r, double, double) { return r * r * r; });
        const auto d = fd_derivative(f, Axis::r);
        double e = 0.0;
        for (int i = 0; i < g.n_r(); ++i) e = std::max(e, std::abs(d(i, 0, 0) - 3 * g.r(i) * g.r(i)));
        return e;
    };
    const double p = std::log2(err(32) / err(64));
    EXPECT_NEAR(p, 2.0, 0.1);
}

TEST(Fields, PeriodicDerivativeOrder) {
    const double e1 = max_err_dz_sin(64), e2 = max_err_dz_sin(128), e3 = max_err_dz_sin(256);
    EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1);
    EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.1);
    EXPECT_NEAR(e1 / e2, 4.0, 1.0);
}

TEST(Fields, DerivativeNeedsFourIntervals) {
    GridField f(Grid{kDom, 3, 8, 8}, Rank::Scalar);
    try {
        fd_derivative(f, Axis::r);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GridTooCoarse);
    }
    EXPECT_NO_THROW(fd_derivative(f, Axis::z));
}

TEST(Fields, IntegrateExamples) {
    const Grid g{kDom, 64, 64, 0};
    const auto one = scalar_field(g, [](double, double, double) { return 1.0; });
    EXPECT_NEAR(integrate(one, 0, Weight::one), 1.5, 1e-14);
    EXPECT_NEAR(integrate(one, 0, Weight::r), 1.875, 1e-14);

    auto err = [](int n) {
        const Grid gg{kDom, n, n, 0};
        const auto f = scalar_field(gg, [](double r, double z, double) {
            const double s = std::sin(2 * std::numbers::pi * z);
            return r * r * s * s;
        });
        // int r^2 sin^2 = (R^3 - delta^3) / 6
        return std::abs(integrate(f, 0, Weight::one) - (8.0 - 0.125) / 6.0);
    };
    const double e1 = err(32), e2 = err(64);
    EXPECT_LT(e1, 1e-3);
    EXPECT_NEAR(e1 / e2, 4.0, 1.0);

    const auto rs = scalar_field(g, [](double r, double z, double) {
        const double s = std::sin(2 * std::numbers::pi * z);
        return r * s * s;
    });
    EXPECT_NEAR(integrate(rs, 0, Weight::one), 0.9375, 1e-12);  // trapezoid exact for linear r
}

TEST(Fields, CsvLayout) {
    const Grid g{kDom, 2, 2, 1};
    const auto f = scalar_field(g, [](double r, double z, double t) { return r + 10 * z + 100 * t; });
    const std::string csv = to_csv(f, {"f"});
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "r,z,t,f");
    std::getline(in, line);
    EXPECT_EQ(line, "0.5,0.25,0,3");
    std::getline(in, line);
    EXPECT_EQ(line.substr(0, 9), "1.25,0.25");  // r inner
    int rows = 2;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3 * 2 * 2);
    EXPECT_NE(to_csv(scalar_field(g, [](double, double, double) { return 0.1; }), {"f"}).find("0.10000000000000001"),
              std::string::npos);
}

TEST(Fields, BumpProfile) {
    EXPECT_DOUBLE_EQ(BumpTestFn::profile(0.0), std::exp(-1.0));
    EXPECT_EQ(BumpTestFn::profile(1.0), 0.0);
    EXPECT_EQ(BumpTestFn::profile(-1.5), 0.0);
    EXPECT_EQ(BumpTestFn::dprofile(1.0), 0.0);
    // derivatives against central differences
    for (double s : {-0.7, -0.2, 0.3, 0.8}) {
        const double h = 1e-5;
        EXPECT_NEAR(BumpTestFn::dprofile(s), (BumpTestFn::profile(s + h) - BumpTestFn::profile(s - h)) / (2 * h), 1e-7);
        EXPECT_NEAR(BumpTestFn::d2profile(s), (BumpTestFn::dprofile(s + h) - BumpTestFn::dprofile(s - h)) / (2 * h),
                    1e-6);
    }
}

TEST(Fields, BumpSupportRules) {
    BumpTestFn b;
    b.rc = 0.6;
    b.ar = 0.3;
    EXPECT_THROW(b.validate(kDom), Error);  // crosses r = delta
    b.rc = 1.2;
    b.tc = 0.9;
    b.at = 0.2;
    EXPECT_THROW(b.validate(kDom), Error);  // reaches t = T
    b.tc = 0.0;
    EXPECT_NO_THROW(b.validate(kDom));      // touching t = 0 is allowed
    b.rc = 3.0;
    EXPECT_TRUE(b.disjoint_from(kDom));
    EXPECT_NO_THROW(b.validate(kDom));
}

TEST(Fields, RandomBumpsAreValidAndReproducible) {
    const auto a = random_bumps(kDom, 50, 9), b = random_bumps(kDom, 50, 9);
    ASSERT_EQ(a.size(), 50u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NO_THROW(a[i].validate(kDom));
        EXPECT_EQ(a[i].rc, b[i].rc);
        EXPECT_EQ(a[i].dir, b[i].dir);
    }
}

TEST(Fields, WeakFormTags) {
    EXPECT_EQ(parse_weak_form("axisym-momentum"), WeakForm::AxisymMomentum);
    EXPECT_STREQ(to_string(WeakForm::Burgers), "burgers");
    for (WeakForm f : {WeakForm::CompressibleContinuity, WeakForm::CompressibleMomentum, WeakForm::AxisymMomentum,
                       WeakForm::AxisymDivergence, WeakForm::CompressibleEnergy, WeakForm::AxisymEnergy,
                       WeakForm::Burgers})
        EXPECT_EQ(parse_weak_form(to_string(f)), f);
    try {
        parse_weak_form("navier-stokes");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownWeakForm);
    }
}

class WeakResidual : public ::testing::Test {
protected:
    Grid g{kDom, 32, 32, 16};
    FieldSet zero_momentum() const {
        FieldSet fs;
        fs.grid.emplace("m", GridField(g, Rank::Vec2));
        fs.grid.emplace("U", GridField(g, Rank::Sym2Traceless));
        fs.grid.emplace("q", GridField(g, Rank::Scalar));
        return fs;
    }
    FieldSet smooth_momentum() const {
        FieldSet fs;
        fs.grid.emplace("m", GridField::sample(g, Rank::Vec2, [](double r, double z, double t, double* o) {
            o[0] = std::sin(2 * std::numbers::pi * z) * (1 + t);
            o[1] = r * r - t;
        }));
        fs.grid.emplace("U", GridField::sample(g, Rank::Sym2Traceless, [](double r, double z, double, double* o) {
            o[0] = r * z;
            o[1] = std::cos(2 * std::numbers::pi * z);
        }));
        fs.grid.emplace("q", GridField::sample(g, Rank::Scalar, [](double r, double, double t, double* o) { o[0] = r + t; }));
        return fs;
    }
};

TEST_F(WeakResidual, ZeroFieldsGiveZero) {
    const auto bumps = random_bumps(kDom, 5, 3);
    std::vector<TestFunction> tests(bumps.begin(), bumps.end());
    for (const auto& r : weak_residual(WeakForm::CompressibleMomentum, zero_momentum(), tests)) {
        EXPECT_EQ(r.value, 0.0);
        EXPECT_EQ(r.scale, 0.0);
    }
}

TEST_F(WeakResidual, SupportOutsideGivesExactZero) {
    BumpTestFn b;
    b.vector_valued = true;
    b.rc = 5.0;
    const auto r = weak_residual(WeakForm::CompressibleMomentum, smooth_momentum(), {TestFunction(b)});
    EXPECT_EQ(r[0].value, 0.0);
}

TEST_F(WeakResidual, LinearInTestFunction) {
    const auto bumps = random_bumps(kDom, 2, 4);
    TestFunction combo;
    combo.terms = {{2.5, bumps[0]}, {-0.75, bumps[1]}};
    const FieldSet fs = smooth_momentum();
    const auto parts = weak_residual(WeakForm::CompressibleMomentum, fs, {bumps[0], bumps[1]});
    const auto whole = weak_residual(WeakForm::CompressibleMomentum, fs, {combo});
    const double expect = 2.5 * parts[0].value - 0.75 * parts[1].value;
    EXPECT_NEAR(whole[0].value, expect, 1e-12 * (1 + std::abs(expect)));
}

TEST_F(WeakResidual, MissingFieldAndWrongTestKind) {
    FieldSet fs;
    fs.grid.emplace("m", GridField(g, Rank::Vec2));
    const auto bumps = random_bumps(kDom, 1, 4);
    EXPECT_THROW(weak_residual(WeakForm::CompressibleMomentum, fs, {bumps[0]}), Error);
    BumpOptions scalar_opt;
    scalar_opt.vector_valued = false;
    const auto sb = random_bumps(kDom, 1, 4, scalar_opt);
    EXPECT_THROW(weak_residual(WeakForm::CompressibleMomentum, zero_momentum(), {sb[0]}), Error);
}

TEST_F(WeakResidual, GridMismatch) {
    FieldSet fs = zero_momentum();
    fs.grid.erase("q");
    fs.grid.emplace("q", GridField(Grid{kDom, 16, 32, 16}, Rank::Scalar));
    const auto bumps = random_bumps(kDom, 1, 4);
    try {
        weak_residual(WeakForm::CompressibleMomentum, fs, {bumps[0]});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
    }
}

// Divergence-free field from a stream function, rho = r time independent.
TEST_F(WeakResidual, ContinuityOfStreamFunctionFieldIsSmall) {
    auto res = [](int n) {
        const Grid gg{kDom, n, n, n / 2};
        FieldSet fs;
        // psi = sin^2(pi (r - delta) / 1.5) cos(2 pi z): m = (-psi_z, psi_r)
        fs.grid.emplace("m", GridField::sample(gg, Rank::Vec2, [](double r, double z, double, double* o) {
            const double k = std::numbers::pi / 1.5, s = std::sin(k * (r - 0.5));
            o[0] = s * s * 2 * std::numbers::pi * std::sin(2 * std::numbers::pi * z);
            o[1] = 2 * s * std::cos(k * (r - 0.5)) * k * std::cos(2 * std::numbers::pi * z);
        }));
        fs.analytic.emplace("rho", [](double r, double, double) { return r; });
        BumpOptions opt;
        opt.vector_valued = false;
        const auto bumps = random_bumps(kDom, 6, 2, opt);
        double worst = 0.0;
        for (const auto& r : weak_residual(WeakForm::CompressibleContinuity, fs,
                                           std::vector<TestFunction>(bumps.begin(), bumps.end())))
            worst = std::max(worst, std::abs(r.value));
        return worst;
    };
    // smooth compactly supported integrands: the product rule converges faster than h^2
    const double e32 = res(32), e64 = res(64), e128 = res(128);
    EXPECT_GT(std::log2(e32 / e64), 4.0);
    EXPECT_GT(std::log2(e64 / e128), 4.0);
    EXPECT_LT(e128, 1e-7);
}
