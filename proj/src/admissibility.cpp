#include "wild_euler/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace we {

double chi_ode_rhs(double chi, const Domain& dom, const DensityPressure<double>& dp) {
    dom.validate();
    if (chi < 0.0) throw Error(ErrorCode::NegativeChi, "chi must be nonnegative");
    const double sR = std::sqrt(dom.R);
    const double M = std::max(std::pow(dom.R, dp.gamma - 2.0), std::pow(dom.delta, dp.gamma - 2.0));
    const double sc = std::sqrt(chi);
    return -2.0 * (sR * dp.gamma * M * sc + sR / (2.0 * dom.delta * dom.delta) * chi * sc);
}

const char* to_string(Limiting l) {
    switch (l) {
        case Limiting::threshold_cross: return "threshold-cross";
        case Limiting::chi_extinction: return "chi-extinction";
        case Limiting::horizon: return "horizon";
    }
    return "unknown";
}

namespace {

// chi' = -2 sqrt(chi) (A + B chi) is not Lipschitz at 0; in u = sqrt(chi) it is u' = -(A + B u^2), which is
// smooth through extinction. RK4 runs in u.
struct SqrtRhs {
    double A, B;

    SqrtRhs(const Domain& dom, const DensityPressure<double>& dp) {
        const double sR = std::sqrt(dom.R);
        A = sR * dp.gamma * std::max(std::pow(dom.R, dp.gamma - 2.0), std::pow(dom.delta, dp.gamma - 2.0));
        B = sR / (2.0 * dom.delta * dom.delta);
    }
    double operator()(double u) const { return -(A + B * u * u); }
    double step(double u, double h) const {
        const double k1 = (*this)(u);
        const double k2 = (*this)(u + 0.5 * h * k1);
        const double k3 = (*this)(u + 0.5 * h * k2);
        const double k4 = (*this)(u + h * k3);
        return u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
};

ChiProfile integrate_raw(double chi0, const Domain& dom, const DensityPressure<double>& dp, std::size_t n) {
    const SqrtRhs f(dom, dp);
    ChiProfile p;
    p.origin = ChiOrigin::ode;
    const double h = dom.T / static_cast<double>(n);
    p.t.resize(n + 1);
    p.chi.resize(n + 1);
    p.dchi.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) p.t[k] = k == n ? dom.T : h * static_cast<double>(k);
    p.chi[0] = chi0;
    double u = std::sqrt(chi0);
    bool dead = false;
    for (std::size_t k = 0; k < n; ++k) {
        if (dead) {
            p.chi[k + 1] = 0.0;
            continue;
        }
        const double y = f.step(u, h);
        if (!std::isfinite(y)) throw Error(ErrorCode::IntegrationDiverged, "non-finite chi");
        if (y > 0.0) {
            u = y;
            p.chi[k + 1] = y * y;
            continue;
        }
        // Extinction inside this step: bisect the sub-step length on the sign of a single step.
        double lo = 0.0, hi = h;
        for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + p.t[k]); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (f.step(u, mid) > 0.0) lo = mid;
            else hi = mid;
        }
        p.extinction = p.t[k] + lo;
        p.chi[k + 1] = 0.0;
        dead = true;
    }
    for (std::size_t k = 0; k <= n; ++k) p.dchi[k] = chi_ode_rhs(p.chi[k], dom, dp);
    return p;
}

}  // namespace

ChiProfile integrate_chi(double chi0, const Domain& dom, const DensityPressure<double>& dp, double dt) {
    dom.validate();
    if (!(chi0 > 0.0) || !std::isfinite(chi0)) throw Error(ErrorCode::NegativeChi, "chi0 must be positive");
    if (!(dt > 0.0)) throw Error(ErrorCode::InvalidField, "dt must be positive");
    if (!(dp.gamma > 1.0)) throw Error(ErrorCode::InvalidField, "gamma must exceed 1");
    const auto n = static_cast<std::size_t>(std::ceil(dom.T / dt - 1e-9));
    ChiProfile p = integrate_raw(chi0, dom, dp, std::max<std::size_t>(n, 1));
    const ChiProfile half = integrate_raw(chi0, dom, dp, 2 * std::max<std::size_t>(n, 1));
    double err = 0.0;
    for (std::size_t k = 0; k < p.t.size(); ++k) err = std::max(err, std::abs(p.chi[k] - half.chi[2 * k]));
    p.error_estimate = err * 16.0 / 15.0;
    return p;
}

FeasibilityWindow feasibility_window(const ChiProfile& profile, const std::function<double(double)>& threshold,
                                     double tol) {
    profile.validate();
    FeasibilityWindow w;
    for (std::size_t k = 0; k < profile.t.size(); ++k) {
        const double th = threshold(profile.t[k]);
        if (!std::isfinite(th)) throw Error(ErrorCode::InvalidField, "threshold not finite");
        w.t.push_back(profile.t[k]);
        w.margin.push_back(profile.chi[k] - th);
    }
    if (!(w.margin.front() > 0.0)) throw Error(ErrorCode::NoWindow, "chi does not exceed the threshold at t = 0");
    auto g = [&](double t) { return profile.value_at(t) - threshold(t); };
    std::size_t k = 1;
    while (k < w.t.size() && w.margin[k] > 0.0) ++k;
    w.margin_min = std::numeric_limits<double>::infinity();
    if (k == w.t.size()) {
        w.T_max = profile.T();
        w.limiting = Limiting::horizon;
    } else {
        double lo = w.t[k - 1], hi = w.t[k];
        while (hi - lo > tol * 1e-3) {
            const double mid = 0.5 * (lo + hi);
            if (g(mid) > 0.0) lo = mid;
            else hi = mid;
        }
        w.T_max = 0.5 * (lo + hi);
        w.limiting = Limiting::threshold_cross;
        if (profile.extinction && *profile.extinction <= w.T_max + tol) {
            w.T_max = std::min(w.T_max, *profile.extinction);
            w.limiting = Limiting::chi_extinction;
        }
    }
    for (std::size_t i = 0; i < w.t.size() && w.t[i] < w.T_max; ++i) w.margin_min = std::min(w.margin_min, w.margin[i]);
    return w;
}

VerificationReport pointwise_energy_condition(const SubsolutionState& sub, const ChiProfile& chi) {
    chi.validate();
    const Grid& g = sub.grid();
    const Domain& dom = g.domain;
    const DensityPressure<double>& dp = sub.dp;
    VerificationReport rep;
    rep.name = "pointwise_energy_condition";

    // Precondition |m|^2 <= rho0 chi on the grid.
    double bound = std::numeric_limits<double>::infinity();
    for (int k = 0; k < g.n_t(); ++k) {
        const double c = chi.value_at(g.t(k));
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.n_r(); ++i) {
                const double mr = sub.m(i, j, k, 0), mz = sub.m(i, j, k, 1);
                bound = std::min(bound, g.r(i) * c - (mr * mr + mz * mz));
            }
    }
    rep.add("momentum_bound", bound >= 0.0, bound, 0.0, "|m| <= sqrt(rho0 chi)");

    double slack = std::numeric_limits<double>::infinity(), worst_scale = 1.0;
    double at_r = 0.0, at_t = 0.0;
    for (std::size_t k = 0; k < chi.t.size(); ++k) {
        if (chi.t[k] > dom.T * (1 + 1e-12)) break;
        const double c = chi.chi[k], dc = chi.dchi[k];
        for (int i = 0; i < g.n_r(); ++i) {
            const double r = g.r(i);
            const double amp = std::sqrt(DensityPressure<double>::rho0(r) * c);
            const double t1 = 0.5 * dc;
            const double t2 = amp * std::abs(dp.dpi(r));  // |grad(eps + p/rho)| = gamma r^(gamma-2)
            const double t3 = 0.5 * c * amp / (r * r);   // |grad(1/rho)| = 1/r^2
            const double s = -(t1 + t2 + t3);
            if (s < slack) {
                slack = s;
                worst_scale = 1.0 + std::abs(t1) + t2 + t3;
                at_r = r;
                at_t = chi.t[k];
            }
        }
    }
    const double tol = 1e-12 * worst_scale;
    rep.add("energy_slack", slack >= -tol, slack, tol, "worst-case local energy inequality");
    rep.data["slack_at"] = {{"r", at_r}, {"t", at_t}};
    return rep;
}

VerificationReport equivalence_check(const SubsolutionState& sub, const std::vector<BumpTestFn>& tests,
                                     const EquivalenceOptions& opt) {
    const Grid& g = sub.grid();
    if (!(sub.U.grid() == g) || !(sub.q.grid() == g)) throw Error(ErrorCode::GridMismatch, "m, U, q grids differ");
    if (g.domain.delta < 1e-12) throw Error(ErrorCode::DegenerateDensity, "rho0 vanishes inside the domain");
    const DensityPressure<double> dp = sub.dp;

    // Compressible: grid part (m, U, q - p) plus p(rho0) integrated analytically.
    GridField qx = sub.q;
    for (int k = 0; k < g.n_t(); ++k)
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.n_r(); ++i) qx(i, j, k) -= dp.p(g.r(i));
    FieldSet comp;
    comp.gamma = dp.gamma;
    comp.grid.emplace("m", sub.m);
    comp.grid.emplace("U", sub.U);
    comp.grid.emplace("q", qx);
    comp.analytic.emplace("q", [dp](double r, double, double) { return dp.p(r); });

    // Axisymmetric: v = m / r, F = (U + (q - p) I) / r, pi analytic.
    GridField v(g, Rank::Vec2), F(g, Rank::Sym2);
    for (int k = 0; k < g.n_t(); ++k)
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.n_r(); ++i) {
                const double r = g.r(i);
                v(i, j, k, 0) = sub.m(i, j, k, 0) / r;
                v(i, j, k, 1) = sub.m(i, j, k, 1) / r;
                const double u = sub.U(i, j, k, 0), w = sub.U(i, j, k, 1), e = qx(i, j, k);
                F(i, j, k, 0) = (u + e) / r;
                F(i, j, k, 1) = w / r;
                F(i, j, k, 2) = (-u + e) / r;
            }
    FieldSet axi;
    axi.gamma = dp.gamma;
    axi.grid.emplace("v", v);
    axi.grid.emplace("F", F);
    axi.analytic.emplace("pi", [dp](double r, double, double) { return dp.pi(r); });

    std::vector<TestFunction> vt, st;
    for (auto b : tests) {
        b.vector_valued = true;
        vt.emplace_back(b);
        b.vector_valued = false;
        st.emplace_back(b);
    }
    const auto a = weak_residual(WeakForm::CompressibleMomentum, comp, vt);
    const auto b = weak_residual(WeakForm::AxisymMomentum, axi, vt);

    VerificationReport rep;
    rep.name = "equivalence";
    double agree = 0.0, res_c = 0.0, res_a = 0.0;
    nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({a[i].scale, b[i].scale, 1e-300});
        agree = std::max(agree, std::abs(a[i].value - b[i].value) / scale);
        res_c = std::max(res_c, std::abs(a[i].value) / (1.0 + a[i].scale));
        res_a = std::max(res_a, std::abs(b[i].value) / (1.0 + b[i].scale));
        pairs.push_back({a[i].value, b[i].value, scale});
    }
    rep.add("momentum_agreement", agree <= opt.agreement_tol, agree, opt.agreement_tol, "equivalence of weak solutions");
    rep.add("compressible_momentum_residual", res_c <= opt.residual_tol, res_c, opt.residual_tol, "compressible weak form");
    rep.add("axisym_momentum_residual", res_a <= opt.residual_tol, res_a, opt.residual_tol, "axisymmetric weak form");

    // Divergence: compressible continuity with rho0 exact, and the r-weighted divergence of v.
    FieldSet cont;
    cont.grid.emplace("m", sub.m);
    cont.analytic.emplace("rho", [](double r, double, double) { return DensityPressure<double>::rho0(r); });
    const auto dc = weak_residual(WeakForm::CompressibleContinuity, cont, st);
    FieldSet dv;
    dv.grid.emplace("v", v);
    const auto da = weak_residual(WeakForm::AxisymDivergence, dv, st);
    double div_c = 0.0, div_a = 0.0;
    for (std::size_t i = 0; i < dc.size(); ++i) {
        div_c = std::max(div_c, std::abs(dc[i].value) / (1.0 + dc[i].scale));
        div_a = std::max(div_a, std::abs(da[i].value) / (1.0 + da[i].scale));
    }
    rep.add("compressible_divergence_residual", div_c <= opt.residual_tol, div_c, opt.residual_tol, "div m = 0");
    rep.add("axisym_divergence_residual", div_a <= opt.residual_tol, div_a, opt.residual_tol, "div (r v) = 0");

    // Energy forms differ by the time integration by parts of rho0 eps(rho0) phi.
    FieldSet ec;
    ec.gamma = dp.gamma;
    ec.grid.emplace("m", sub.m);
    ec.analytic.emplace("rho", [](double r, double, double) { return DensityPressure<double>::rho0(r); });
    FieldSet ea;
    ea.gamma = dp.gamma;
    ea.grid.emplace("v", v);
    ea.analytic.emplace("pi", [dp](double r, double, double) { return dp.pi(r); });
    const auto Ec = weak_residual(WeakForm::CompressibleEnergy, ec, st);
    const auto Ea = weak_residual(WeakForm::AxisymEnergy, ea, st);
    const double ht2 = g.ht() * g.ht();
    double ibp = 0.0;
    nlohmann::ordered_json energy = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < Ec.size(); ++i) {
        ibp = std::max(ibp, std::abs(Ec[i].value - Ea[i].value) / (ht2 * (1.0 + Ec[i].scale)));
        energy.push_back({Ec[i].value, Ea[i].value});
    }
    rep.add("energy_ibp_identity", ibp <= 1.0, ibp, 1.0, "energy inequality equivalence");
    rep.data["momentum_pairs"] = pairs;
    rep.data["energy_pairs"] = energy;
    rep.data["tests"] = tests.size();
    return rep;
}

}  // namespace we
