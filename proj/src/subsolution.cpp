#include "wild_euler/subsolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace we {

ChiTilde ChiTilde::constant(double c) {
    ChiTilde ct;
    ct.kind = Kind::constant;
    ct.c0 = c;
    return ct;
}

ChiTilde ChiTilde::cosine(double c0, double amp, double freq) {
    ChiTilde ct;
    ct.kind = Kind::cosine;
    ct.c0 = c0;
    ct.amp = amp;
    ct.freq = freq;
    return ct;
}

ChiTilde ChiTilde::sampled(std::vector<double> t, std::vector<double> values, std::vector<double> derivs) {
    ChiTilde ct;
    ct.kind = Kind::sampled;
    ct.t = std::move(t);
    ct.values = std::move(values);
    ct.derivs = std::move(derivs);
    return ct;
}

namespace {

ChiProfile as_profile(const ChiTilde& ct) {
    ChiProfile p;
    p.t = ct.t;
    p.chi = ct.values;
    p.dchi = ct.derivs;
    return p;
}

}  // namespace

double ChiTilde::value(double time) const {
    switch (kind) {
        case Kind::constant: return c0;
        case Kind::cosine: return c0 + amp * std::cos(2.0 * std::numbers::pi * freq * time);
        case Kind::sampled: return as_profile(*this).value_at(time);
    }
    return c0;
}

double ChiTilde::deriv(double time) const {
    switch (kind) {
        case Kind::constant: return 0.0;
        case Kind::cosine:
            return -2.0 * std::numbers::pi * freq * amp * std::sin(2.0 * std::numbers::pi * freq * time);
        case Kind::sampled: return as_profile(*this).derivative_at(time);
    }
    return 0.0;
}

void ChiTilde::validate(double T) const {
    switch (kind) {
        case Kind::constant:
            if (!(c0 > 0.0)) throw Error(ErrorCode::InvalidField, "chi_tilde must be positive");
            break;
        case Kind::cosine:
            if (!(c0 - std::abs(amp) > 0.0)) throw Error(ErrorCode::InvalidField, "chi_tilde must be positive");
            break;
        case Kind::sampled: {
            as_profile(*this).validate();
            if (t.front() > 0.0 || t.back() < T) throw Error(ErrorCode::InvalidField, "chi_tilde samples must cover [0,T]");
            for (double v : values)
                if (!(v > 0.0)) throw Error(ErrorCode::InvalidField, "chi_tilde must be positive");
            break;
        }
    }
}

State<double> explicit_state(double r, double t, const DensityPressure<double>& dp, const ChiTilde& ct, double chi) {
    State<double> s;
    s.m << 0.0, ct.value(t) * r;
    // U_rz = -chi_tilde' * int_0^r s ds with the integral taken exactly.
    s.U = {-dp.p(r), -ct.deriv(t) * r * r / 2.0};
    s.q = dp.p(r) + chi / 2.0;
    return s;
}

double explicit_energy(double r, double t, const DensityPressure<double>& dp, const ChiTilde& ct) {
    return energy_e(DensityPressure<double>::rho0(r), explicit_state(r, t, dp, ct, 0.0));
}

Eigen::Vector3d explicit_strong_residual(double r, double, double t, const DensityPressure<double>& dp,
                                         const ChiTilde& ct) {
    const double dc = ct.deriv(t);
    // d_t m, d_r U_rr, d_z U_rz, d_r q for the r row; d_t m_z, d_r U_rz, d_z U_zz, d_z q for the z row.
    const double dt_mr = 0.0, dr_Urr = -dp.dp(r), dz_Urz = 0.0, dr_q = dp.dp(r);
    const double dt_mz = dc * r, dr_Urz = -dc * r, dz_Uzz = 0.0, dz_q = 0.0;
    const double dr_mr = 0.0, dz_mz = 0.0;
    return {dt_mr + dr_Urr + dz_Urz + dr_q, dt_mz + dr_Urz + dz_Uzz + dz_q, dr_mr + dz_mz};
}

SubsolutionState build_explicit_subsolution(const Grid& grid, const DensityPressure<double>& dp, const ChiTilde& ct) {
    grid.validate();
    ct.validate(grid.domain.T);
    if (!(dp.gamma > 1.0)) throw Error(ErrorCode::InvalidField, "gamma must exceed 1");
    SubsolutionState sub;
    sub.dp = dp;
    sub.analytic = true;
    sub.chi_tilde = ct;
    sub.m = GridField::sample(grid, Rank::Vec2, [&](double r, double, double t, double* o) {
        o[0] = 0.0;
        o[1] = ct.value(t) * r;
    });
    sub.U = GridField::sample(grid, Rank::Sym2Traceless, [&](double r, double, double t, double* o) {
        o[0] = -dp.p(r);
        o[1] = -ct.deriv(t) * r * r / 2.0;
    });
    sub.q = GridField::sample(grid, Rank::Scalar, [&](double r, double, double, double* o) { o[0] = dp.p(r); });
    return sub;
}

void attach_chi(SubsolutionState& sub, const ChiProfile& chi) {
    chi.validate();
    const Grid& g = sub.grid();
    if (sub.chi) {
        for (int k = 0; k < g.n_t(); ++k) {
            const double old = sub.chi->value_at(g.t(k)) / 2.0;
            for (int j = 0; j < g.nz; ++j)
                for (int i = 0; i < g.n_r(); ++i) sub.q(i, j, k) -= old;
        }
    }
    for (int k = 0; k < g.n_t(); ++k) {
        const double half = chi.value_at(g.t(k)) / 2.0;
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.n_r(); ++i) sub.q(i, j, k) += half;
    }
    sub.chi = chi;
}

double ThresholdCurve::sup() const {
    double s = 0.0;
    for (double v : value) s = std::max(s, v);
    return s;
}

namespace {

// Maximum of e(r) over the grid nodes, refined by golden section around an interior maximiser.
double sup_energy_explicit(const Grid& g, const DensityPressure<double>& dp, const ChiTilde& ct, double t) {
    int best = 0;
    double emax = -1.0;
    for (int i = 0; i < g.n_r(); ++i) {
        const double e = explicit_energy(g.r(i), t, dp, ct);
        if (e > emax) {
            emax = e;
            best = i;
        }
    }
    emax = std::max({emax, explicit_energy(g.domain.delta, t, dp, ct), explicit_energy(g.domain.R, t, dp, ct)});
    if (best > 0 && best < g.nr) {
        double a = g.r(best - 1), b = g.r(best + 1);
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = explicit_energy(x1, t, dp, ct), f2 = explicit_energy(x2, t, dp, ct);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = explicit_energy(x2, t, dp, ct);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = explicit_energy(x1, t, dp, ct);
            }
        }
        emax = std::max({emax, f1, f2});
    }
    return emax;
}

double sup_energy_grid(const SubsolutionState& sub, int k) {
    const Grid& g = sub.grid();
    double emax = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.n_r(); ++i) {
            State<double> s;
            s.m << sub.m(i, j, k, 0), sub.m(i, j, k, 1);
            s.U = {sub.U(i, j, k, 0), sub.U(i, j, k, 1)};
            emax = std::max(emax, energy_e(DensityPressure<double>::rho0(g.r(i)), s));
        }
    return emax;
}

}  // namespace

ThresholdCurve chi_threshold(const SubsolutionState& sub) {
    const Grid g = sub.grid();
    ThresholdCurve c;
    if (sub.analytic && sub.chi_tilde) {
        const DensityPressure<double> dp = sub.dp;
        const ChiTilde ct = *sub.chi_tilde;
        c.at = [g, dp, ct](double t) { return 2.0 * sup_energy_explicit(g, dp, ct, t); };
        for (int k = 0; k < g.n_t(); ++k) {
            c.t.push_back(g.t(k));
            c.value.push_back(c.at(g.t(k)));
        }
        return c;
    }
    for (int k = 0; k < g.n_t(); ++k) {
        c.t.push_back(g.t(k));
        c.value.push_back(2.0 * sup_energy_grid(sub, k));
    }
    const auto ts = c.t;
    const auto vs = c.value;
    c.at = [ts, vs](double t) {
        if (ts.size() == 1 || t <= ts.front()) return vs.front();
        if (t >= ts.back()) return vs.back();
        const auto it = std::upper_bound(ts.begin(), ts.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
        const double s = (t - ts[i]) / (ts[i + 1] - ts[i]);
        return (1 - s) * vs[i] + s * vs[i + 1];
    };
    return c;
}

FieldSet momentum_fields(const SubsolutionState& sub) {
    FieldSet fs;
    fs.grid.emplace("m", sub.m);
    fs.grid.emplace("U", sub.U);
    fs.grid.emplace("q", sub.q);
    fs.gamma = sub.dp.gamma;
    return fs;
}

VerificationReport validate_subsolution(const SubsolutionState& sub, const ChiProfile& chi, const ValidateOptions& opt) {
    const Grid& g = sub.grid();
    if (!(sub.U.grid() == g) || !(sub.q.grid() == g)) throw Error(ErrorCode::GridMismatch, "m, U, q grids differ");
    if (sub.m.rank() != Rank::Vec2 || sub.U.rank() != Rank::Sym2Traceless || sub.q.rank() != Rank::Scalar)
        throw Error(ErrorCode::InvalidField, "subsolution fields have the wrong rank");
    chi.validate();
    if (chi.T() < g.domain.T * (1 - 1e-12)) throw Error(ErrorCode::GridMismatch, "chi profile does not cover [0,T]");

    VerificationReport rep;
    rep.name = "subsolution";
    const DensityPressure<double>& dp = sub.dp;

    // Linear system, momentum rows.
    BumpOptions bo;
    bo.vector_valued = true;
    const auto vec_bumps = random_bumps(g.domain, opt.n_tests, opt.seed, bo);
    std::vector<TestFunction> vt(vec_bumps.begin(), vec_bumps.end());
    const auto mom = weak_residual(WeakForm::CompressibleMomentum, momentum_fields(sub), vt);
    double mom_max = 0.0, mom_rel = 0.0;
    nlohmann::ordered_json mom_list = nlohmann::ordered_json::array();
    for (const auto& r : mom) {
        mom_max = std::max(mom_max, std::abs(r.value));
        mom_rel = std::max(mom_rel, std::abs(r.value) / (1.0 + r.scale));
        mom_list.push_back(r.value);
    }
    rep.add("momentum_weak_residual", mom_rel <= opt.residual_tol, mom_rel, opt.residual_tol, "linear system momentum");

    // Divergence row through the continuity form with rho0 = r exact.
    bo.vector_valued = false;
    const auto sc_bumps = random_bumps(g.domain, opt.n_tests, opt.seed + 1, bo);
    std::vector<TestFunction> st(sc_bumps.begin(), sc_bumps.end());
    FieldSet cont;
    cont.grid.emplace("m", sub.m);
    cont.analytic.emplace("rho", [](double r, double, double) { return DensityPressure<double>::rho0(r); });
    const auto div = weak_residual(WeakForm::CompressibleContinuity, cont, st);
    double div_rel = 0.0;
    for (const auto& r : div) div_rel = std::max(div_rel, std::abs(r.value) / (1.0 + r.scale));
    rep.add("divergence_weak_residual", div_rel <= opt.residual_tol, div_rel, opt.residual_tol, "linear system divergence");

    // Slip condition.
    double mr_bdry = 0.0;
    for (int k = 0; k < g.n_t(); ++k)
        for (int j = 0; j < g.nz; ++j)
            mr_bdry = std::max({mr_bdry, std::abs(sub.m(0, j, k, 0)), std::abs(sub.m(g.nr, j, k, 0))});
    const double mr_tol = sub.analytic ? 0.0 : 1e-12;
    rep.add("boundary_m_r", mr_bdry <= mr_tol, mr_bdry, mr_tol, "slip boundary");

    // Energy margin and q consistency.
    double margin = std::numeric_limits<double>::infinity(), q_err = 0.0;
    double arg_r = 0.0, arg_t = 0.0;
    for (int k = 0; k < g.n_t(); ++k) {
        const double c = chi.value_at(g.t(k));
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.n_r(); ++i) {
                const double r = g.r(i);
                State<double> s;
                s.m << sub.m(i, j, k, 0), sub.m(i, j, k, 1);
                s.U = {sub.U(i, j, k, 0), sub.U(i, j, k, 1)};
                const double mg = c / 2.0 - energy_e(DensityPressure<double>::rho0(r), s);
                if (mg < margin) {
                    margin = mg;
                    arg_r = r;
                    arg_t = g.t(k);
                }
                const double qf = dp.p(r) + c / 2.0;
                q_err = std::max(q_err, std::abs(sub.q(i, j, k) - qf) / (1.0 + std::abs(qf)));
            }
    }
    rep.add("energy_margin", margin > 0.0, margin, 0.0, "e < chi/2");
    rep.add("q_consistency", q_err <= 1e-12, q_err, 1e-12, "q = p + chi/2");

    // Strict energy gap at t = 0.
    double m2 = 0.0, rc = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.n_r(); ++i) {
            const double w = ((i == 0 || i == g.nr) ? 0.5 : 1.0) * g.hr() * g.hz();
            m2 += w * (sub.m(i, j, 0, 0) * sub.m(i, j, 0, 0) + sub.m(i, j, 0, 1) * sub.m(i, j, 0, 1));
            rc += w * g.r(i) * chi.value_at(0.0);
        }
    rep.add("energy_gap_positive", m2 < rc, rc - m2, 0.0, "int |m|^2 < int rho0 chi");

    rep.data["momentum_residuals"] = mom_list;
    rep.data["momentum_residual_max"] = mom_max;
    rep.data["margin_at"] = {{"r", arg_r}, {"t", arg_t}};
    rep.data["chi0"] = chi.value_at(0.0);
    return rep;
}

TargetState target_state(const SubsolutionState& sub, const ChiProfile& chi) {
    const Grid& g = sub.grid();
    TargetState ts;
    ts.target = GridField::sample(g, Rank::Scalar, [&](double r, double, double t, double* o) {
        o[0] = DensityPressure<double>::rho0(r) * chi.value_at(t);
    });
    GridField gap(g.slice(), Rank::Scalar);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.n_r(); ++i) {
            const double mr = sub.m(i, j, 0, 0), mz = sub.m(i, j, 0, 1);
            gap(i, j, 0) = ts.target(i, j, 0) - (mr * mr + mz * mz);
        }
    ts.gap0 = integrate(gap, 0, Weight::one);
    return ts;
}

}  // namespace we
