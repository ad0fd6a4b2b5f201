#include "wild_euler/laminate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace we {

LaminateState make_laminate_state(const SubsolutionState& sub, double chi) {
    if (!(chi > 0.0) || !std::isfinite(chi)) throw Error(ErrorCode::NegativeChi, "laminate needs chi > 0");
    const Grid& g = sub.grid();
    LaminateState s;
    s.chi = chi;
    s.dp = sub.dp;
    s.m = sub.m.slice(0);
    s.m0 = s.m;
    s.U = sub.U.slice(0);
    const Grid sl = g.slice();
    s.psi = GridField(sl, Rank::Scalar);
    s.q = GridField::sample(sl, Rank::Scalar, [&](double r, double, double, double* o) { o[0] = sub.dp.p(r) + chi / 2.0; });
    if (sub.chi_tilde) {
        const double dc = sub.chi_tilde->deriv(0.0);
        s.dtm = GridField::sample(sl, Rank::Vec2, [&](double r, double, double, double* o) {
            o[0] = 0.0;
            o[1] = dc * r;
        });
    } else if (g.nt >= 4) {
        s.dtm = fd_derivative(sub.m, Axis::t).slice(0);
    } else {
        s.dtm = GridField(sl, Rank::Vec2);
    }
    return s;
}

namespace {

State<double> node_state(const LaminateState& s, int i, int j) {
    State<double> st;
    st.m << s.m(i, j, 0, 0), s.m(i, j, 0, 1);
    st.U = {s.U(i, j, 0, 0), s.U(i, j, 0, 1)};
    st.q = s.q(i, j, 0);
    return st;
}

double trap(int i, int n, double h) { return (i == 0 || i == n) ? 0.5 * h : h; }

struct WaveGeometry {
    Eigen::Vector2d kappa, K, e1, e2;
    double nK = 0.0;
};

WaveGeometry wave_geometry(const Grid& g, int N, double angle) {
    WaveGeometry w;
    w.kappa << std::cos(angle), std::sin(angle);
    // Wave vector seen by central differences, so the leading-order cancellation survives discretization.
    w.K << std::sin(N * w.kappa(0) * g.hr()) / g.hr(), std::sin(N * w.kappa(1) * g.hz()) / g.hz();
    w.nK = w.K.norm();
    w.e1 = w.K / w.nK;
    w.e2 << -w.e1(1), w.e1(0);
    return w;
}

State<double> direction_of(const WaveGeometry& w, double xi_t) {
    State<double> d;
    d.m = w.e2;
    d.U = {-2.0 * xi_t * w.e1(0) * w.e2(0), -xi_t * (w.e1(0) * w.e2(1) + w.e2(0) * w.e1(1))};
    d.q = 0.0;
    return d;
}

// Unit-amplitude perturbation fields of a step.
struct Wave {
    GridField psi, dm, ddtm, dU, eta;
};

Wave build_wave(const Grid& sl, const LaminateStep& st, bool with_time_parts) {
    const WaveGeometry w = wave_geometry(sl, st.N, st.angle);
    const double period = sl.domain.z_period;
    BumpTestFn cut;
    cut.rc = st.rc;
    cut.zc = st.zc;
    // peak value 1 at the centre
    const double norm = std::exp(2.0);
    auto eta_at = [&](double r, double z) {
        return norm * BumpTestFn::profile((r - st.rc) / st.ar) * BumpTestFn::profile(cut.dz(z, period) / st.az);
    };
    auto phase = [&](double r, double z) {
        return st.N * (w.kappa(0) * (r - st.rc) + w.kappa(1) * cut.dz(z, period)) + 0.5 * std::numbers::pi;
    };
    Wave wave;
    wave.eta = GridField::sample(sl, Rank::Scalar, [&](double r, double z, double, double* o) { o[0] = eta_at(r, z); });
    wave.psi = GridField::sample(sl, Rank::Scalar, [&](double r, double z, double, double* o) {
        o[0] = -eta_at(r, z) * std::cos(phase(r, z)) / w.nK;
    });
    const GridField pr = fd_derivative(wave.psi, Axis::r), pz = fd_derivative(wave.psi, Axis::z);
    wave.dm = GridField(sl, Rank::Vec2);
    for (int j = 0; j < sl.nz; ++j)
        for (int i = 0; i < sl.n_r(); ++i) {
            wave.dm(i, j, 0, 0) = -pz(i, j, 0);
            wave.dm(i, j, 0, 1) = pr(i, j, 0);
        }
    if (!with_time_parts) return wave;

    const State<double> d = direction_of(w, st.xi_t);
    const GridField h = GridField::sample(sl, Rank::Scalar, [&](double r, double z, double, double* o) {
        o[0] = eta_at(r, z) * std::sin(phase(r, z));
    });
    const GridField hr = fd_derivative(h, Axis::r), hz = fd_derivative(h, Axis::z);
    wave.ddtm = GridField(sl, Rank::Vec2);
    wave.dU = GridField(sl, Rank::Sym2Traceless);
    for (int j = 0; j < sl.nz; ++j)
        for (int i = 0; i < sl.n_r(); ++i) {
            wave.ddtm(i, j, 0, 0) = -st.xi_t * hz(i, j, 0);
            wave.ddtm(i, j, 0, 1) = st.xi_t * hr(i, j, 0);
            wave.dU(i, j, 0, 0) = d.U.u * h(i, j, 0);
            wave.dU(i, j, 0, 1) = d.U.w * h(i, j, 0);
        }
    return wave;
}

// (sum w |dm|^2, sum w m . dm) for unit amplitude.
std::pair<double, double> gain_terms(const LaminateState& s, const GridField& dm) {
    const Grid& g = s.grid();
    double quad = 0.0, cross = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.n_r(); ++i) {
            const double w = trap(i, g.nr, g.hr()) * g.hz();
            const double a = dm(i, j, 0, 0), b = dm(i, j, 0, 1);
            quad += w * (a * a + b * b);
            cross += w * (s.m(i, j, 0, 0) * a + s.m(i, j, 0, 1) * b);
        }
    return {quad, cross};
}

constexpr double kXiMax = 8.0;

double max_pair_energy(const State<double>& z0, const State<double>& d, double a, double rho) {
    return std::max(energy_e(rho, z0 + a * d), energy_e(rho, z0 - a * d));
}

}  // namespace

double energy_gap(const LaminateState& s) {
    const Grid& g = s.grid();
    double sum = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.n_r(); ++i) {
            const double m2 = s.m(i, j, 0, 0) * s.m(i, j, 0, 0) + s.m(i, j, 0, 1) * s.m(i, j, 0, 1);
            sum += trap(i, g.nr, g.hr()) * g.hz() * (DensityPressure<double>::rho0(g.r(i)) * s.chi - m2);
        }
    return sum;
}

double min_hull_margin(const LaminateState& s) {
    const Grid& g = s.grid();
    double mn = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.n_r(); ++i)
            mn = std::min(mn, s.chi / 2.0 - energy_e(DensityPressure<double>::rho0(g.r(i)), node_state(s, i, j)));
    return mn;
}

double max_divergence(const LaminateState& s) {
    const GridField dr = fd_derivative(s.m, Axis::r), dz = fd_derivative(s.m, Axis::z);
    const Grid& g = s.grid();
    double mx = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.n_r(); ++i) mx = std::max(mx, std::abs(dr(i, j, 0, 0) + dz(i, j, 0, 1)));
    return mx;
}

bool boundary_mr_zero(const LaminateState& s) {
    const Grid& g = s.grid();
    for (int j = 0; j < g.nz; ++j)
        if (s.m(0, j, 0, 0) != 0.0 || s.m(g.nr, j, 0, 0) != 0.0) return false;
    return true;
}

LaminateStep propose_step(const LaminateState& s, const LaminateOptions& opt, const std::vector<std::pair<double, double>>& excluded) {
    const Grid& g = s.grid();
    if (opt.N < 1 || opt.n_angles < 1) throw Error(ErrorCode::InvalidField, "laminate options out of range");
    const double ar = opt.cutoff_fraction * (g.domain.R - g.domain.delta);
    const double az = opt.cutoff_fraction * g.domain.z_period;
    if (opt.N * std::min(ar, az) < 4.0) throw Error(ErrorCode::GridTooCoarse, "N below 4 / cutoff radius");

    struct Cand {
        double gap;
        int i, j;
    };
    std::vector<Cand> cands;
    const double tol = 1e-12 * (g.domain.R - g.domain.delta);
    for (int i = 0; i < g.n_r(); ++i) {
        const double r = g.r(i);
        if (r - ar < g.domain.delta - tol || r + ar > g.domain.R + tol) continue;
        const double rho = DensityPressure<double>::rho0(r);
        for (int j = 0; j < g.nz; ++j) {
            const bool skip = std::any_of(excluded.begin(), excluded.end(), [&](const auto& c) {
                BumpTestFn cut;
                cut.zc = c.second;
                return std::abs(r - c.first) < ar && std::abs(cut.dz(g.z(j), g.domain.z_period)) < az;
            });
            if (skip) continue;
            const State<double> z0 = node_state(s, i, j);
            const double gap = rho * s.chi - z0.m.squaredNorm();
            if (gap > 0.0 && s.chi / 2.0 - energy_e(rho, z0) > 0.0) cands.push_back({gap, i, j});
        }
    }
    if (cands.empty()) {
        if (excluded.empty()) throw Error(ErrorCode::Saturated, "no node with positive gap and hull margin");
        throw Error(ErrorCode::StepRejected, "no centre left outside the rejected supports");
    }
    const Cand c = *std::min_element(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return std::tie(b.gap, a.i, a.j) < std::tie(a.gap, b.i, b.j);
    });

    LaminateStep st;
    st.ir = c.i;
    st.iz = c.j;
    st.rc = g.r(c.i);
    st.zc = g.z(c.j);
    st.ar = ar;
    st.az = az;
    st.N = opt.N;
    const double rho = DensityPressure<double>::rho0(st.rc);
    const State<double> z0 = node_state(s, c.i, c.j);
    const double e0 = energy_e(rho, z0);
    const double a = opt.safety * (s.chi / 2.0 - e0);
    // The U-part lands on the whole support, so the segment budget uses the smallest margin there.
    double support_margin = s.chi / 2.0 - e0;
    {
        BumpTestFn cut;
        cut.zc = st.zc;
        for (int i = 0; i < g.n_r(); ++i) {
            if (std::abs(g.r(i) - st.rc) >= ar) continue;
            for (int j = 0; j < g.nz; ++j) {
                if (std::abs(cut.dz(g.z(j), g.domain.z_period)) >= az) continue;
                support_margin = std::min(
                    support_margin, s.chi / 2.0 - energy_e(DensityPressure<double>::rho0(g.r(i)), node_state(s, i, j)));
            }
        }
    }
    const double budget = e0 + opt.safety * std::max(0.0, support_margin);

    bool found = false;
    double best_gain = -std::numeric_limits<double>::infinity();
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int k = 0; k < opt.n_angles; ++k) {
        const double angle = std::numbers::pi * k / opt.n_angles;
        const WaveGeometry w = wave_geometry(g, opt.N, angle);
        auto E = [&](double xt) { return max_pair_energy(z0, direction_of(w, xt), a, rho); };
        // max of convex functions of xi_t is convex; golden section for the minimizer
        double lo = -kXiMax, hi = kXiMax;
        double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo), f1 = E(x1), f2 = E(x2);
        for (int it = 0; it < 90; ++it) {
            if (f1 < f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = E(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = E(x2);
            }
        }
        const double xmin = 0.5 * (lo + hi);
        if (!(E(xmin) <= budget)) continue;
        // Longest admissible segment: largest xi_t above the minimizer keeping the centre pair within budget.
        double xt = kXiMax;
        if (E(xt) > budget) {
            double a0 = xmin, b0 = kXiMax;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (a0 + b0);
                (E(mid) <= budget ? a0 : b0) = mid;
            }
            xt = a0;
        }
        if (!(E(xt) < s.chi / 2.0)) continue;

        LaminateStep trial = st;
        trial.angle = angle;
        trial.xi_t = xt;
        const Wave wave = build_wave(g, trial, false);
        const auto [quad, cross] = gain_terms(s, wave.dm);
        const double gain = a * a * quad + 2.0 * a * std::abs(cross);
        if (gain > best_gain) {
            best_gain = gain;
            found = true;
            st.angle = angle;
            st.xi_t = xt;
            st.direction = direction_of(w, xt);
            Eigen::Vector3d xi(w.e1(0), w.e1(1), xt);
            st.xi = xi.normalized();
            st.amplitude = cross < 0.0 ? -a : a;
            st.projected_gain = gain;
        }
    }
    if (!found) st.amplitude = 0.0;  // centre kept so the caller can exclude it
    return st;
}

LaminateState apply_step(const LaminateState& s, const LaminateStep& st) {
    if (st.amplitude == 0.0) return s;
    const Wave w = build_wave(s.grid(), st, true);
    LaminateState out = s;
    const double a = st.amplitude;
    auto add = [a](GridField& f, const GridField& d) {
        auto& x = f.data();
        const auto& y = d.data();
        for (std::size_t n = 0; n < x.size(); ++n) x[n] += a * y[n];
    };
    add(out.psi, w.psi);
    const GridField pr = fd_derivative(out.psi, Axis::r), pz = fd_derivative(out.psi, Axis::z);
    const Grid& g = s.grid();
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.n_r(); ++i) {
            out.m(i, j, 0, 0) = out.m0(i, j, 0, 0) - pz(i, j, 0);
            out.m(i, j, 0, 1) = out.m0(i, j, 0, 1) + pr(i, j, 0);
        }
    add(out.dtm, w.ddtm);
    add(out.U, w.dU);
    return out;
}

struct ResidualNorm::Impl {
    Grid grid;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

ResidualNorm::ResidualNorm(const Grid& slice) : impl_(std::make_unique<Impl>()) {
    const Grid g = slice.slice();
    if (g.nr < 4 || g.nz < 4) throw Error(ErrorCode::GridTooCoarse, "residual norm needs at least 4 intervals");
    impl_->grid = g;
    const int ni = g.nr - 1, nz = g.nz;
    const double cr = 1.0 / (g.hr() * g.hr()), cz = 1.0 / (g.hz() * g.hz());
    auto id = [&](int i, int j) { return (i - 1) * nz + j; };
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(ni) * nz * 5);
    for (int i = 1; i <= ni; ++i)
        for (int j = 0; j < nz; ++j) {
            const int n = id(i, j);
            trip.emplace_back(n, n, 2.0 * cr + 2.0 * cz);
            if (i > 1) trip.emplace_back(n, id(i - 1, j), -cr);
            if (i < ni) trip.emplace_back(n, id(i + 1, j), -cr);
            trip.emplace_back(n, id(i, (j + 1) % nz), -cz);
            trip.emplace_back(n, id(i, (j + nz - 1) % nz), -cz);
        }
    Eigen::SparseMatrix<double> L(ni * nz, ni * nz);
    L.setFromTriplets(trip.begin(), trip.end());
    impl_->ldlt.compute(L);
    if (impl_->ldlt.info() != Eigen::Success) throw Error(ErrorCode::InvalidField, "Laplacian factorization failed");
}

ResidualNorm::~ResidualNorm() = default;
ResidualNorm::ResidualNorm(ResidualNorm&&) noexcept = default;
ResidualNorm& ResidualNorm::operator=(ResidualNorm&&) noexcept = default;

double ResidualNorm::operator()(const LaminateState& s) const {
    const Grid& g = impl_->grid;
    if (!(s.grid() == g)) throw Error(ErrorCode::GridMismatch, "state grid differs from the factorized grid");
    const GridField Ur = fd_derivative(s.U, Axis::r), Uz = fd_derivative(s.U, Axis::z);
    const GridField qr = fd_derivative(s.q, Axis::r), qz = fd_derivative(s.q, Axis::z);
    const int ni = g.nr - 1, nz = g.nz;
    Eigen::VectorXd Rr(ni * nz), Rz(ni * nz);
    for (int i = 1; i <= ni; ++i)
        for (int j = 0; j < nz; ++j) {
            const int n = (i - 1) * nz + j;
            // U_zz = -U_rr
            Rr(n) = s.dtm(i, j, 0, 0) + Ur(i, j, 0, 0) + Uz(i, j, 0, 1) + qr(i, j, 0);
            Rz(n) = s.dtm(i, j, 0, 1) + Ur(i, j, 0, 1) - Uz(i, j, 0, 0) + qz(i, j, 0);
        }
    const Eigen::VectorXd wr = impl_->ldlt.solve(Rr), wz = impl_->ldlt.solve(Rz);
    const double v = (Rr.dot(wr) + Rz.dot(wz)) * g.hr() * g.hz();
    return std::sqrt(std::max(0.0, v));
}

IterationTrace run_iteration(const LaminateState& state, int K, const LaminateOptions& opt) {
    if (K < 1) throw Error(ErrorCode::InvalidField, "need at least one step");
    const ResidualNorm norm(state.grid());
    IterationTrace tr;
    LaminateState s = state;
    tr.gap0 = energy_gap(s);
    tr.residual0 = norm(s);
    tr.margin0 = min_hull_margin(s);
    double gap = tr.gap0, res = tr.residual0;

    for (int k = 0; k < K && !tr.saturated; ++k) {
        bool accepted = false;
        std::vector<std::pair<double, double>> rejected;
        for (int rank = 0; rank < opt.max_centres && !accepted; ++rank) {
            LaminateStep st;
            try {
                st = propose_step(s, opt, rejected);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::Saturated) {
                    tr.saturated = true;
                    break;
                }
                throw;
            }
            for (int h = 0; h <= opt.max_halvings && st.amplitude != 0.0; ++h) {
                LaminateState next = apply_step(s, st);
                const double margin = min_hull_margin(next);
                const double g2 = energy_gap(next);
                if (margin > 0.0 && g2 < gap) {
                    StepRecord rec;
                    rec.k = k + 1;
                    rec.gap = g2;
                    rec.gain = gap - g2;
                    rec.residual = norm(next);
                    rec.min_margin = margin;
                    rec.max_div = max_divergence(next);
                    rec.step = st;
                    rec.centre_rank = rank;
                    const GridField eta = build_wave(s.grid(), st, false).eta;
                    const GridField er = fd_derivative(eta, Axis::r), ez = fd_derivative(eta, Axis::z);
                    double g2eta = 0.0;
                    const Grid& g = s.grid();
                    for (int j = 0; j < g.nz; ++j)
                        for (int i = 0; i < g.n_r(); ++i)
                            g2eta += trap(i, g.nr, g.hr()) * g.hz() * (er(i, j, 0) * er(i, j, 0) + ez(i, j, 0) * ez(i, j, 0));
                    const double c = (rec.residual - res) * st.N / (std::abs(st.amplitude) * std::sqrt(g2eta));
                    tr.residual_constant = std::max(tr.residual_constant, c);
                    tr.steps.push_back(rec);
                    s = std::move(next);
                    gap = g2;
                    res = rec.residual;
                    accepted = true;
                    break;
                }
                st.amplitude *= 0.5;
                ++st.halvings;
            }
            if (!accepted) rejected.emplace_back(st.rc, st.zc);
        }
        if (tr.saturated) break;
        if (!accepted) throw Error(ErrorCode::StepRejected, "every centre failed the hull check after halving");
    }

    if (!tr.steps.empty()) {
        double prev = tr.gap0;
        tr.fitted_c = std::numeric_limits<double>::infinity();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (const auto& rec : tr.steps) {
            const double drop = prev - rec.gap;
            tr.fitted_c = std::min(tr.fitted_c, drop / (prev * prev));
            if (drop > 0.0 && prev > 0.0) {
                const double x = std::log(prev), y = std::log(drop);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                ++n;
            }
            prev = rec.gap;
        }
        const double den = n * sxx - sx * sx;
        tr.exponent = (n >= 2 && std::abs(den) > 1e-300) ? (n * sxy - sx * sy) / den : 0.0;
        tr.exponent_identifiable = n >= 2 && std::log(tr.gap0 / tr.steps.back().gap) > 0.05;
    }
    tr.final_state = std::move(s);
    return tr;
}

LaminateState replay_steps(const LaminateState& state, const std::vector<StepRecord>& steps, int N) {
    LaminateState s = state;
    for (const auto& rec : steps) {
        LaminateStep st = rec.step;
        st.N = N;
        s = apply_step(s, st);
    }
    return s;
}

}  // namespace we
