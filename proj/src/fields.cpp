#include "wild_euler/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "wild_euler/quadrature.hpp"
#include "wild_euler/rng.hpp"

namespace we {

void Domain::validate() const {
    if (!(std::isfinite(delta) && std::isfinite(R) && std::isfinite(z_period) && std::isfinite(T)))
        throw Error(ErrorCode::InvalidDomain, "non-finite domain parameter");
    if (!(delta > 0.0 && delta < R)) throw Error(ErrorCode::InvalidDomain, "requires 0 < delta < R");
    if (!(z_period > 0.0)) throw Error(ErrorCode::InvalidDomain, "requires z_period > 0");
    if (!(T > 0.0)) throw Error(ErrorCode::InvalidDomain, "requires T > 0");
}

int components(Rank rank) {
    switch (rank) {
        case Rank::Scalar: return 1;
        case Rank::Vec2: return 2;
        case Rank::Sym2Traceless: return 2;
        case Rank::Sym2: return 3;
    }
    return 1;
}

void Grid::validate() const {
    domain.validate();
    if (nr < 1 || nz < 1 || nt < 0) throw Error(ErrorCode::GridTooCoarse, "grid counts must be positive");
}

GridField::GridField(const Grid& grid, Rank rank)
    : grid_(grid), rank_(rank), ncomp_(components(rank)), data_(grid.nodes() * components(rank), 0.0) {
    grid_.validate();
}

GridField GridField::sample(const Grid& grid, Rank rank, const Sampler& fn) {
    GridField f(grid, rank);
    double buf[3] = {0, 0, 0};
    for (int k = 0; k < grid.n_t(); ++k)
        for (int j = 0; j < grid.nz; ++j)
            for (int i = 0; i < grid.n_r(); ++i) {
                fn(grid.r(i), grid.z(j), grid.t(k), buf);
                for (int c = 0; c < f.ncomp_; ++c) f(i, j, k, c) = buf[c];
            }
    f.check_finite();
    return f;
}

GridField GridField::slice(int it) const {
    GridField out(grid_.slice(), rank_);
    for (int j = 0; j < grid_.nz; ++j)
        for (int i = 0; i < grid_.n_r(); ++i)
            for (int c = 0; c < ncomp_; ++c) out(i, j, 0, c) = (*this)(i, j, it, c);
    return out;
}

void GridField::check_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidField, "non-finite sample");
}

double GridField::max_abs(int c) const {
    double m = 0.0;
    for (std::size_t i = c; i < data_.size(); i += ncomp_) m = std::max(m, std::abs(data_[i]));
    return m;
}

GridField fd_derivative(const GridField& f, Axis axis) {
    const Grid& g = f.grid();
    const int n = axis == Axis::r ? g.nr : axis == Axis::z ? g.nz : g.nt;
    if (n < 4) throw Error(ErrorCode::GridTooCoarse, "need at least 4 intervals along the differentiated axis");
    GridField out(g, f.rank());
    const int nc = f.ncomp();
    for (int k = 0; k < g.n_t(); ++k)
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.n_r(); ++i)
                for (int c = 0; c < nc; ++c) {
                    double d = 0.0;
                    if (axis == Axis::z) {
                        const int jp = (j + 1) % g.nz, jm = (j + g.nz - 1) % g.nz;
                        d = (f(i, jp, k, c) - f(i, jm, k, c)) / (2.0 * g.hz());
                    } else if (axis == Axis::r) {
                        const double h = g.hr();
                        if (i == 0)
                            d = (-3.0 * f(0, j, k, c) + 4.0 * f(1, j, k, c) - f(2, j, k, c)) / (2.0 * h);
                        else if (i == g.nr)
                            d = (3.0 * f(i, j, k, c) - 4.0 * f(i - 1, j, k, c) + f(i - 2, j, k, c)) / (2.0 * h);
                        else
                            d = (f(i + 1, j, k, c) - f(i - 1, j, k, c)) / (2.0 * h);
                    } else {
                        const double h = g.ht();
                        if (k == 0)
                            d = (-3.0 * f(i, j, 0, c) + 4.0 * f(i, j, 1, c) - f(i, j, 2, c)) / (2.0 * h);
                        else if (k == g.nt)
                            d = (3.0 * f(i, j, k, c) - 4.0 * f(i, j, k - 1, c) + f(i, j, k - 2, c)) / (2.0 * h);
                        else
                            d = (f(i, j, k + 1, c) - f(i, j, k - 1, c)) / (2.0 * h);
                    }
                    out(i, j, k, c) = d;
                }
    return out;
}

namespace {

double trap_weight(int i, int n, double h) { return (i == 0 || i == n) ? 0.5 * h : h; }

}  // namespace

double integrate(const GridField& f, int it, Weight weight, int component) {
    const Grid& g = f.grid();
    double sum = 0.0;
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.n_r(); ++i) {
            const double w = trap_weight(i, g.nr, g.hr()) * g.hz() * (weight == Weight::r ? g.r(i) : 1.0);
            sum += w * f(i, j, it, component);
        }
    return sum;
}

double integrate_spacetime(const GridField& f, Weight weight, int component) {
    const Grid& g = f.grid();
    if (g.nt == 0) return 0.0;
    double sum = 0.0;
    for (int k = 0; k < g.n_t(); ++k) sum += trap_weight(k, g.nt, g.ht()) * integrate(f, k, weight, component);
    return sum;
}

std::string to_csv(const GridField& f, const std::vector<std::string>& names) {
    if (static_cast<int>(names.size()) != f.ncomp())
        throw Error(ErrorCode::InvalidField, "component name count does not match rank");
    const Grid& g = f.grid();
    std::string out = "r,z,t";
    for (const auto& n : names) out += "," + n;
    out += "\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
    };
    for (int k = 0; k < g.n_t(); ++k)
        for (int j = 0; j < g.nz; ++j)
            for (int i = 0; i < g.n_r(); ++i) {
                put(g.r(i));
                out += ",";
                put(g.z(j));
                out += ",";
                put(g.t(k));
                for (int c = 0; c < f.ncomp(); ++c) {
                    out += ",";
                    put(f(i, j, k, c));
                }
                out += "\n";
            }
    return out;
}

double BumpTestFn::profile(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - s * s));
}

double BumpTestFn::dprofile(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    return std::exp(-1.0 / q) * (-2.0 * s / (q * q));
}

double BumpTestFn::d2profile(double s) {
    if (std::abs(s) >= 1.0) return 0.0;
    const double q = 1.0 - s * s;
    // d/ds [-2 s q^-2] = -2 q^-2 - 8 s^2 q^-3, plus (-2 s q^-2)^2 from the exponent.
    return std::exp(-1.0 / q) * (4.0 * s * s / (q * q * q * q) - 2.0 / (q * q) - 8.0 * s * s / (q * q * q));
}

double BumpTestFn::dz(double z, double period) const {
    double d = std::fmod(z - zc, period);
    if (d > 0.5 * period) d -= period;
    if (d <= -0.5 * period) d += period;
    return d;
}

bool BumpTestFn::disjoint_from(const Domain& dom) const {
    return rc + ar <= dom.delta || rc - ar >= dom.R || tc + at <= 0.0 || tc - at >= dom.T;
}

void BumpTestFn::validate(const Domain& dom) const {
    if (!(ar > 0 && az > 0 && at > 0)) throw Error(ErrorCode::InvalidField, "bump radii must be positive");
    if (!(std::isfinite(rc) && std::isfinite(zc) && std::isfinite(tc)))
        throw Error(ErrorCode::InvalidField, "non-finite bump centre");
    if (disjoint_from(dom)) return;
    if (rc - ar < dom.delta || rc + ar > dom.R)
        throw Error(ErrorCode::InvalidField, "bump support crosses the r boundary");
    if (2.0 * az > dom.z_period) throw Error(ErrorCode::InvalidField, "bump wider than the z period");
    if (tc + at > dom.T) throw Error(ErrorCode::InvalidField, "bump support reaches t = T");
}

std::vector<BumpTestFn> random_bumps(const Domain& dom, std::size_t n, std::uint64_t seed, const BumpOptions& opt) {
    Rng rng(seed);
    std::vector<BumpTestFn> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        BumpTestFn b;
        b.ar = std::min(rng.uniform(opt.ar[0], opt.ar[1]), 0.499 * (dom.R - dom.delta));
        b.az = std::min(rng.uniform(opt.az[0], opt.az[1]), 0.499 * dom.z_period);
        b.at = std::min(rng.uniform(opt.at[0], opt.at[1]), 0.499 * dom.T);
        b.rc = rng.uniform(dom.delta + b.ar, dom.R - b.ar);
        b.zc = rng.uniform(0.0, dom.z_period);
        b.tc = rng.uniform(opt.tc_fraction[0], opt.tc_fraction[1]) * b.at;
        if (b.tc + b.at > dom.T) b.tc = dom.T - b.at;
        b.vector_valued = opt.vector_valued;
        b.dir = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        out.push_back(b);
    }
    return out;
}

WeakForm parse_weak_form(const std::string& tag) {
    static const std::pair<const char*, WeakForm> table[] = {
        {"compressible-continuity", WeakForm::CompressibleContinuity},
        {"compressible-momentum", WeakForm::CompressibleMomentum},
        {"axisym-momentum", WeakForm::AxisymMomentum},
        {"axisym-divergence", WeakForm::AxisymDivergence},
        {"compressible-energy", WeakForm::CompressibleEnergy},
        {"axisym-energy", WeakForm::AxisymEnergy},
        {"burgers", WeakForm::Burgers},
    };
    for (const auto& [name, form] : table)
        if (tag == name) return form;
    throw Error(ErrorCode::UnknownWeakForm, tag);
}

const char* to_string(WeakForm form) {
    switch (form) {
        case WeakForm::CompressibleContinuity: return "compressible-continuity";
        case WeakForm::CompressibleMomentum: return "compressible-momentum";
        case WeakForm::AxisymMomentum: return "axisym-momentum";
        case WeakForm::AxisymDivergence: return "axisym-divergence";
        case WeakForm::CompressibleEnergy: return "compressible-energy";
        case WeakForm::AxisymEnergy: return "axisym-energy";
        case WeakForm::Burgers: return "burgers";
    }
    return "unknown";
}

namespace {

struct Sym {
    double rr, rz, zz;
};

// Test function derivatives at a point for one bump.
struct TestLocal {
    double phi, dt, dr, dz;  // scalar test
    double pr, pz;           // vector test components
    double tr, tz;           // time derivative of vector test
    double drr, dzr, drz, dzz;  // d_r psi_r, d_z psi_r, d_r psi_z, d_z psi_z
    double div;
};

TestLocal local(const BumpTestFn& b, double br, double bz, double bt, double dbr, double dbz, double dbt) {
    TestLocal L{};
    const double B = br * bz * bt;
    const double Br = dbr * bz * bt, Bz = br * dbz * bt, Bt = br * bz * dbt;
    L.phi = B;
    L.dt = Bt;
    L.dr = Br;
    L.dz = Bz;
    const double cr = b.dir[0], cz = b.dir[1];
    L.pr = cr * B;
    L.pz = cz * B;
    L.tr = cr * Bt;
    L.tz = cz * Bt;
    L.drr = cr * Br;
    L.dzr = cr * Bz;
    L.drz = cz * Br;
    L.dzz = cz * Bz;
    L.div = L.drr + L.dzz;
    return L;
}

struct Axes {
    std::vector<int> ir, iz, it;
    std::vector<double> br, dbr, bz, dbz, bt, dbt;
};

class Evaluator {
public:
    Evaluator(WeakForm form, const FieldSet& fs) : form_(form), fs_(fs) {
        const GridField* first = nullptr;
        for (const auto& [name, f] : fs.grid) {
            if (!first) first = &f;
            else if (!(f.grid() == first->grid()))
                throw Error(ErrorCode::GridMismatch, "field '" + name + "' is on a different grid");
        }
        if (!first) throw Error(ErrorCode::InvalidField, "weak_residual needs at least one grid field");
        grid_ = first->grid();
        require_fields();
        // resolved once; the node loop is hot
        g_F_ = find_grid("F");
        g_U_ = find_grid("U");
        g_f_ = find_grid("f");
        g_m_ = find_grid("m");
        g_pi_ = find_grid("pi");
        g_q_ = find_grid("q");
        g_rho_ = find_grid("rho");
        g_v_ = find_grid("v");
        a_pi_ = find_analytic("pi");
        a_q_ = find_analytic("q");
        a_rho_ = find_analytic("rho");
    }

    WeakResult eval(const TestFunction& tf) const {
        WeakResult res;
        for (const auto& [coef, b] : tf.terms) {
            const WeakResult part = eval_bump(b);
            res.value += coef * part.value;
            res.scale += std::abs(coef) * part.scale;
        }
        return res;
    }

private:
    void need(const std::string& name, Rank rank, bool allow_analytic) const {
        auto it = fs_.grid.find(name);
        if (it != fs_.grid.end()) {
            const Rank r = it->second.rank();
            const bool ok = r == rank || (rank == Rank::Sym2 && r == Rank::Sym2Traceless);
            if (!ok) throw Error(ErrorCode::InvalidField, "field '" + name + "' has the wrong rank");
            return;
        }
        if (allow_analytic && fs_.analytic.count(name)) return;
        throw Error(ErrorCode::InvalidField, std::string(to_string(form_)) + " requires field '" + name + "'");
    }

    void require_fields() const {
        if (grid_.nt < 1) throw Error(ErrorCode::GridTooCoarse, "weak forms need at least one time interval");
        switch (form_) {
            case WeakForm::CompressibleContinuity:
                need("rho", Rank::Scalar, true);
                need("m", Rank::Vec2, false);
                break;
            case WeakForm::CompressibleMomentum:
                need("m", Rank::Vec2, false);
                need("U", Rank::Sym2, false);
                if (!fs_.has("q")) throw Error(ErrorCode::InvalidField, "compressible-momentum requires field 'q'");
                if (fs_.grid.count("q")) need("q", Rank::Scalar, true);
                break;
            case WeakForm::AxisymMomentum:
                need("v", Rank::Vec2, false);
                if (fs_.grid.count("F")) need("F", Rank::Sym2, false);
                if (!fs_.has("pi")) throw Error(ErrorCode::InvalidField, "axisym-momentum requires field 'pi'");
                if (fs_.grid.count("pi")) need("pi", Rank::Scalar, true);
                break;
            case WeakForm::AxisymDivergence: need("v", Rank::Vec2, false); break;
            case WeakForm::CompressibleEnergy:
                need("rho", Rank::Scalar, true);
                need("m", Rank::Vec2, false);
                break;
            case WeakForm::AxisymEnergy:
                need("v", Rank::Vec2, false);
                need("pi", Rank::Scalar, true);
                break;
            case WeakForm::Burgers: need("f", Rank::Scalar, false); break;
        }
    }

    const GridField* find_grid(const std::string& name) const {
        auto it = fs_.grid.find(name);
        return it == fs_.grid.end() ? nullptr : &it->second;
    }
    const AnalyticField* find_analytic(const std::string& name) const {
        auto it = fs_.analytic.find(name);
        return it == fs_.analytic.end() ? nullptr : &it->second;
    }

    // Grid value plus, when requested, the analytic part sampled at the node.
    double scalar(const GridField* g, const AnalyticField* a, int i, int j, int k, bool sample_analytic) const {
        double v = g ? (*g)(i, j, k) : 0.0;
        if (a && sample_analytic) v += (*a)(grid_.r(i), grid_.z(j), grid_.t(k));
        return v;
    }

    static Sym sym(const GridField& U, int i, int j, int k) {
        if (U.rank() == Rank::Sym2Traceless) return {U(i, j, k, 0), U(i, j, k, 1), -U(i, j, k, 0)};
        return {U(i, j, k, 0), U(i, j, k, 1), U(i, j, k, 2)};
    }

    Axes axes(const BumpTestFn& b) const {
        Axes A;
        const Grid& g = grid_;
        for (int i = 0; i < g.n_r(); ++i) {
            const double s = (g.r(i) - b.rc) / b.ar;
            if (std::abs(s) < 1.0) {
                A.ir.push_back(i);
                A.br.push_back(BumpTestFn::profile(s));
                A.dbr.push_back(BumpTestFn::dprofile(s) / b.ar);
            }
        }
        for (int j = 0; j < g.nz; ++j) {
            const double s = b.dz(g.z(j), g.domain.z_period) / b.az;
            if (std::abs(s) < 1.0) {
                A.iz.push_back(j);
                A.bz.push_back(BumpTestFn::profile(s));
                A.dbz.push_back(BumpTestFn::dprofile(s) / b.az);
            }
        }
        for (int k = 0; k < g.n_t(); ++k) {
            const double s = (g.t(k) - b.tc) / b.at;
            if (std::abs(s) < 1.0) {
                A.it.push_back(k);
                A.bt.push_back(BumpTestFn::profile(s));
                A.dbt.push_back(BumpTestFn::dprofile(s) / b.at);
            }
        }
        return A;
    }

    // Node integrand (spacetime part) and initial-data integrand; accumulates |terms| into scale.
    void node(const TestLocal& L, int i, int j, int k, double& I, double& S) const {
        const double r = grid_.r(i);
        switch (form_) {
            case WeakForm::CompressibleContinuity: {
                const double rho = scalar(g_rho_, a_rho_, i, j, k, false);
                const GridField& m = *g_m_;
                const double t1 = rho * L.dt, t2 = m(i, j, k, 0) * L.dr + m(i, j, k, 1) * L.dz;
                I = t1 + t2;
                S = std::abs(t1) + std::abs(t2);
                break;
            }
            case WeakForm::CompressibleMomentum: {
                const GridField& m = *g_m_;
                const Sym U = sym(*g_U_, i, j, k);
                const double q = scalar(g_q_, a_q_, i, j, k, false);
                const double t1 = m(i, j, k, 0) * L.tr + m(i, j, k, 1) * L.tz;
                const double t2 = U.rr * L.drr + U.rz * (L.dzr + L.drz) + U.zz * L.dzz;
                const double t3 = q * L.div;
                I = t1 + t2 + t3;
                S = std::abs(t1) + std::abs(t2) + std::abs(t3);
                break;
            }
            case WeakForm::AxisymMomentum: {
                const GridField& v = *g_v_;
                const double vr = v(i, j, k, 0), vz = v(i, j, k, 1);
                const Sym F = g_F_ ? sym(*g_F_, i, j, k) : Sym{vr * vr, vr * vz, vz * vz};
                const double pi = scalar(g_pi_, a_pi_, i, j, k, false);
                const double t1 = r * (vr * L.tr + vz * L.tz);
                const double t2 = r * (F.rr * L.drr + F.rz * (L.dzr + L.drz) + F.zz * L.dzz);
                const double t3 = r * pi * (L.div + L.pr / r);
                I = t1 + t2 + t3;
                S = std::abs(t1) + std::abs(t2) + std::abs(t3);
                break;
            }
            case WeakForm::AxisymDivergence: {
                const GridField& v = *g_v_;
                I = r * (v(i, j, k, 0) * L.dr + v(i, j, k, 1) * L.dz);
                S = std::abs(I);
                break;
            }
            case WeakForm::CompressibleEnergy: {
                const double rho = scalar(g_rho_, a_rho_, i, j, k, true);
                if (!(rho > 1e-12)) throw Error(ErrorCode::DegenerateDensity, "density vanishes");
                const GridField& m = *g_m_;
                const double vr = m(i, j, k, 0) / rho, vz = m(i, j, k, 1) / rho;
                const double kin = 0.5 * rho * (vr * vr + vz * vz);
                const double pg = std::pow(rho, fs_.gamma);
                const double g1 = fs_.gamma - 1.0;
                const double t1 = (kin + pg / g1) * L.dt;
                const double t2 = (kin + fs_.gamma / g1 * pg) * (vr * L.dr + vz * L.dz);
                I = t1 + t2;
                S = std::abs(t1) + std::abs(t2);
                break;
            }
            case WeakForm::AxisymEnergy: {
                const GridField& v = *g_v_;
                const double vr = v(i, j, k, 0), vz = v(i, j, k, 1);
                const double pi = scalar(g_pi_, a_pi_, i, j, k, true);
                const double k2 = 0.5 * (vr * vr + vz * vz);
                const double t1 = k2 * r * L.dt;
                const double t2 = (k2 + pi) * r * (vr * L.dr + vz * L.dz);
                I = t1 + t2;
                S = std::abs(t1) + std::abs(t2);
                break;
            }
            case WeakForm::Burgers: {
                const double f = (*g_f_)(i, j, k);
                const double t1 = f * L.dt, t2 = 0.5 * fs_.lambda * f * f * L.dr;
                I = t1 + t2;
                S = std::abs(t1) + std::abs(t2);
                break;
            }
        }
    }

    double initial(const TestLocal& L, int i, int j) const {
        const double r = grid_.r(i);
        switch (form_) {
            case WeakForm::CompressibleContinuity:
                return scalar(g_rho_, a_rho_, i, j, 0, false) * L.phi;
            case WeakForm::CompressibleMomentum: {
                const GridField& m = *g_m_;
                return m(i, j, 0, 0) * L.pr + m(i, j, 0, 1) * L.pz;
            }
            case WeakForm::AxisymMomentum: {
                const GridField& v = *g_v_;
                return r * (v(i, j, 0, 0) * L.pr + v(i, j, 0, 1) * L.pz);
            }
            case WeakForm::AxisymDivergence: return 0.0;
            case WeakForm::CompressibleEnergy: {
                const double rho = scalar(g_rho_, a_rho_, i, j, 0, true);
                const GridField& m = *g_m_;
                const double mr = m(i, j, 0, 0), mz = m(i, j, 0, 1);
                return (0.5 * (mr * mr + mz * mz) / rho + std::pow(rho, fs_.gamma) / (fs_.gamma - 1.0)) * L.phi;
            }
            case WeakForm::AxisymEnergy: {
                const GridField& v = *g_v_;
                const double vr = v(i, j, 0, 0), vz = v(i, j, 0, 1);
                return 0.5 * (vr * vr + vz * vz) * r * L.phi;
            }
            case WeakForm::Burgers: return (*g_f_)(i, j, 0) * L.phi;
        }
        return 0.0;
    }

    // Linear analytic term integrated on the bump support with tanh-sinh quadrature.
    WeakResult analytic_part(const BumpTestFn& b) const {
        const AnalyticField* a = nullptr;
        if (form_ == WeakForm::CompressibleContinuity) a = a_rho_;
        else if (form_ == WeakForm::CompressibleMomentum) a = a_q_;
        else if (form_ == WeakForm::AxisymMomentum) a = a_pi_;
        if (!a) return {};
        static const TanhSinhRule rule(1.0 / 16.0, 1e-18);
        std::vector<double> xr, wr, xz, wz, xt, wt;
        map_rule(rule, b.rc - b.ar, b.rc + b.ar, xr, wr);
        map_rule(rule, -b.az, b.az, xz, wz);
        const double t0 = std::max(0.0, b.tc - b.at), t1 = b.tc + b.at;
        map_rule(rule, t0, t1, xt, wt);

        auto integrand = [&](double r, double dz, double t, const TestLocal& L) {
            const double val = (*a)(r, b.zc + dz, t);
            switch (form_) {
                case WeakForm::CompressibleContinuity: return val * L.dt;
                case WeakForm::CompressibleMomentum: return val * L.div;
                default: return r * val * (L.div + L.pr / r);
            }
        };
        // Profiles are separable; tabulate them once per axis and drop nodes where they underflow.
        struct Axis1 {
            std::vector<double> x, w, p, dp;
        };
        auto tab = [](const std::vector<double>& xs, const std::vector<double>& ws, double c, double a) {
            Axis1 ax;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const double s = (xs[i] - c) / a;
                const double p = BumpTestFn::profile(s), d = BumpTestFn::dprofile(s) / a;
                if (p == 0.0 && d == 0.0) continue;
                ax.x.push_back(xs[i]);
                ax.w.push_back(ws[i]);
                ax.p.push_back(p);
                ax.dp.push_back(d);
            }
            return ax;
        };
        const Axis1 R = tab(xr, wr, b.rc, b.ar), Z = tab(xz, wz, 0.0, b.az), T = tab(xt, wt, b.tc, b.at);
        WeakResult res;
        for (std::size_t k = 0; k < T.x.size(); ++k)
            for (std::size_t j = 0; j < Z.x.size(); ++j)
                for (std::size_t i = 0; i < R.x.size(); ++i) {
                    const TestLocal L = local(b, R.p[i], Z.p[j], T.p[k], R.dp[i], Z.dp[j], T.dp[k]);
                    const double v = integrand(R.x[i], Z.x[j], T.x[k], L);
                    const double w = R.w[i] * Z.w[j] * T.w[k];
                    res.value += w * v;
                    res.scale += w * std::abs(v);
                }
        auto tl = [&](double r, double dz, double t) {
            const double sr = (r - b.rc) / b.ar, sz = dz / b.az, st = (t - b.tc) / b.at;
            return local(b, BumpTestFn::profile(sr), BumpTestFn::profile(sz), BumpTestFn::profile(st),
                         BumpTestFn::dprofile(sr) / b.ar, BumpTestFn::dprofile(sz) / b.az,
                         BumpTestFn::dprofile(st) / b.at);
        };
        if (form_ == WeakForm::CompressibleContinuity && b.tc - b.at < 0.0)
            for (std::size_t j = 0; j < xz.size(); ++j)
                for (std::size_t i = 0; i < xr.size(); ++i) {
                    const double v = (*a)(xr[i], b.zc + xz[j], 0.0) * tl(xr[i], xz[j], 0.0).phi;
                    res.value += wr[i] * wz[j] * v;
                    res.scale += wr[i] * wz[j] * std::abs(v);
                }
        return res;
    }

    WeakResult eval_bump(const BumpTestFn& b) const {
        const Domain& dom = grid_.domain;
        b.validate(dom);
        if (b.disjoint_from(dom)) return {};
        const bool vector_form = form_ == WeakForm::CompressibleMomentum || form_ == WeakForm::AxisymMomentum;
        if (vector_form != b.vector_valued)
            throw Error(ErrorCode::InvalidField, std::string(to_string(form_)) +
                                                     (vector_form ? " needs vector-valued tests" : " needs scalar tests"));
        const Axes A = axes(b);
        const Grid& g = grid_;
        WeakResult res;
        for (std::size_t kk = 0; kk < A.it.size(); ++kk) {
            const int k = A.it[kk];
            const double wt = trap_weight(k, g.nt, g.ht());
            for (std::size_t jj = 0; jj < A.iz.size(); ++jj) {
                const int j = A.iz[jj];
                for (std::size_t ii = 0; ii < A.ir.size(); ++ii) {
                    const int i = A.ir[ii];
                    const double w = trap_weight(i, g.nr, g.hr()) * g.hz() * wt;
                    const TestLocal L = local(b, A.br[ii], A.bz[jj], A.bt[kk], A.dbr[ii], A.dbz[jj], A.dbt[kk]);
                    double I = 0, S = 0;
                    node(L, i, j, k, I, S);
                    res.value += w * I;
                    res.scale += w * S;
                    if (k == 0) {
                        const double init = initial(L, i, j);
                        const double ws = trap_weight(i, g.nr, g.hr()) * g.hz();
                        res.value += ws * init;
                        res.scale += ws * std::abs(init);
                    }
                }
            }
        }
        const WeakResult an = analytic_part(b);
        res.value += an.value;
        res.scale += an.scale;
        return res;
    }

    WeakForm form_;
    const FieldSet& fs_;
    Grid grid_;
    const GridField *g_F_ = nullptr, *g_U_ = nullptr, *g_f_ = nullptr, *g_m_ = nullptr, *g_pi_ = nullptr, *g_q_ = nullptr, *g_rho_ = nullptr, *g_v_ = nullptr;
    const AnalyticField *a_pi_ = nullptr, *a_q_ = nullptr, *a_rho_ = nullptr;
};

}  // namespace

std::vector<WeakResult> weak_residual(WeakForm form, const FieldSet& fields, const std::vector<TestFunction>& tests) {
    Evaluator ev(form, fields);
    std::vector<WeakResult> out;
    out.reserve(tests.size());
    for (const auto& t : tests) out.push_back(ev.eval(t));
    return out;
}

}  // namespace we
