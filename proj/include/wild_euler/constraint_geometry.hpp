#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "wild_euler/errors.hpp"

namespace we {

// [[u, w], [w, -u]]
template <typename Scalar>
struct TracelessSym2 {
    Scalar u{0}, w{0};

    Eigen::Matrix<Scalar, 2, 2> matrix() const {
        Eigen::Matrix<Scalar, 2, 2> A;
        A << u, w, w, -u;
        return A;
    }
    Scalar norm() const { using std::hypot; return hypot(u, w); }  // operator norm
};

template <typename Scalar>
TracelessSym2<Scalar> operator+(const TracelessSym2<Scalar>& a, const TracelessSym2<Scalar>& b) { return {a.u + b.u, a.w + b.w}; }
template <typename Scalar>
TracelessSym2<Scalar> operator-(const TracelessSym2<Scalar>& a, const TracelessSym2<Scalar>& b) { return {a.u - b.u, a.w - b.w}; }
template <typename Scalar>
TracelessSym2<Scalar> operator*(Scalar s, const TracelessSym2<Scalar>& a) { return {s * a.u, s * a.w}; }

template <typename Scalar>
struct State {
    Eigen::Matrix<Scalar, 2, 1> m = Eigen::Matrix<Scalar, 2, 1>::Zero();
    TracelessSym2<Scalar> U{};
    Scalar q{0};

    Scalar norm() const {
        using std::sqrt;
        return sqrt(m.squaredNorm() + U.u * U.u + U.w * U.w);
    }
};

template <typename Scalar>
State<Scalar> operator+(const State<Scalar>& a, const State<Scalar>& b) { return {a.m + b.m, a.U + b.U, a.q + b.q}; }
template <typename Scalar>
State<Scalar> operator-(const State<Scalar>& a, const State<Scalar>& b) { return {a.m - b.m, a.U - b.U, a.q - b.q}; }
template <typename Scalar>
State<Scalar> operator*(Scalar s, const State<Scalar>& a) { return {s * a.m, s * a.U, s * a.q}; }

template <typename Scalar>
struct DensityPressure {
    Scalar gamma{2};

    static Scalar rho0(Scalar r) { return r > Scalar(0) ? r : Scalar(0); }
    Scalar p(Scalar rho) const { using std::pow; return pow(rho, gamma); }
    Scalar dp(Scalar rho) const { using std::pow; return gamma * pow(rho, gamma - Scalar(1)); }
    Scalar eps(Scalar rho) const { using std::pow; return pow(rho, gamma - Scalar(1)) / (gamma - Scalar(1)); }
    Scalar deps(Scalar rho) const { using std::pow; return pow(rho, gamma - Scalar(2)); }
    // Axisymmetric pressure gamma/(gamma-1) r^(gamma-1).
    Scalar pi(Scalar r) const { using std::pow; return gamma / (gamma - Scalar(1)) * pow(r, gamma - Scalar(1)); }
    Scalar dpi(Scalar r) const { using std::pow; return gamma * pow(r, gamma - Scalar(2)); }
};

template <typename Scalar>
Scalar lambda_max_sym2(Scalar a, Scalar b, Scalar c) {
    using std::hypot;
    return Scalar(0.5) * (a + c) + hypot(Scalar(0.5) * (a - c), b);
}

namespace detail {
template <typename Scalar>
Scalar sym_offdiag(Scalar a, Scalar b) { return Scalar(0.5) * (a + b); }
}  // namespace detail

template <typename Scalar>
Scalar lambda_max_sym2(const Eigen::Matrix<Scalar, 2, 2>& A) {
    return lambda_max_sym2(A(0, 0), detail::sym_offdiag(A(0, 1), A(1, 0)), A(1, 1));
}

// lambda_max(m (x) m / rho - U).
template <typename Scalar>
Scalar energy_e(Scalar rho, const State<Scalar>& s) {
    using std::hypot;
    if (!(rho > Scalar(0))) throw Error(ErrorCode::DegenerateDensity, "energy needs rho > 0");
    const Scalar mr = s.m(0), mz = s.m(1);
    return (mr * mr + mz * mz) / (Scalar(2) * rho) +
           hypot((mr * mr - mz * mz) / (Scalar(2) * rho) - s.U.u, mr * mz / rho - s.U.w);
}

// The traceless matrix m (x) m / rho - |m|^2/(2 rho) I.
template <typename Scalar>
TracelessSym2<Scalar> forced_U(Scalar rho, const Eigen::Matrix<Scalar, 2, 1>& m) {
    return {(m(0) * m(0) - m(1) * m(1)) / (Scalar(2) * rho), m(0) * m(1) / rho};
}

enum class HullClass { in_K, in_hull, in_hyperinterior, outside };

const char* to_string(HullClass c);

struct HullTolerances {
    double q_abs = 1e-12;     // |q - p - chi/2| <= q_abs * (1 + |q|)
    double k_rel = 1e-12;     // | |m|^2 - rho chi | <= k_rel * rho chi
    double e_abs = 1e-12;     // e <= chi/2 + e_abs * (1 + chi)
};

template <typename Scalar>
HullClass hull_membership(Scalar rho, Scalar chi, const State<Scalar>& s, const DensityPressure<Scalar>& dp,
                          const HullTolerances& tol = {}) {
    using std::abs;
    if (!(rho > Scalar(0)) || !(chi > Scalar(0))) throw Error(ErrorCode::DegenerateDensity, "hull needs rho, chi > 0");
    const Scalar qf = dp.p(rho) + chi / Scalar(2);
    if (abs(s.q - qf) > Scalar(tol.q_abs) * (Scalar(1) + abs(qf))) return HullClass::outside;
    const Scalar e = energy_e(rho, s);
    const Scalar slack = Scalar(tol.e_abs) * (Scalar(1) + chi);
    if (e > chi / Scalar(2) + slack) return HullClass::outside;
    const Scalar m2 = s.m.squaredNorm();
    if (abs(m2 - rho * chi) <= Scalar(tol.k_rel) * rho * chi) return HullClass::in_K;
    if (e < chi / Scalar(2) - slack) return HullClass::in_hyperinterior;
    return HullClass::in_hull;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> wave_cone_matrix(const State<Scalar>& s) {
    Eigen::Matrix<Scalar, 3, 3> M;
    M << s.U.u + s.q, s.U.w, s.m(0),
         s.U.w, s.q - s.U.u, s.m(1),
         s.m(0), s.m(1), Scalar(0);
    return M;
}

template <typename Scalar>
Scalar wave_cone_det(const State<Scalar>& s) {
    const Scalar mr = s.m(0), mz = s.m(1), u = s.U.u, w = s.U.w, q = s.q;
    return -(u + q) * mz * mz + Scalar(2) * w * mr * mz - (q - u) * mr * mr;
}

template <typename Scalar>
bool in_wave_cone(const State<Scalar>& s, Scalar tol = Scalar(1e-10)) {
    using std::abs;
    const Scalar scale = s.norm() + abs(s.q);
    return abs(wave_cone_det(s)) <= tol * scale * scale * scale;
}

template <typename Scalar>
struct LambdaDirection {
    State<Scalar> direction;
    Eigen::Matrix<Scalar, 3, 1> xi;  // (xi_r, xi_z, xi_t), unit length
};

// Kernel of the wave-cone matrix of s_to - s_from via the adjugate column of largest norm.
template <typename Scalar>
LambdaDirection<Scalar> lambda_direction(const State<Scalar>& s_from, const State<Scalar>& s_to,
                                         Scalar tol = Scalar(1e-10)) {
    using std::abs;
    const State<Scalar> d = s_to - s_from;
    const Scalar scale = d.norm() + abs(d.q);
    if (!(scale > Scalar(0))) throw Error(ErrorCode::NotInCone, "zero direction");
    if (!in_wave_cone(d, tol)) throw Error(ErrorCode::NotInCone, "det M does not vanish");
    const Eigen::Matrix<Scalar, 3, 3> M = wave_cone_matrix(d) / scale;
    Eigen::Matrix<Scalar, 3, 3> adj;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int i1 = (j + 1) % 3, i2 = (j + 2) % 3, j1 = (i + 1) % 3, j2 = (i + 2) % 3;
            adj(i, j) = M(i1, j1) * M(i2, j2) - M(i1, j2) * M(i2, j1);
        }
    int best = 0;
    for (int j = 1; j < 3; ++j)
        if (adj.col(j).norm() > adj.col(best).norm()) best = j;
    const Scalar n = adj.col(best).norm();
    if (!(n > Scalar(1e-8))) throw Error(ErrorCode::DegenerateDirection, "kernel is not one-dimensional");
    Eigen::Matrix<Scalar, 3, 1> xi = adj.col(best) / n;
    for (int i = 0; i < 3; ++i)
        if (abs(xi(i)) > Scalar(1e-14)) {
            if (xi(i) < Scalar(0)) xi = -xi;
            break;
        }
    return {d, xi};
}

// Residual of the linear system for the plane wave d h(xi . (r, z, t)) divided by h'.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> plane_wave_residual(const State<Scalar>& d, const Eigen::Matrix<Scalar, 3, 1>& xi) {
    return wave_cone_matrix(d) * xi;
}

}  // namespace we
