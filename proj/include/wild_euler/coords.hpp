#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "wild_euler/errors.hpp"

namespace we {

template <typename Scalar>
struct CylVec {
    Scalar v_r{0}, v_theta{0}, v_z{0};
    Scalar r{1}, theta{0}, z{0};
};

template <typename Scalar>
struct CartVec {
    Scalar v_x{0}, v_y{0}, v_z{0};
    Scalar x{0}, y{0}, z{0};
};

// Cylindrical derivatives of a swirl-free axisymmetric test field phi_r e_r + phi_z e_z.
template <typename Scalar>
struct CylGrad {
    Scalar phi_r{0};
    Scalar dr_phi_r{0}, dz_phi_r{0}, dr_phi_z{0}, dz_phi_z{0};
};

template <typename Scalar>
struct IdentityPair {
    Scalar lhs, rhs;
};

namespace detail {
template <typename Scalar>
bool finite(Scalar a) { using std::isfinite; return isfinite(a); }
}  // namespace detail

template <typename Scalar>
CartVec<Scalar> to_cartesian(const CylVec<Scalar>& v) {
    using std::cos;
    using std::sin;
    if (!(detail::finite(v.v_r) && detail::finite(v.v_theta) && detail::finite(v.v_z) &&
          detail::finite(v.r) && detail::finite(v.theta) && detail::finite(v.z)))
        throw Error(ErrorCode::InvalidField, "non-finite cylindrical vector");
    if (!(v.r > Scalar(0))) throw Error(ErrorCode::InvalidField, "attachment radius must be positive");
    const Scalar c = cos(v.theta), s = sin(v.theta);
    return {v.v_r * c - v.v_theta * s, v.v_r * s + v.v_theta * c, v.v_z, v.r * c, v.r * s, v.z};
}

template <typename Scalar>
CylVec<Scalar> to_cylindrical(const CartVec<Scalar>& v) {
    using std::atan2;
    using std::cos;
    using std::hypot;
    using std::sin;
    if (!(detail::finite(v.v_x) && detail::finite(v.v_y) && detail::finite(v.v_z) &&
          detail::finite(v.x) && detail::finite(v.y) && detail::finite(v.z)))
        throw Error(ErrorCode::InvalidField, "non-finite cartesian vector");
    const Scalar r = hypot(v.x, v.y);
    if (!(r > Scalar(0))) throw Error(ErrorCode::InvalidField, "point on the axis");
    const Scalar theta = atan2(v.y, v.x);
    const Scalar c = v.x / r, s = v.y / r;
    return {v.v_x * c + v.v_y * s, -v.v_x * s + v.v_y * c, v.v_z, r, theta, v.z};
}

template <typename Scalar>
CylVec<Scalar> lift_swirl_free(Scalar v_r, Scalar v_z, Scalar r, Scalar theta, Scalar z) {
    return {v_r, Scalar(0), v_z, r, theta, z};
}

template <typename Scalar>
bool is_swirl_free(const CylVec<Scalar>& v, Scalar tol = Scalar(0)) {
    using std::abs;
    return abs(v.v_theta) <= tol;
}

// Cartesian Jacobian J(i,j) = d phi_i / d x_j of phi_r(r,z) e_r + phi_z(r,z) e_z at (r, theta).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> cartesian_jacobian(const CylGrad<Scalar>& g, Scalar r, Scalar theta) {
    using std::cos;
    using std::sin;
    const Scalar c = cos(theta), s = sin(theta);
    const Scalar hoop = g.phi_r / r;
    Eigen::Matrix<Scalar, 3, 3> J;
    J(0, 0) = c * c * g.dr_phi_r + s * s * hoop;
    J(0, 1) = s * c * g.dr_phi_r - s * c * hoop;
    J(0, 2) = c * g.dz_phi_r;
    J(1, 0) = s * c * g.dr_phi_r - s * c * hoop;
    J(1, 1) = s * s * g.dr_phi_r + c * c * hoop;
    J(1, 2) = s * g.dz_phi_r;
    J(2, 0) = c * g.dr_phi_z;
    J(2, 1) = s * g.dr_phi_z;
    J(2, 2) = g.dz_phi_z;
    return J;
}

template <typename Scalar>
IdentityPair<Scalar> advection_integrand_identity(const CylVec<Scalar>& v, const CylGrad<Scalar>& g) {
    if (!is_swirl_free(v)) throw Error(ErrorCode::NotSwirlFree, "v_theta must vanish");
    const CartVec<Scalar> c = to_cartesian(v);
    const Eigen::Matrix<Scalar, 3, 1> vc(c.v_x, c.v_y, c.v_z);
    const Scalar lhs = vc.dot(cartesian_jacobian(g, v.r, v.theta) * vc);
    const Scalar rhs = v.v_r * v.v_r * g.dr_phi_r + v.v_r * v.v_z * g.dz_phi_r +
                       v.v_r * v.v_z * g.dr_phi_z + v.v_z * v.v_z * g.dz_phi_z;
    return {lhs, rhs};
}

struct IdentitySuiteResult {
    std::size_t samples = 0;
    double max_error = 0.0;      // max |lhs - rhs| / (1 + |lhs|)
    double max_roundtrip = 0.0;  // max relative round-trip error
};

// Random swirl-free samples with r in [delta, R] and theta in [0, 2 pi).
IdentitySuiteResult identity_suite(std::size_t samples, std::uint64_t seed, double delta, double R);

}  // namespace we
