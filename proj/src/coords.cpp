#include "wild_euler/coords.hpp"

#include <algorithm>
#include <numbers>

#include "wild_euler/rng.hpp"

namespace we {

IdentitySuiteResult identity_suite(std::size_t samples, std::uint64_t seed, double delta, double R) {
    Rng rng(seed);
    IdentitySuiteResult out;
    out.samples = samples;
    for (std::size_t k = 0; k < samples; ++k) {
        const double r = rng.uniform(delta, R);
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double z = rng.uniform(0.0, 1.0);
        const auto v = lift_swirl_free(rng.uniform(-1, 1), rng.uniform(-1, 1), r, theta, z);
        CylGrad<double> g;
        g.phi_r = rng.uniform(-1, 1);
        g.dr_phi_r = rng.uniform(-1, 1);
        g.dz_phi_r = rng.uniform(-1, 1);
        g.dr_phi_z = rng.uniform(-1, 1);
        g.dz_phi_z = rng.uniform(-1, 1);
        const auto p = advection_integrand_identity(v, g);
        out.max_error = std::max(out.max_error, std::abs(p.lhs - p.rhs) / (1.0 + std::abs(p.lhs)));

        const auto back = to_cylindrical(to_cartesian(v));
        const double scale = std::max({std::abs(v.v_r), std::abs(v.v_z), 1e-300});
        const double err = std::max({std::abs(back.v_r - v.v_r), std::abs(back.v_theta - v.v_theta),
                                     std::abs(back.v_z - v.v_z)}) / scale;
        out.max_roundtrip = std::max(out.max_roundtrip, err);
    }
    return out;
}

}  // namespace we
