#pragma once

#include <cmath>
#include <vector>

#include "wild_euler/fields.hpp"
#include "wild_euler/subsolution.hpp"

namespace we::test_support {

// Max |momentum weak residual| of the explicit triple over random bumps.
inline double explicit_momentum_residual(const Grid& g, const ChiTilde& ct, std::size_t n_tests = 20,
                                         std::uint64_t seed = 1) {
    SubsolutionState sub = build_explicit_subsolution(g, DensityPressure<double>{2.0}, ct);
    attach_chi(sub, ChiProfile::constant(10.0, g.domain.T));
    BumpOptions bo;
    bo.vector_valued = true;
    const auto bumps = random_bumps(g.domain, n_tests, seed, bo);
    const auto res = weak_residual(WeakForm::CompressibleMomentum, momentum_fields(sub),
                                   std::vector<TestFunction>(bumps.begin(), bumps.end()));
    double worst = 0.0;
    for (const auto& r : res) worst = std::max(worst, std::abs(r.value));
    return worst;
}

struct OrderStudy {
    std::vector<double> errors;
    std::vector<double> orders;
};

// Refinement in t at a fixed spatial grid; the spatial product rule is far below the t error there.
inline OrderStudy explicit_order_study(int nr = 128, int nz = 128, std::vector<int> nts = {64, 128, 256}) {
    const ChiTilde ct = ChiTilde::cosine(1.0, 0.3, 1.0);
    OrderStudy s;
    for (int nt : nts) s.errors.push_back(explicit_momentum_residual(Grid{Domain{}, nr, nz, nt}, ct));
    for (std::size_t i = 1; i < s.errors.size(); ++i) s.orders.push_back(std::log2(s.errors[i - 1] / s.errors[i]));
    return s;
}

}  // namespace we::test_support
