#pragma once

#include <functional>
#include <vector>

#include "wild_euler/chi_profile.hpp"
#include "wild_euler/constraint_geometry.hpp"
#include "wild_euler/fields.hpp"
#include "wild_euler/report.hpp"
#include "wild_euler/subsolution.hpp"

namespace we {

// chi' = -2 [ sqrt(R) gamma max(R^(gamma-2), delta^(gamma-2)) chi^(1/2) + sqrt(R)/(2 delta^2) chi^(3/2) ]
double chi_ode_rhs(double chi, const Domain& dom, const DensityPressure<double>& dp);

// Classical RK4 (in sqrt(chi)) on a uniform grid of [0, T] with step <= dt; clamps at 0 after extinction.
ChiProfile integrate_chi(double chi0, const Domain& dom, const DensityPressure<double>& dp, double dt);

enum class Limiting { threshold_cross, chi_extinction, horizon };

const char* to_string(Limiting l);

struct FeasibilityWindow {
    double T_max = 0.0;
    Limiting limiting = Limiting::horizon;
    std::vector<double> t, margin;  // chi - threshold at the profile nodes
    double margin_min = 0.0;        // over nodes before T_max
};

FeasibilityWindow feasibility_window(const ChiProfile& profile, const std::function<double(double)>& threshold,
                                     double tol = 1e-10);

// Worst-case pointwise form of the local energy inequality, checked at grid r nodes and profile time nodes.
VerificationReport pointwise_energy_condition(const SubsolutionState& sub, const ChiProfile& chi);

struct EquivalenceOptions {
    double agreement_tol = 1e-10;  // per test, relative to the larger scale
    double residual_tol = 1e-4;    // per test, relative to 1 + scale
};

// Compressible relaxed residuals of (m, U, q) against the r-weighted axisymmetric residuals of
// v = m/r, F = (U + (q - p) I)/r, pi(r); plus the energy-form identity.
VerificationReport equivalence_check(const SubsolutionState& fields, const std::vector<BumpTestFn>& tests,
                                     const EquivalenceOptions& opt = {});

}  // namespace we
