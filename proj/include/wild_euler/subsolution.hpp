#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "wild_euler/chi_profile.hpp"
#include "wild_euler/constraint_geometry.hpp"
#include "wild_euler/fields.hpp"
#include "wild_euler/report.hpp"

namespace we {

// Strictly positive smooth profile multiplying the z-momentum of the explicit triple.
struct ChiTilde {
    enum class Kind { constant, cosine, sampled };

    Kind kind = Kind::constant;
    double c0 = 1.0;    // constant value, or mean of the cosine
    double amp = 0.0;   // cosine: c0 + amp cos(2 pi freq t)
    double freq = 1.0;
    std::vector<double> t, values, derivs;  // sampled, cubic Hermite between nodes

    static ChiTilde constant(double c);
    static ChiTilde cosine(double c0, double amp, double freq);
    static ChiTilde sampled(std::vector<double> t, std::vector<double> values, std::vector<double> derivs);

    double value(double time) const;
    double deriv(double time) const;
    void validate(double T) const;
};

struct SubsolutionState {
    GridField m;  // vec2
    GridField U;  // sym2-traceless
    GridField q;  // scalar
    DensityPressure<double> dp{};
    std::optional<ChiProfile> chi;
    bool analytic = false;
    std::optional<ChiTilde> chi_tilde;  // set for the explicit family

    const Grid& grid() const { return m.grid(); }
};

// Closed forms of the explicit triple at a point (q = p(rho0) + chi/2).
State<double> explicit_state(double r, double t, const DensityPressure<double>& dp, const ChiTilde& ct, double chi);
double explicit_energy(double r, double t, const DensityPressure<double>& dp, const ChiTilde& ct);

// (momentum r, momentum z, divergence) from closed-form derivatives; chi' enters through grad q = 0 only.
Eigen::Vector3d explicit_strong_residual(double r, double z, double t, const DensityPressure<double>& dp,
                                         const ChiTilde& ct);

// q holds p(rho0) until a chi profile is attached.
SubsolutionState build_explicit_subsolution(const Grid& grid, const DensityPressure<double>& dp, const ChiTilde& ct);

// Sets sub.chi and adds chi(t)/2 to q.
void attach_chi(SubsolutionState& sub, const ChiProfile& chi);

struct ThresholdCurve {
    std::function<double(double)> at;  // t -> 2 sup_r e
    std::vector<double> t, value;      // sampled on the grid time nodes
    double sup() const;
};

ThresholdCurve chi_threshold(const SubsolutionState& sub);

struct ValidateOptions {
    std::size_t n_tests = 20;
    std::uint64_t seed = 1;
    double residual_tol = 1e-4;  // relative to 1 + scale, per test
};

VerificationReport validate_subsolution(const SubsolutionState& sub, const ChiProfile& chi,
                                        const ValidateOptions& opt = {});

struct TargetState {
    GridField target;  // rho0(r) chi(t)
    double gap0 = 0.0;  // integral of rho0 chi(0) - |m(., 0)|^2 dz dr
};

TargetState target_state(const SubsolutionState& sub, const ChiProfile& chi);

// Fields of sub as a FieldSet for the compressible momentum form (all grid-sampled).
FieldSet momentum_fields(const SubsolutionState& sub);

}  // namespace we
