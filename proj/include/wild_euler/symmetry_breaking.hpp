#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wild_euler/fields.hpp"
#include "wild_euler/report.hpp"

namespace we {

struct FanParams {
    double r0 = 1.0;
    double lambda = 0.1;
    double eps = 0.1;
    double T = 1.0;

    void validate(const Domain& dom) const;
};

// Rarefaction fan of f_t + (lambda/2)(f^2)_r = 0 with data -1 | +1 at r0.
double burgers_rarefaction(const FanParams& fp, double r, double t);

class BreakingSubsolution {
public:
    BreakingSubsolution(const Domain& dom, const FanParams& fp);

    const Domain& domain() const { return dom_; }
    const FanParams& params() const { return fp_; }

    double f(double r, double t) const { return burgers_rarefaction(fp_, r, t); }
    double alpha(double r, double t) const { return f(r, t) / r; }
    double beta(double r, double t) const;
    double gamma_fn(double r, double t) const;
    // alpha^2/2 + (1/2) int_1^r alpha(s)^2/s ds, by adaptive quadrature split at the fan edges.
    double q(double r, double t) const;

    std::pair<double, double> fan_edges(double t) const { return {fp_.r0 - fp_.lambda * t, fp_.r0 + fp_.lambda * t}; }
    bool in_fan(double r, double t) const;

    // (first momentum row, second momentum row, Burgers) from closed-form derivatives.
    Eigen::Vector3d strong_residual(double r, double t) const;
    // Magnitude of the largest term entering strong_residual, for relative tolerances.
    double residual_scale(double r, double t) const;

    double energy_closed(double r, double t) const;
    double energy_eigen(double r, double t) const;
    double ebar(double r, double theta, double t) const;
    // The original subsolution condition uses lambda_max <= (2/3) ebar.
    double half_v0_sq(double r) const { return 1.0 / (2.0 * r * r); }

    // Integral over Omega (dz dtheta dr) of |v0|^2/2 - ebar.
    double deficit(double t) const;
    // Variance of ebar over n_theta equispaced angles.
    double theta_variance(double r, double t, int n_theta = 16) const;

private:
    Domain dom_;
    FanParams fp_;
};

struct BreakingGrid {
    int nr = 256;
    int n_theta = 16;
    std::vector<double> times;
};

VerificationReport verify_breaking(const BreakingSubsolution& bs, const BreakingGrid& grid);

// f sampled on a space-time grid, for the burgers weak form; the t = 0 row holds r cell averages of the jump.
GridField sample_burgers(const BreakingSubsolution& bs, const Grid& grid);

struct BurgersStudy {
    std::vector<int> n;  // nr = nt; nz = 4
    std::vector<double> errors, orders;
    // least-squares slope of log error against log n; the kink positions relative to the nodes make
    // the constant oscillate between levels
    double fitted_order = 0.0;
};

// Max |burgers weak residual| of the sampled f over bumps straddling both fan edges and touching t = 0,
// under joint refinement of r and t.
BurgersStudy burgers_weak_study(const BreakingSubsolution& bs, std::uint64_t seed, const std::vector<int>& ns = {32, 64, 128, 256, 512},
                                std::size_t n_tests = 8);

}  // namespace we
