#pragma once

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wild_euler/constraint_geometry.hpp"
#include "wild_euler/fields.hpp"
#include "wild_euler/subsolution.hpp"

namespace we {

// The t = 0 slice of a subsolution, with the time derivative of m carried along.
struct LaminateState {
    GridField m;    // vec2, always m0 + rotated gradient of psi
    GridField m0;   // vec2, unperturbed
    GridField psi;  // scalar, accumulated stream function
    GridField dtm;  // vec2
    GridField U;    // sym2-traceless
    GridField q;    // scalar
    double chi = 0.0;
    DensityPressure<double> dp{};

    const Grid& grid() const { return m.grid(); }
};

LaminateState make_laminate_state(const SubsolutionState& sub, double chi);

struct LaminateOptions {
    int N = 32;                    // wave number of the oscillation
    double safety = 0.5;           // amplitude = safety * (chi/2 - e) at the centre
    int n_angles = 16;
    int max_halvings = 6;
    int max_centres = 16;          // fallback centres tried before giving up
    double cutoff_fraction = 0.125;
    double residual_tol = 0.05;    // H^-1 norm of the linear-system residual
};

struct LaminateStep {
    int ir = 0, iz = 0;
    double rc = 0.0, zc = 0.0;
    double ar = 0.0, az = 0.0;     // cutoff radii
    double angle = 0.0;            // direction of the spatial wave vector
    double xi_t = 0.0;
    Eigen::Vector3d xi = Eigen::Vector3d::Zero();  // unit (xi_r, xi_z, xi_t)
    State<double> direction;      // (e2, -xi_t (e1 e2^T + e2 e1^T), 0)
    int N = 32;
    double amplitude = 0.0;
    double projected_gain = 0.0;
    int halvings = 0;
};

// Node with the largest positive pointwise gap rho0 chi - |m|^2 (ties: lowest (ir, iz)) among nodes where
// the cutoff fits, skipping nodes inside the cutoff support of an excluded centre (r, z).
// Throws Saturated if no node has positive gap and hull margin, StepRejected if only excluded ones do.
// Amplitude 0 means no direction keeps the centre segment inside the hull.
LaminateStep propose_step(const LaminateState& state, const LaminateOptions& opt = {},
                          const std::vector<std::pair<double, double>>& excluded = {});

LaminateState apply_step(const LaminateState& state, const LaminateStep& step);

// Integral over the slice (dz dr) of rho0 chi - |m|^2.
double energy_gap(const LaminateState& state);
// min over nodes of chi/2 - e.
double min_hull_margin(const LaminateState& state);
// max |D_r m_r + D_z m_z| over nodes.
double max_divergence(const LaminateState& state);
bool boundary_mr_zero(const LaminateState& state);

// H^-1 norm of dtm + div U + grad q: -Lap w = residual, Dirichlet in r, periodic in z.
class ResidualNorm {
public:
    explicit ResidualNorm(const Grid& slice);
    ~ResidualNorm();
    ResidualNorm(ResidualNorm&&) noexcept;
    ResidualNorm& operator=(ResidualNorm&&) noexcept;

    double operator()(const LaminateState& state) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct StepRecord {
    int k = 0;
    double gap = 0.0;
    double residual = 0.0;
    double min_margin = 0.0;
    double max_div = 0.0;
    double gain = 0.0;
    LaminateStep step;
    int centre_rank = 0;  // centres rejected before this one
};

struct IterationTrace {
    double gap0 = 0.0, residual0 = 0.0, margin0 = 0.0;
    std::vector<StepRecord> steps;
    bool saturated = false;
    double fitted_c = 0.0;            // min over k of (G_k - G_{k+1}) / G_k^2
    double exponent = 0.0;            // least-squares p in G_k - G_{k+1} ~ c G_k^p
    bool exponent_identifiable = false;  // false when log G spans too little to fit p
    double residual_constant = 0.0;   // max per-step increase * N / (|a| ||grad eta||)
    LaminateState final_state;
};

IterationTrace run_iteration(const LaminateState& state, int K, const LaminateOptions& opt = {});

// The recorded steps again with wave number N; no hull check. Isolates the N dependence of the residual.
LaminateState replay_steps(const LaminateState& state, const std::vector<StepRecord>& steps, int N);

}  // namespace we
