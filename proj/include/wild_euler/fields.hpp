#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wild_euler/errors.hpp"

namespace we {

struct Domain {
    double delta = 0.5;
    double R = 2.0;
    double z_period = 1.0;
    double T = 1.0;

    void validate() const;
    bool operator==(const Domain&) const = default;
};

enum class Rank { Scalar, Vec2, Sym2Traceless, Sym2 };

int components(Rank rank);

// r nodes delta + i*h_r (i = 0..nr), z nodes (j + 1/2)*h_z (j = 0..nz-1), t nodes k*h_t (k = 0..nt).
// nt = 0 describes a single slice at t = 0.
struct Grid {
    Domain domain;
    int nr = 128, nz = 128, nt = 64;

    double hr() const { return (domain.R - domain.delta) / nr; }
    double hz() const { return domain.z_period / nz; }
    double ht() const { return nt > 0 ? domain.T / nt : 0.0; }
    double r(int i) const { return domain.delta + i * hr(); }
    double z(int j) const { return (j + 0.5) * hz(); }
    double t(int k) const { return k * ht(); }
    int n_r() const { return nr + 1; }
    int n_t() const { return nt + 1; }
    std::size_t nodes() const { return static_cast<std::size_t>(n_r()) * nz * n_t(); }

    void validate() const;
    Grid slice() const { return {domain, nr, nz, 0}; }
    bool operator==(const Grid&) const = default;
};

class GridField {
public:
    using Sampler = std::function<void(double r, double z, double t, double* out)>;

    GridField() = default;
    GridField(const Grid& grid, Rank rank);

    static GridField sample(const Grid& grid, Rank rank, const Sampler& fn);

    double& operator()(int ir, int iz, int it, int c = 0) { return data_[index(ir, iz, it, c)]; }
    double operator()(int ir, int iz, int it, int c = 0) const { return data_[index(ir, iz, it, c)]; }

    const Grid& grid() const { return grid_; }
    Rank rank() const { return rank_; }
    int ncomp() const { return ncomp_; }
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    GridField slice(int it) const;
    void check_finite() const;
    double max_abs(int c) const;

private:
    std::size_t index(int ir, int iz, int it, int c) const {
        return ((static_cast<std::size_t>(it) * grid_.nz + iz) * grid_.n_r() + ir) * ncomp_ + c;
    }

    Grid grid_{};
    Rank rank_ = Rank::Scalar;
    int ncomp_ = 1;
    std::vector<double> data_;
};

enum class Axis { r, z, t };

GridField fd_derivative(const GridField& f, Axis axis);

enum class Weight { one, r };

// Trapezoid in r, midpoint in periodic z, on the slice it.
double integrate(const GridField& f, int it, Weight weight, int component = 0);
// As above, then trapezoid in t.
double integrate_spacetime(const GridField& f, Weight weight, int component = 0);

// Header r,z,t,<names>; t outer, z middle, r inner; 17 significant digits.
std::string to_csv(const GridField& f, const std::vector<std::string>& names);

// Tensor bump exp(-1/(1-s^2)) in each of r, z (periodic) and t.
struct BumpTestFn {
    double rc = 1.0, zc = 0.5, tc = 0.0;
    double ar = 0.25, az = 0.25, at = 0.25;
    bool vector_valued = false;
    std::array<double, 2> dir{1.0, 0.0};

    static double profile(double s);
    static double dprofile(double s);
    static double d2profile(double s);

    // Periodic z displacement from the centre in (-period/2, period/2].
    double dz(double z, double period) const;

    void validate(const Domain& dom) const;
    bool disjoint_from(const Domain& dom) const;
};

struct BumpOptions {
    std::array<double, 2> ar{0.55, 0.7};
    std::array<double, 2> az{0.35, 0.45};
    std::array<double, 2> at{0.4, 0.55};
    std::array<double, 2> tc_fraction{0.1, 0.4};  // tc = fraction * at
    bool vector_valued = true;
};

std::vector<BumpTestFn> random_bumps(const Domain& dom, std::size_t n, std::uint64_t seed,
                                     const BumpOptions& opt = {});

struct TestFunction {
    std::vector<std::pair<double, BumpTestFn>> terms;

    TestFunction() = default;
    TestFunction(const BumpTestFn& b) : terms{{1.0, b}} {}
};

enum class WeakForm {
    CompressibleContinuity,
    CompressibleMomentum,
    AxisymMomentum,
    AxisymDivergence,
    CompressibleEnergy,
    AxisymEnergy,
    Burgers,
};

WeakForm parse_weak_form(const std::string& tag);
const char* to_string(WeakForm form);

using AnalyticField = std::function<double(double r, double z, double t)>;

// Grid fields by name; analytic entries add to the grid entry of the same name.
// Analytic terms that enter a form linearly (rho in continuity, q in compressible momentum,
// pi in axisymmetric momentum) are integrated with tanh-sinh quadrature on the bump support;
// everywhere else analytic entries are sampled at grid nodes.
//
// Field names: rho, m, U, q (compressible); v, F, pi (axisymmetric); f (burgers).
struct FieldSet {
    std::map<std::string, GridField> grid;
    std::map<std::string, AnalyticField> analytic;
    double gamma = 2.0;
    double lambda = 0.1;

    bool has(const std::string& name) const { return grid.count(name) || analytic.count(name); }
};

struct WeakResult {
    double value = 0.0;
    double scale = 0.0;  // quadrature of the absolute values of the individual terms
};

std::vector<WeakResult> weak_residual(WeakForm form, const FieldSet& fields, const std::vector<TestFunction>& tests);

}  // namespace we
