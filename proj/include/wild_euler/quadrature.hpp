#pragma once

#include <functional>
#include <vector>

namespace we {

// Double-exponential rule on [-1, 1]; suited to integrands that vanish to all orders at the ends.
struct TanhSinhRule {
    std::vector<double> x, w;
    explicit TanhSinhRule(double step = 1.0 / 8.0, double cutoff = 1e-300);
};

// Nodes and weights of the rule mapped to [a, b].
void map_rule(const TanhSinhRule& rule, double a, double b, std::vector<double>& x, std::vector<double>& w);

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 48);

// Sum of adaptive_simpson over consecutive breakpoints (sorted, clipped to [a, b]).
double adaptive_simpson_split(const std::function<double(double)>& f, double a, double b,
                              std::vector<double> breaks, double tol);

}  // namespace we
