#include "wild_euler/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace we {

TanhSinhRule::TanhSinhRule(double step, double cutoff) {
    const double hp = std::numbers::pi / 2.0;
    for (int k = 0;; ++k) {
        const double t = k * step;
        const double u = hp * std::sinh(t);
        const double c = std::cosh(u);
        const double wk = step * hp * std::cosh(t) / (c * c);
        const double xk = std::tanh(u);
        if (wk < cutoff || xk >= 1.0) break;
        if (k == 0) {
            x.push_back(0.0);
            w.push_back(wk);
        } else {
            x.push_back(xk);
            w.push_back(wk);
            x.push_back(-xk);
            w.push_back(wk);
        }
    }
}

void map_rule(const TanhSinhRule& rule, double a, double b, std::vector<double>& x, std::vector<double>& w) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    x.resize(rule.x.size());
    w.resize(rule.w.size());
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        x[i] = mid + half * rule.x[i];
        w[i] = half * rule.w[i];
    }
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
    if (a == b) return 0.0;
    // Force a few levels so that narrow features are not missed by the first estimate.
    const int n = 8;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x0 = a + (b - a) * i / n, x1 = a + (b - a) * (i + 1) / n;
        const double f0 = f(x0), f1 = f(x1), xm = 0.5 * (x0 + x1), f2 = f(xm);
        const double s = (x1 - x0) / 6.0 * (f0 + 4.0 * f2 + f1);
        sum += simpson_rec(f, x0, x1, f0, f2, f1, s, tol / n, max_depth);
    }
    return sum;
}

double adaptive_simpson_split(const std::function<double(double)>& f, double a, double b,
                              std::vector<double> breaks, double tol) {
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double x) { return !(x > a && x < b); }),
                 breaks.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.insert(breaks.begin(), a);
    breaks.push_back(b);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        sum += adaptive_simpson(f, breaks[i], breaks[i + 1], tol / static_cast<double>(breaks.size()));
    return sum;
}

}  // namespace we
