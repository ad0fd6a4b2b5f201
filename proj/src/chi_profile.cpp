#include "wild_euler/chi_profile.hpp"

#include <algorithm>
#include <cmath>

#include "wild_euler/errors.hpp"

namespace we {

ChiProfile ChiProfile::constant(double value, double T) {
    ChiProfile p;
    p.t = {0.0, T};
    p.chi = {value, value};
    p.dchi = {0.0, 0.0};
    p.origin = ChiOrigin::user;
    return p;
}

void ChiProfile::validate() const {
    if (t.size() < 2 || chi.size() != t.size() || dchi.size() != t.size())
        throw Error(ErrorCode::InvalidField, "chi profile needs matching samples");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(std::isfinite(t[i]) && std::isfinite(chi[i]) && std::isfinite(dchi[i])))
            throw Error(ErrorCode::InvalidField, "non-finite chi sample");
        if (chi[i] < 0.0) throw Error(ErrorCode::NegativeChi, "chi below zero");
        if (i && !(t[i] > t[i - 1])) throw Error(ErrorCode::InvalidField, "chi times must increase");
    }
}

namespace {

std::size_t locate(const std::vector<double>& t, double time) {
    if (time <= t.front()) return 0;
    if (time >= t.back()) return t.size() - 2;
    auto it = std::upper_bound(t.begin(), t.end(), time);
    return static_cast<std::size_t>(it - t.begin()) - 1;
}

}  // namespace

double ChiProfile::value_at(double time) const {
    const std::size_t i = locate(t, time);
    const double h = t[i + 1] - t[i];
    const double s = std::clamp((time - t[i]) / h, 0.0, 1.0);
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return std::max(0.0, h00 * chi[i] + h10 * h * dchi[i] + h01 * chi[i + 1] + h11 * h * dchi[i + 1]);
}

double ChiProfile::derivative_at(double time) const {
    const std::size_t i = locate(t, time);
    const double h = t[i + 1] - t[i];
    const double s = std::clamp((time - t[i]) / h, 0.0, 1.0);
    const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
    const double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
    return (d00 * chi[i] + d01 * chi[i + 1]) / h + d10 * dchi[i] + d11 * dchi[i + 1];
}

}  // namespace we
