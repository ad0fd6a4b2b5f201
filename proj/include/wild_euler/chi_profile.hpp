#pragma once

#include <optional>
#include <vector>

namespace we {

enum class ChiOrigin { ode, user };

// Time-sampled chi with derivative; evaluated between nodes by cubic Hermite interpolation.
struct ChiProfile {
    std::vector<double> t, chi, dchi;
    ChiOrigin origin = ChiOrigin::user;
    std::optional<double> extinction;  // first time chi reaches 0
    double error_estimate = 0.0;        // step-halving estimate of max nodal error

    static ChiProfile constant(double value, double T);

    double value_at(double time) const;
    double derivative_at(double time) const;
    double T() const { return t.back(); }
    void validate() const;
};

}  // namespace we
