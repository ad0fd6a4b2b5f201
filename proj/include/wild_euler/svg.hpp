#pragma once

#include <string>
#include <vector>

namespace we {

struct Series {
    std::string label;
    std::vector<double> x, y;
};

struct Plot {
    std::string title, xlabel, ylabel;
    std::vector<Series> series;
    std::vector<double> vlines;  // dashed markers, e.g. T_max
    std::vector<double> hlines;
};

// Fixed size, fixed palette, numbers printed with %.6g: identical input gives identical bytes.
std::string render_svg(const Plot& plot);

}  // namespace we
