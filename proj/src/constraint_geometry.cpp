#include "wild_euler/constraint_geometry.hpp"

namespace we {

const char* to_string(HullClass c) {
    switch (c) {
        case HullClass::in_K: return "in_K";
        case HullClass::in_hull: return "in_hull";
        case HullClass::in_hyperinterior: return "in_hyperinterior";
        case HullClass::outside: return "outside";
    }
    return "unknown";
}

}  // namespace we
