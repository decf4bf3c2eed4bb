#include "tlr/common.hpp"

#include <cstdio>

namespace tlr {

std::string format_double(double v, int significant) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant, v);
    return buf;
}

}  // namespace tlr
