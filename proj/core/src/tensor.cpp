#include "relo/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relo {

double Tensor3::sum() const {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

double Tensor3::max() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    return m;
}

double Tensor3::min_positive() const {
    double m = std::numeric_limits<double>::infinity();
    for (double x : v)
        if (x > 0.0) m = std::min(m, x);
    if (!std::isfinite(m)) throw std::runtime_error("tensor has no positive entry");
    return m;
}

double MaskedTensor3::fill_rate() const {
    if (present.empty()) return 0.0;
    size_t n = 0;
    for (uint8_t p : present) n += p;
    return static_cast<double>(n) / static_cast<double>(present.size());
}

}  // namespace relo
