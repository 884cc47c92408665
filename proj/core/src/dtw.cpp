#include "relo/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace relo {

double dtw(std::span<const double> x, std::span<const double> y) {
    if (x.empty() || y.empty()) throw std::invalid_argument("dtw: empty series");
    const size_t n = x.size(), m = y.size();
    const double inf = std::numeric_limits<double>::infinity();

    // rolling rows of the (n+1) x (m+1) accumulated-cost table
    std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
    prev[0] = 0.0;
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = inf;
        for (size_t j = 1; j <= m; ++j) {
            const double cost = std::abs(x[i - 1] - y[j - 1]);
            cur[j] = cost + std::min({prev[j], cur[j - 1], prev[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

}  // namespace relo
