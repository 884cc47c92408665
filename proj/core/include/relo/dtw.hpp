#pragma once

#include <span>

namespace relo {

// Dynamic time warping distance with absolute-difference local cost and an
// unconstrained warping window. O(|x|*|y|) time, O(min) memory.
// Throws on empty input.
double dtw(std::span<const double> x, std::span<const double> y);

}  // namespace relo
