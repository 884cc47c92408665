#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace relo {

// Dense N1 x N2 row-major matrix of doubles.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), v(static_cast<size_t>(r) * c, fill) {}

    double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
};

// Dense N1 x N2 x N3 tensor, t fastest-varying. Indices are 0-based; the
// time axis stores slot t (1-based in formulas) at position t-1.
struct Tensor3 {
    int n1 = 0;
    int n2 = 0;
    int n3 = 0;
    std::vector<double> v;

    Tensor3() = default;
    Tensor3(int a, int b, int c, double fill = 0.0)
        : n1(a), n2(b), n3(c), v(static_cast<size_t>(a) * b * c, fill) {}

    size_t idx(int i, int j, int t) const {
        return (static_cast<size_t>(i) * n2 + j) * n3 + t;
    }
    double& at(int i, int j, int t) { return v[idx(i, j, t)]; }
    double at(int i, int j, int t) const { return v[idx(i, j, t)]; }

    double sum() const;
    double max() const;
    double min_positive() const;  // throws if no positive entry
};

// Tensor with per-entry presence flags, for sparse historical grids.
struct MaskedTensor3 {
    Tensor3 values;
    std::vector<uint8_t> present;

    MaskedTensor3() = default;
    MaskedTensor3(int a, int b, int c)
        : values(a, b, c, 0.0), present(static_cast<size_t>(a) * b * c, 0) {}

    void set(int i, int j, int t, double x) {
        const size_t k = values.idx(i, j, t);
        values.v[k] = x;
        present[k] = 1;
    }
    bool has(int i, int j, int t) const { return present[values.idx(i, j, t)] != 0; }
    double fill_rate() const;
};

}  // namespace relo
