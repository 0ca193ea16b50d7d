#pragma once

#include <cstddef>
#include <vector>

namespace lvw {

struct PhasePoint {
    double x = 0.0;
    double k = 0.0;
};

// Rectangular lattice of nx * nk nodes, endpoints included.  Field arrays are
// stored row-major with k fastest: index(i, j) = i * nk + j, i along x.
struct PhaseGrid {
    double x_min = -6.0, x_max = 6.0;
    double k_min = -6.0, k_max = 6.0;
    int nx = 241, nk = 241;

    void validate() const;
    double dx() const { return (x_max - x_min) / (nx - 1); }
    double dk() const { return (k_max - k_min) / (nk - 1); }
    double x(int i) const { return x_min + i * dx(); }
    double k(int j) const { return k_min + j * dk(); }
    PhasePoint point(int i, int j) const { return {x(i), k(j)}; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * nk; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * nk + j; }

    static PhaseGrid square(double half_width, int n) { return {-half_width, half_width, -half_width, half_width, n, n}; }
};

bool operator==(const PhaseGrid& a, const PhaseGrid& b);

struct Vec2 {
    double x = 0.0;
    double k = 0.0;
};

} // namespace lvw
