#ifndef GHOSTSIM_GRID_HPP
#define GHOSTSIM_GRID_HPP

#include <cmath>
#include <vector>

#include "ghostsim/errors.hpp"

namespace ghostsim {

/// Uniform 1D transverse grid with points x_i = (i - n/2) * spacing, so
/// x = 0 is always a grid point and the grid is centered on the axis.
struct TransverseGrid {
    int n = 0;
    double spacing = 0.0;   // m

    TransverseGrid() = default;
    TransverseGrid(int n_points, double dx) : n(n_points), spacing(dx) {
        if (n_points <= 1 || dx <= 0.0)
            throw InvalidParams("grid needs n > 1 and spacing > 0");
    }

    double position(int i) const { return (i - n / 2) * spacing; }

    std::vector<double> positions() const {
        std::vector<double> x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            x[static_cast<std::size_t>(i)] = position(i);
        return x;
    }

    /// Full covered width n * spacing.
    double extent() const { return n * spacing; }

    /// Index of the grid point nearest to x (clamped to the grid).
    int nearest_index(double x) const {
        int i = static_cast<int>(std::lround(x / spacing)) + n / 2;
        if (i < 0) i = 0;
        if (i >= n) i = n - 1;
        return i;
    }

    bool operator==(const TransverseGrid& o) const {
        return n == o.n && spacing == o.spacing;
    }
};

/// Uniform time grid, centered like TransverseGrid.
struct TimeGrid {
    int n = 0;
    double step = 0.0;      // s

    TimeGrid() = default;
    TimeGrid(int n_points, double dt) : n(n_points), step(dt) {
        if (n_points <= 1 || dt <= 0.0)
            throw InvalidParams("time grid needs n > 1 and step > 0");
    }

    double time(int i) const { return (i - n / 2) * step; }

    std::vector<double> times() const {
        std::vector<double> t(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            t[static_cast<std::size_t>(i)] = time(i);
        return t;
    }

    double extent() const { return n * step; }
};

} // namespace ghostsim

#endif // GHOSTSIM_GRID_HPP
