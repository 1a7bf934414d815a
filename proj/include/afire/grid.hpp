#pragma once

#include <cstddef>
#include <stdexcept>

namespace afire {

/// Uniform 2D pixel grid. Pixels are squares of constant value; pixel
/// (ix, iy) has its center at (x_min + (ix+0.5)*dx, y_min + (iy+0.5)*dy)
/// and images are stored row-major with index iy*nx + ix.
struct ImageGrid {
    int nx = 0;
    int ny = 0;
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    ImageGrid() = default;
    ImageGrid(int nx_, int ny_, double x_min_, double x_max_, double y_min_, double y_max_)
        : nx(nx_), ny(ny_), x_min(x_min_), x_max(x_max_), y_min(y_min_), y_max(y_max_) {
        if (nx < 1 || ny < 1) throw std::invalid_argument("ImageGrid: pixel counts must be >= 1");
        if (!(x_max > x_min) || !(y_max > y_min))
            throw std::invalid_argument("ImageGrid: empty physical extent");
    }

    double pixel_width() const { return (x_max - x_min) / nx; }
    double pixel_height() const { return (y_max - y_min) / ny; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    double pixel_center_x(int ix) const { return x_min + (ix + 0.5) * pixel_width(); }
    double pixel_center_y(int iy) const { return y_min + (iy + 0.5) * pixel_height(); }
};

/// Grid centered on the origin covering [-half_extent, half_extent]^2.
inline ImageGrid make_centered_grid(int n, double half_extent) {
    return ImageGrid(n, n, -half_extent, half_extent, -half_extent, half_extent);
}

} // namespace afire
