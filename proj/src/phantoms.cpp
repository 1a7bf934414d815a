#include "afire/phantoms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace afire {

namespace {

bool contains(const EllipseSpec& e, double x, double y) {
    const double dx = x - e.cx, dy = y - e.cy;
    const double c = std::cos(e.rotation), s = std::sin(e.rotation);
    const double u = (c * dx + s * dy) / e.ax;
    const double v = (-s * dx + c * dy) / e.ay;
    return u * u + v * v <= 1.0;
}

} // namespace

BasisImageSet rasterize(const PhantomSpec& spec, const ImageGrid& grid) {
    for (const auto& e : spec.ellipses) {
        if (!(e.ax > 0.0) || !(e.ay > 0.0))
            throw std::invalid_argument("rasterize: ellipse semi-axes must be positive");
        if (e.densities.size() != spec.n_materials)
            throw std::invalid_argument("rasterize: ellipse density count does not match the spec");
    }
    BasisImageSet out = BasisImageSet::zeros(grid, spec.n_materials);
    for (int iy = 0; iy < grid.ny; ++iy) {
        const double y = grid.pixel_center_y(iy);
        for (int ix = 0; ix < grid.nx; ++ix) {
            const double x = grid.pixel_center_x(ix);
            const std::size_t i = static_cast<std::size_t>(iy) * grid.nx + ix;
            for (const auto& e : spec.ellipses) {
                if (!contains(e, x, y)) continue;
                for (std::size_t d = 0; d < spec.n_materials; ++d) out.images[d][i] += e.densities[d];
            }
            for (std::size_t d = 0; d < spec.n_materials; ++d)
                out.images[d][i] = std::clamp(out.images[d][i], 0.0, 1.0);
        }
    }
    return out;
}

PhantomSpec builtin_forbild_like() {
    PhantomSpec spec;
    spec.n_materials = 2;  // {water, bone}
    spec.ellipses = {
        // skull annulus: bone shell carved out by the interior
        {0.0, 0.0, 4.5, 4.3, 0.0, {0.0, 1.0}},
        {0.0, 0.0, 3.6, 3.4, 0.0, {0.8, -1.0}},
        // soft-tissue features
        {-1.1, 0.5, 0.9, 1.5, 0.3, {-0.15, 0.0}},
        {1.1, 0.5, 0.9, 1.5, -0.3, {-0.15, 0.0}},
        {0.0, -1.8, 1.2, 0.8, 0.0, {0.15, 0.0}},
        {0.3, 1.9, 0.5, 0.35, 0.5, {0.15, 0.0}},
        // calcified inserts: the only places water and bone overlap
        {-1.6, -0.9, 0.45, 0.45, 0.0, {0.0, 0.85}},
        {1.7, -1.2, 0.4, 0.4, 0.0, {0.0, 0.85}},
    };
    return spec;
}

BasisImageSet random_truth(const ImageGrid& grid, std::uint64_t seed, std::size_t n_materials) {
    BasisImageSet out = BasisImageSet::zeros(grid, n_materials);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& img : out.images)
        for (auto& v : img) {
            const double z = std::clamp(normal(rng), -3.0, 3.0);
            v = (z + 3.0) / 6.0;
        }
    return out;
}

} // namespace afire
