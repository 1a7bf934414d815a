#pragma once

#include <cstdint>
#include <vector>

#include "afire/forward.hpp"
#include "afire/grid.hpp"

namespace afire {

/// Rotated ellipse with one additive density per basis material. Negative
/// densities carve out previously added material.
struct EllipseSpec {
    double cx = 0.0, cy = 0.0;       // center, cm
    double ax = 1.0, ay = 1.0;       // semi-axes, cm
    double rotation = 0.0;           // radians
    std::vector<double> densities;   // one per material
};

struct PhantomSpec {
    std::vector<EllipseSpec> ellipses;
    std::size_t n_materials = 2;
};

/// Pixel value = sum of the densities of the ellipses containing the pixel
/// center, clamped to [0, 1].
BasisImageSet rasterize(const PhantomSpec& spec, const ImageGrid& grid);

/// Water/bone head phantom: a bone annulus around a water interior with a
/// few soft-tissue features and two mixed inserts.
PhantomSpec builtin_forbild_like();

/// Per-pixel iid standard normals clamped at +-3 sigma and rescaled into
/// [0, 1]. Deterministic per seed.
BasisImageSet random_truth(const ImageGrid& grid, std::uint64_t seed, std::size_t n_materials = 2);

} // namespace afire
