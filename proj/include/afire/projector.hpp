#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "afire/geometry.hpp"
#include "afire/grid.hpp"

namespace afire {

/// One row of a projection matrix: the pixels a ray crosses and the
/// intersection length within each, in cm. Indices are unique and lengths
/// strictly positive.
struct SparseRow {
    std::vector<std::size_t> pixels;
    std::vector<double> lengths;

    std::size_t size() const { return pixels.size(); }
    void clear() {
        pixels.clear();
        lengths.clear();
    }
};

/// Per-spectrum measurement array, view-major, tied to the geometry that
/// produced it.
struct Sinogram {
    GeometryPtr geometry;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Siddon trace of the (infinite) line carrying `ray` against the grid.
/// A ray that misses the grid yields an empty row.
SparseRow trace_ray(const Ray& ray, const ImageGrid& grid);

/// Trace into a caller-owned row, reusing its capacity.
void trace_ray_into(const Ray& ray, const ImageGrid& grid, SparseRow& row);

/// Line integral of `image` along the traced row.
double dot_row(const SparseRow& row, std::span<const double> image);

Sinogram project(const ImageGrid& grid, std::span<const double> image, const GeometryPtr& geometry);

/// Exact transpose action of project.
std::vector<double> backproject(const ImageGrid& grid, const Sinogram& sino);

/// Filtered backprojection with a Ram-Lak ramp cut off at
/// filter_bandwidth * Nyquist. Parallel geometries need angular coverage
/// >= pi, fan geometries a full 2*pi scan.
std::vector<double> fbp(const Sinogram& sino, const ImageGrid& grid, double filter_bandwidth = 1.0);

struct InverseMethod {
    enum class Kind { FBP, CG };
    Kind kind = Kind::FBP;
    double bandwidth = 1.0;  // FBP: fraction of Nyquist in (0, 1]
    int n_inner = 20;        // CG: iterations on the normal equations

    static InverseMethod make_fbp(double bandwidth = 1.0) {
        return {Kind::FBP, bandwidth, 0};
    }
    static InverseMethod make_cg(int n_inner) { return {Kind::CG, 1.0, n_inner}; }
};

struct ApproxInverseResult {
    std::vector<double> image;
    bool cg_breakdown = false;  // CG hit a zero-curvature direction and stopped early
};

/// Approximate inverse P+ applied to a sinogram: either FBP (delegates to
/// fbp) or CG on the normal equations P^T P x = P^T b from a zero start.
ApproxInverseResult approx_inverse(const Sinogram& sino, const ImageGrid& grid,
                                   const InverseMethod& method);

} // namespace afire
