#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "afire/grid.hpp"
#include "afire/projector.hpp"
#include "afire/spectral.hpp"

namespace afire {

/// The unknown: one density image per basis material on a shared grid.
struct BasisImageSet {
    ImageGrid grid;
    std::vector<std::vector<double>> images;  // D images of grid.size() values

    std::size_t n_materials() const { return images.size(); }
    static BasisImageSet zeros(const ImageGrid& grid, std::size_t d) {
        BasisImageSet f;
        f.grid = grid;
        f.images.assign(d, std::vector<double>(grid.size(), 0.0));
        return f;
    }
};

using MultiSinogram = std::vector<Sinogram>;

/// Log-domain transfer map of spectrum q evaluated at per-material line
/// integrals a: h_q(a) = ln sum_m s_m exp(-sum_d b_dm a_d). Stable for any
/// finite a and exactly 0 at a = 0.
double ray_transfer(const SpectralSystem& system, std::size_t q, std::span<const double> a);

/// d h_q / d a_d = -b_d^T w(a).
std::vector<double> ray_transfer_jacobian(const SpectralSystem& system, std::size_t q,
                                          std::span<const double> a);

/// Polychromatic forward operator: per spectrum q and ray j,
/// K_j = h_q(p_j . f_1, ..., p_j . f_D).
MultiSinogram forward(const SpectralSystem& system, const std::vector<GeometryPtr>& geometries,
                      const BasisImageSet& f);

/// Gradient of K_j^[q] at f. Block d of the full row over the stacked
/// unknowns equals block_scale[d] times the traced ray.
struct GradientRow {
    SparseRow ray;
    std::vector<double> block_scale;  // -(w^T b_d) per material
};

GradientRow gradient_row(const SpectralSystem& system, const ScanGeometry& geometry,
                         const BasisImageSet& f, std::size_t q, std::size_t j);

/// Adds white Gaussian noise to the stacked data, rescaled after sampling
/// so the L2 signal-to-noise ratio is exactly snr_db. An infinite snr_db
/// returns the input unchanged. Deterministic per seed.
MultiSinogram add_noise(const MultiSinogram& g, double snr_db, std::uint64_t seed);

/// L2 norm over all stacked sinogram components.
double stacked_norm(const MultiSinogram& g);
/// L2 norm over all stacked basis images.
double stacked_norm(const BasisImageSet& f);
/// L2 distance over stacked components (sizes must match).
double stacked_distance(const MultiSinogram& a, const MultiSinogram& b);
double stacked_distance(const BasisImageSet& a, const BasisImageSet& b);

} // namespace afire
