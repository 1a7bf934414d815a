#include "afire/forward.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "afire/parallel.hpp"

namespace afire {

namespace {

void check_dims(const SpectralSystem& system, const std::vector<GeometryPtr>& geometries,
                const BasisImageSet& f) {
    if (geometries.size() != system.n_spectra())
        throw std::invalid_argument("forward: need one geometry per spectrum");
    if (f.n_materials() != system.n_materials())
        throw std::invalid_argument("forward: basis image count does not match the spectral system");
    for (const auto& img : f.images)
        if (img.size() != f.grid.size())
            throw std::invalid_argument("forward: basis image size does not match the grid");
}

// h_q at line integrals a, with the max-shifted exponential sum expressed
// relative to the cached spectrum sum so that a = 0 maps to exactly 0.
double transfer(const SpectralSystem& system, std::size_t q, const double* a, std::size_t d_count) {
    const std::size_t m = system.n_bins();
    const auto& s = system.spectra[q];
    double z_max = -std::numeric_limits<double>::infinity();
    double z_buf[8];
    std::vector<double> z_heap;
    double* z = m <= 8 ? z_buf : (z_heap.resize(m), z_heap.data());
    for (std::size_t i = 0; i < m; ++i) {
        double zi = 0.0;
        for (std::size_t d = 0; d < d_count; ++d) zi -= system.macs[d][i] * a[d];
        z[i] = zi;
        if (zi > z_max) z_max = zi;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += s[i] * std::exp(z[i] - z_max);
    return z_max + std::log(acc / system.spectrum_sums[q]);
}

} // namespace

double ray_transfer(const SpectralSystem& system, std::size_t q, std::span<const double> a) {
    if (q >= system.n_spectra()) throw std::invalid_argument("ray_transfer: spectrum index out of range");
    if (a.size() != system.n_materials())
        throw std::invalid_argument("ray_transfer: expected one line integral per material");
    return transfer(system, q, a.data(), a.size());
}

std::vector<double> ray_transfer_jacobian(const SpectralSystem& system, std::size_t q,
                                          std::span<const double> a) {
    const auto w = spectral_weights(system, q, a);
    std::vector<double> jac(system.n_materials(), 0.0);
    for (std::size_t d = 0; d < jac.size(); ++d) {
        double acc = 0.0;
        for (std::size_t m = 0; m < w.size(); ++m) acc += system.macs[d][m] * w[m];
        jac[d] = -acc;
    }
    return jac;
}

MultiSinogram forward(const SpectralSystem& system, const std::vector<GeometryPtr>& geometries,
                      const BasisImageSet& f) {
    check_dims(system, geometries, f);
    const std::size_t d_count = f.n_materials();
    MultiSinogram out(geometries.size());
    for (std::size_t q = 0; q < geometries.size(); ++q) {
        auto& sino = out[q];
        sino.geometry = geometries[q];
        sino.values.assign(ray_count(*geometries[q]), 0.0);
        const std::size_t nd = n_det(*geometries[q]);
        parallel_for_chunks(sino.values.size(), 4 * nd, [&](std::size_t lo, std::size_t hi) {
            SparseRow row;
            std::vector<double> a(d_count);
            for (std::size_t j = lo; j < hi; ++j) {
                trace_ray_into(ray_at(*geometries[q], j), f.grid, row);
                for (std::size_t d = 0; d < d_count; ++d) a[d] = dot_row(row, f.images[d]);
                sino.values[j] = transfer(system, q, a.data(), d_count);
            }
        });
    }
    return out;
}

GradientRow gradient_row(const SpectralSystem& system, const ScanGeometry& geometry,
                         const BasisImageSet& f, std::size_t q, std::size_t j) {
    if (q >= system.n_spectra()) throw std::invalid_argument("gradient_row: spectrum index out of range");
    if (j >= ray_count(geometry)) throw std::invalid_argument("gradient_row: ray index out of range");
    const std::size_t d_count = f.n_materials();

    GradientRow out;
    out.ray = trace_ray(ray_at(geometry, j), f.grid);
    std::vector<double> a(d_count);
    for (std::size_t d = 0; d < d_count; ++d) a[d] = dot_row(out.ray, f.images[d]);
    out.block_scale = ray_transfer_jacobian(system, q, a);
    return out;
}

MultiSinogram add_noise(const MultiSinogram& g, double snr_db, std::uint64_t seed) {
    if (std::isinf(snr_db)) return g;
    if (!std::isfinite(snr_db)) throw std::invalid_argument("add_noise: snr_db must be finite or +inf");
    const double signal = stacked_norm(g);
    if (!(signal > 0.0)) throw std::invalid_argument("add_noise: data has zero norm");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> noise(g.size());
    double noise_norm_sq = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) {
        noise[q].resize(g[q].values.size());
        for (auto& v : noise[q]) {
            v = normal(rng);
            noise_norm_sq += v * v;
        }
    }
    // rescale so 20*log10(||g|| / ||noise||) is snr_db by construction
    const double target = signal / std::pow(10.0, snr_db / 20.0);
    const double scale = target / std::sqrt(noise_norm_sq);

    MultiSinogram out = g;
    for (std::size_t q = 0; q < out.size(); ++q)
        for (std::size_t j = 0; j < out[q].values.size(); ++j)
            out[q].values[j] += scale * noise[q][j];
    return out;
}

double stacked_norm(const MultiSinogram& g) {
    double acc = 0.0;
    for (const auto& sino : g)
        for (double v : sino.values) acc += v * v;
    return std::sqrt(acc);
}

double stacked_norm(const BasisImageSet& f) {
    double acc = 0.0;
    for (const auto& img : f.images)
        for (double v : img) acc += v * v;
    return std::sqrt(acc);
}

double stacked_distance(const MultiSinogram& a, const MultiSinogram& b) {
    if (a.size() != b.size()) throw std::invalid_argument("stacked_distance: component count mismatch");
    double acc = 0.0;
    for (std::size_t q = 0; q < a.size(); ++q) {
        if (a[q].values.size() != b[q].values.size())
            throw std::invalid_argument("stacked_distance: component size mismatch");
        for (std::size_t j = 0; j < a[q].values.size(); ++j) {
            const double d = a[q].values[j] - b[q].values[j];
            acc += d * d;
        }
    }
    return std::sqrt(acc);
}

double stacked_distance(const BasisImageSet& a, const BasisImageSet& b) {
    if (a.images.size() != b.images.size())
        throw std::invalid_argument("stacked_distance: material count mismatch");
    double acc = 0.0;
    for (std::size_t d = 0; d < a.images.size(); ++d) {
        if (a.images[d].size() != b.images[d].size())
            throw std::invalid_argument("stacked_distance: image size mismatch");
        for (std::size_t i = 0; i < a.images[d].size(); ++i) {
            const double diff = a.images[d][i] - b.images[d][i];
            acc += diff * diff;
        }
    }
    return std::sqrt(acc);
}

} // namespace afire
