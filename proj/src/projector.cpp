#include "afire/projector.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "afire/parallel.hpp"

namespace afire {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Ramp filter |nu| on the padded FFT grid, zeroed above cutoff (as a
// fraction of the detector Nyquist frequency). Symmetric so that filtering
// a real row returns a real row.
std::vector<double> ramp_weights(std::size_t padded, double spacing, double bandwidth) {
    const double dnu = 1.0 / (static_cast<double>(padded) * spacing);
    const double cutoff = bandwidth * 0.5 / spacing * (1.0 + 1e-12);
    std::vector<double> w(padded, 0.0);
    for (std::size_t k = 0; k <= padded / 2; ++k) {
        const double nu = k * dnu;
        if (nu <= cutoff) {
            w[k] = nu;
            if (k > 0 && k < padded - k) w[padded - k] = nu;
        }
    }
    return w;
}

// Filters rows[r][0..n_det) in place with the ramp at the given spacing.
void ramp_filter_rows(std::vector<std::vector<double>>& rows, double spacing, double bandwidth) {
    if (rows.empty()) return;
    const std::size_t n_det = rows[0].size();
    const std::size_t padded = next_pow2(2 * n_det);
    const std::vector<double> ramp = ramp_weights(padded, spacing, bandwidth);

    parallel_for(rows.size(), [&](std::size_t lo, std::size_t hi) {
        Eigen::FFT<double> fft;
        std::vector<std::complex<double>> time(padded), freq(padded);
        for (std::size_t r = lo; r < hi; ++r) {
            std::fill(time.begin(), time.end(), std::complex<double>(0.0, 0.0));
            for (std::size_t i = 0; i < n_det; ++i) time[i] = rows[r][i];
            fft.fwd(freq, time);
            for (std::size_t k = 0; k < padded; ++k) freq[k] *= ramp[k];
            fft.inv(time, freq);
            for (std::size_t i = 0; i < n_det; ++i) rows[r][i] = time[i].real();
        }
    });
}

double uniform_spacing(const std::vector<double>& offsets) {
    if (offsets.size() < 2)
        throw std::invalid_argument("fbp: need at least 2 detector offsets to filter");
    return (offsets.back() - offsets.front()) / static_cast<double>(offsets.size() - 1);
}

std::vector<std::vector<double>> sino_rows(const Sinogram& sino, std::size_t nv, std::size_t nd) {
    std::vector<std::vector<double>> rows(nv, std::vector<double>(nd));
    for (std::size_t v = 0; v < nv; ++v)
        for (std::size_t d = 0; d < nd; ++d) rows[v][d] = sino.values[v * nd + d];
    return rows;
}

std::vector<double> fbp_parallel(const Sinogram& sino, const ParallelGeometry& g,
                                 const ImageGrid& grid, double bandwidth) {
    if (g.angle_span < M_PI * (1.0 - 1e-9))
        throw std::invalid_argument("fbp: parallel scan must cover at least pi");
    const std::size_t nv = g.n_views(), nd = g.n_det();
    auto rows = sino_rows(sino, nv, nd);
    const double ds = uniform_spacing(g.det_offsets);
    ramp_filter_rows(rows, ds, bandwidth);

    std::vector<double> cosines(nv), sines(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        cosines[v] = std::cos(g.angles[v]);
        sines[v] = std::sin(g.angles[v]);
    }
    const double dtheta = g.angle_span / nv;
    const double scale = dtheta * (M_PI / g.angle_span);
    const double off0 = g.det_offsets.front();

    std::vector<double> image(grid.size(), 0.0);
    parallel_for(grid.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const int ix = static_cast<int>(i) % grid.nx;
            const int iy = static_cast<int>(i) / grid.nx;
            const double x = grid.pixel_center_x(ix);
            const double y = grid.pixel_center_y(iy);
            double acc = 0.0;
            for (std::size_t v = 0; v < nv; ++v) {
                const double s = -x * sines[v] + y * cosines[v];
                const double u = (s - off0) / ds;
                const auto i0 = static_cast<std::ptrdiff_t>(std::floor(u));
                if (i0 < 0 || i0 + 1 >= static_cast<std::ptrdiff_t>(nd)) continue;
                const double frac = u - static_cast<double>(i0);
                acc += (1.0 - frac) * rows[v][static_cast<std::size_t>(i0)] +
                       frac * rows[v][static_cast<std::size_t>(i0) + 1];
            }
            image[i] = scale * acc;
        }
    });
    return image;
}

std::vector<double> fbp_fan(const Sinogram& sino, const FanGeometry& g, const ImageGrid& grid,
                            double bandwidth) {
    if (g.angle_span < 2.0 * M_PI * (1.0 - 1e-9))
        throw std::invalid_argument("fbp: fan scan must cover 2*pi");
    const std::size_t nv = g.n_views(), nd = g.n_det();
    const double R = g.source_to_center;

    // work on the virtual detector through the isocenter
    const double du = g.det_width * R / g.source_to_detector;
    std::vector<double> uoff(nd);
    for (std::size_t d = 0; d < nd; ++d)
        uoff[d] = g.det_offset(static_cast<int>(d)) * R / g.source_to_detector;

    auto rows = sino_rows(sino, nv, nd);
    for (std::size_t v = 0; v < nv; ++v)
        for (std::size_t d = 0; d < nd; ++d)
            rows[v][d] *= R / std::sqrt(R * R + uoff[d] * uoff[d]);
    ramp_filter_rows(rows, du, bandwidth);

    std::vector<double> cosines(nv), sines(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        cosines[v] = std::cos(g.angles[v]);
        sines[v] = std::sin(g.angles[v]);
    }
    // full-scan redundancy factor 1/2
    const double dbeta = g.angle_span / nv;
    const double scale = 0.5 * dbeta;
    const double u0 = uoff.front();

    std::vector<double> image(grid.size(), 0.0);
    parallel_for(grid.size(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const int ix = static_cast<int>(i) % grid.nx;
            const int iy = static_cast<int>(i) / grid.nx;
            const double x = grid.pixel_center_x(ix);
            const double y = grid.pixel_center_y(iy);
            double acc = 0.0;
            for (std::size_t v = 0; v < nv; ++v) {
                const double along = x * cosines[v] + y * sines[v];   // r . omega
                const double lateral = -x * sines[v] + y * cosines[v];  // r . e
                const double denom = R - along;
                if (denom <= 0.0) continue;
                const double s = R * lateral / denom;
                const double u = (s - u0) / du;
                const auto i0 = static_cast<std::ptrdiff_t>(std::floor(u));
                if (i0 < 0 || i0 + 1 >= static_cast<std::ptrdiff_t>(nd)) continue;
                const double frac = u - static_cast<double>(i0);
                const double q = (1.0 - frac) * rows[v][static_cast<std::size_t>(i0)] +
                                 frac * rows[v][static_cast<std::size_t>(i0) + 1];
                const double invU = R / denom;
                acc += invU * invU * q;
            }
            image[i] = scale * acc;
        }
    });
    return image;
}

} // namespace

void trace_ray_into(const Ray& ray, const ImageGrid& grid, SparseRow& row) {
    row.clear();
    const double hx = grid.pixel_width(), hy = grid.pixel_height();
    const double tiny = 1e-12 * (hx + hy);

    // parameter interval of the line inside the grid box
    double t_lo = -kInf, t_hi = kInf;
    if (std::abs(ray.dir.x) > 0.0) {
        const double ta = (grid.x_min - ray.origin.x) / ray.dir.x;
        const double tb = (grid.x_max - ray.origin.x) / ray.dir.x;
        t_lo = std::max(t_lo, std::min(ta, tb));
        t_hi = std::min(t_hi, std::max(ta, tb));
    } else if (ray.origin.x <= grid.x_min || ray.origin.x >= grid.x_max) {
        return;
    }
    if (std::abs(ray.dir.y) > 0.0) {
        const double ta = (grid.y_min - ray.origin.y) / ray.dir.y;
        const double tb = (grid.y_max - ray.origin.y) / ray.dir.y;
        t_lo = std::max(t_lo, std::min(ta, tb));
        t_hi = std::min(t_hi, std::max(ta, tb));
    } else if (ray.origin.y <= grid.y_min || ray.origin.y >= grid.y_max) {
        return;
    }
    if (!(t_hi - t_lo > tiny)) return;

    // entry pixel from a point nudged inside the box
    const double tm = t_lo + std::min(0.5 * (t_hi - t_lo), tiny);
    auto cell_of = [](double p, double lo, double h, int n) {
        auto c = static_cast<int>(std::floor((p - lo) / h));
        return std::clamp(c, 0, n - 1);
    };
    int ix = cell_of(ray.origin.x + tm * ray.dir.x, grid.x_min, hx, grid.nx);
    int iy = cell_of(ray.origin.y + tm * ray.dir.y, grid.y_min, hy, grid.ny);

    const int step_x = ray.dir.x > 0.0 ? 1 : (ray.dir.x < 0.0 ? -1 : 0);
    const int step_y = ray.dir.y > 0.0 ? 1 : (ray.dir.y < 0.0 ? -1 : 0);
    const double t_delta_x = step_x != 0 ? hx / std::abs(ray.dir.x) : kInf;
    const double t_delta_y = step_y != 0 ? hy / std::abs(ray.dir.y) : kInf;
    auto next_boundary_x = [&](int cell) {
        const double edge = grid.x_min + (step_x > 0 ? cell + 1 : cell) * hx;
        return (edge - ray.origin.x) / ray.dir.x;
    };
    auto next_boundary_y = [&](int cell) {
        const double edge = grid.y_min + (step_y > 0 ? cell + 1 : cell) * hy;
        return (edge - ray.origin.y) / ray.dir.y;
    };
    double t_max_x = step_x != 0 ? next_boundary_x(ix) : kInf;
    double t_max_y = step_y != 0 ? next_boundary_y(iy) : kInf;

    double t = t_lo;
    while (t < t_hi - tiny) {
        const double t_next = std::min({t_max_x, t_max_y, t_hi});
        const double len = t_next - t;
        if (len > tiny) {
            row.pixels.push_back(static_cast<std::size_t>(iy) * grid.nx + ix);
            row.lengths.push_back(len);
        }
        if (t_next >= t_hi - tiny) break;
        // advance across every boundary hit at t_next (both on a corner)
        if (t_max_x <= t_next + tiny) {
            ix += step_x;
            t_max_x += t_delta_x;
        }
        if (t_max_y <= t_next + tiny) {
            iy += step_y;
            t_max_y += t_delta_y;
        }
        if (ix < 0 || ix >= grid.nx || iy < 0 || iy >= grid.ny) break;
        t = t_next;
    }
}

SparseRow trace_ray(const Ray& ray, const ImageGrid& grid) {
    SparseRow row;
    trace_ray_into(ray, grid, row);
    return row;
}

double dot_row(const SparseRow& row, std::span<const double> image) {
    double acc = 0.0;
    for (std::size_t k = 0; k < row.pixels.size(); ++k) acc += row.lengths[k] * image[row.pixels[k]];
    return acc;
}

Sinogram project(const ImageGrid& grid, std::span<const double> image, const GeometryPtr& geometry) {
    if (image.size() != grid.size())
        throw std::invalid_argument("project: image size does not match the grid");
    Sinogram sino;
    sino.geometry = geometry;
    sino.values.assign(ray_count(*geometry), 0.0);
    const std::size_t nd = n_det(*geometry);
    parallel_for_chunks(sino.values.size(), 4 * nd, [&](std::size_t lo, std::size_t hi) {
        SparseRow row;
        for (std::size_t j = lo; j < hi; ++j) {
            trace_ray_into(ray_at(*geometry, j), grid, row);
            sino.values[j] = dot_row(row, image);
        }
    });
    return sino;
}

std::vector<double> backproject(const ImageGrid& grid, const Sinogram& sino) {
    const auto& geom = *sino.geometry;
    if (sino.values.size() != ray_count(geom))
        throw std::invalid_argument("backproject: sinogram size does not match its geometry");
    const std::size_t n = sino.values.size();
    // fixed chunking keeps the accumulation order independent of the
    // thread count
    const std::size_t grain = std::max<std::size_t>(n_det(geom) * 8, 1024);
    const std::size_t n_chunks = (n + grain - 1) / grain;
    std::vector<std::vector<double>> partial(n_chunks);

    parallel_for_chunks(n, grain, [&](std::size_t lo, std::size_t hi) {
        auto& img = partial[lo / grain];
        img.assign(grid.size(), 0.0);
        SparseRow row;
        for (std::size_t j = lo; j < hi; ++j) {
            const double v = sino.values[j];
            if (v == 0.0) continue;
            trace_ray_into(ray_at(geom, j), grid, row);
            for (std::size_t k = 0; k < row.pixels.size(); ++k)
                img[row.pixels[k]] += row.lengths[k] * v;
        }
    });

    std::vector<double> out(grid.size(), 0.0);
    for (const auto& img : partial)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += img[i];
    return out;
}

std::vector<double> fbp(const Sinogram& sino, const ImageGrid& grid, double filter_bandwidth) {
    if (!(filter_bandwidth > 0.0) || filter_bandwidth > 1.0)
        throw std::invalid_argument("fbp: filter bandwidth must lie in (0, 1]");
    const auto& geom = *sino.geometry;
    if (sino.values.size() != ray_count(geom))
        throw std::invalid_argument("fbp: sinogram size does not match its geometry");
    if (const auto* par = std::get_if<ParallelGeometry>(&geom))
        return fbp_parallel(sino, *par, grid, filter_bandwidth);
    return fbp_fan(sino, std::get<FanGeometry>(geom), grid, filter_bandwidth);
}

ApproxInverseResult approx_inverse(const Sinogram& sino, const ImageGrid& grid,
                                   const InverseMethod& method) {
    ApproxInverseResult res;
    if (method.kind == InverseMethod::Kind::FBP) {
        res.image = fbp(sino, grid, method.bandwidth);
        return res;
    }
    if (method.n_inner < 0) throw std::invalid_argument("approx_inverse: n_inner must be >= 0");

    // CG on the normal equations P^T P x = P^T b, zero start
    const std::size_t I = grid.size();
    res.image.assign(I, 0.0);
    std::vector<double> r = backproject(grid, sino);
    std::vector<double> p = r;
    double rho = 0.0;
    for (double v : r) rho += v * v;
    if (rho == 0.0) return res;

    for (int it = 0; it < method.n_inner; ++it) {
        const Sinogram w = project(grid, p, sino.geometry);
        const std::vector<double> q = backproject(grid, w);
        double curvature = 0.0;
        for (double v : w.values) curvature += v * v;
        if (!(curvature > 0.0) || !std::isfinite(curvature)) {
            res.cg_breakdown = true;
            break;
        }
        const double alpha = rho / curvature;
        double rho_next = 0.0;
        for (std::size_t i = 0; i < I; ++i) {
            res.image[i] += alpha * p[i];
            r[i] -= alpha * q[i];
            rho_next += r[i] * r[i];
        }
        if (rho_next == 0.0) break;
        const double beta = rho_next / rho;
        for (std::size_t i = 0; i < I; ++i) p[i] = r[i] + beta * p[i];
        rho = rho_next;
    }
    return res;
}

} // namespace afire
