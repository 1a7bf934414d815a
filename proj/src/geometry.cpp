#include "afire/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace afire {

ParallelGeometry make_parallel_geometry(int n_views, double angle_start, double angle_span,
                                        int n_det, double det_lo, double det_hi) {
    if (n_views < 1) throw std::invalid_argument("make_parallel_geometry: n_views must be >= 1");
    if (n_det < 1) throw std::invalid_argument("make_parallel_geometry: n_det must be >= 1");
    if (!(det_hi > det_lo)) throw std::invalid_argument("make_parallel_geometry: empty detector interval");
    if (!(angle_span > 0.0)) throw std::invalid_argument("make_parallel_geometry: angle_span must be > 0");

    ParallelGeometry g;
    g.angle_span = angle_span;
    g.angles.resize(static_cast<std::size_t>(n_views));
    // half-open sampling of [start, start + span)
    const double dtheta = angle_span / n_views;
    for (int i = 0; i < n_views; ++i) g.angles[static_cast<std::size_t>(i)] = angle_start + i * dtheta;

    g.det_offsets.resize(static_cast<std::size_t>(n_det));
    if (n_det == 1) {
        g.det_offsets[0] = 0.5 * (det_lo + det_hi);
    } else {
        // closed sampling, both endpoints included
        const double step = (det_hi - det_lo) / (n_det - 1);
        for (int i = 0; i < n_det; ++i) g.det_offsets[static_cast<std::size_t>(i)] = det_lo + i * step;
    }
    return g;
}

FanGeometry make_fan_geometry(int n_views, double angle_start, double angle_span,
                              double source_to_center, double source_to_detector,
                              int n_det, double det_width) {
    if (n_views < 1) throw std::invalid_argument("make_fan_geometry: n_views must be >= 1");
    if (n_det < 1) throw std::invalid_argument("make_fan_geometry: n_det must be >= 1");
    if (!(angle_span > 0.0)) throw std::invalid_argument("make_fan_geometry: angle_span must be > 0");
    if (!(source_to_center > 0.0) || !(source_to_detector > source_to_center))
        throw std::invalid_argument("make_fan_geometry: need source_to_detector > source_to_center > 0");
    if (!(det_width > 0.0)) throw std::invalid_argument("make_fan_geometry: det_width must be > 0");

    FanGeometry g;
    g.angle_span = angle_span;
    g.source_to_center = source_to_center;
    g.source_to_detector = source_to_detector;
    g.det_count = n_det;
    g.det_width = det_width;
    g.angles.resize(static_cast<std::size_t>(n_views));
    const double dbeta = angle_span / n_views;
    for (int i = 0; i < n_views; ++i) g.angles[static_cast<std::size_t>(i)] = angle_start + i * dbeta;
    return g;
}

std::size_t n_views(const ScanGeometry& g) {
    return std::visit([](const auto& gg) { return gg.n_views(); }, g);
}

std::size_t n_det(const ScanGeometry& g) {
    return std::visit([](const auto& gg) { return gg.n_det(); }, g);
}

std::size_t ray_count(const ScanGeometry& g) { return n_views(g) * n_det(g); }

Ray ray_at(const ParallelGeometry& g, int view, int det) {
    const double theta = g.angles[static_cast<std::size_t>(view)];
    const double s = g.det_offsets[static_cast<std::size_t>(det)];
    const double c = std::cos(theta), sn = std::sin(theta);
    Ray r;
    r.origin = {-s * sn, s * c};
    r.dir = {c, sn};
    r.view = view;
    r.det = det;
    return r;
}

Ray ray_at(const FanGeometry& g, int view, int det) {
    const double beta = g.angles[static_cast<std::size_t>(view)];
    const double c = std::cos(beta), sn = std::sin(beta);
    const Vec2 source{g.source_to_center * c, g.source_to_center * sn};
    const double u = g.det_offset(det);
    // detector cell center: along the central ray by source_to_detector,
    // then laterally by u
    const Vec2 cell{source.x - g.source_to_detector * c - u * sn,
                    source.y - g.source_to_detector * sn + u * c};
    const double dx = cell.x - source.x, dy = cell.y - source.y;
    const double norm = std::sqrt(dx * dx + dy * dy);
    Ray r;
    r.origin = source;
    r.dir = {dx / norm, dy / norm};
    r.view = view;
    r.det = det;
    return r;
}

Ray ray_at(const ScanGeometry& g, int view, int det) {
    return std::visit([&](const auto& gg) { return ray_at(gg, view, det); }, g);
}

Ray ray_at(const ScanGeometry& g, std::size_t j) {
    const std::size_t nd = n_det(g);
    return ray_at(g, static_cast<int>(j / nd), static_cast<int>(j % nd));
}

std::vector<Ray> enumerate_rays(const ScanGeometry& g) {
    const std::size_t nv = n_views(g), nd = n_det(g);
    std::vector<Ray> rays;
    rays.reserve(nv * nd);
    for (std::size_t v = 0; v < nv; ++v)
        for (std::size_t d = 0; d < nd; ++d)
            rays.push_back(ray_at(g, static_cast<int>(v), static_cast<int>(d)));
    return rays;
}

} // namespace afire
