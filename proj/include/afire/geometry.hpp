#pragma once

#include <cstddef>
#include <memory>
#include <variant>
#include <vector>

namespace afire {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// One measurement line: a point on the line plus a unit direction, tagged
/// with the (view, detector) pair it came from.
struct Ray {
    Vec2 origin;
    Vec2 dir;
    int view = 0;
    int det = 0;
};

/// Parallel-beam scan: every view is a family of parallel lines at the view
/// angle, one per detector offset. Rays are ordered view-major.
struct ParallelGeometry {
    std::vector<double> angles;       // radians
    std::vector<double> det_offsets;  // cm, strictly increasing
    double angle_span = 0.0;          // total angular coverage, radians

    std::size_t n_views() const { return angles.size(); }
    std::size_t n_det() const { return det_offsets.size(); }
};

/// Equidistant fan-beam scan with a flat detector bank. The source rotates
/// on a circle of radius source_to_center; the bank sits perpendicular to
/// the central ray at distance source_to_detector from the source.
struct FanGeometry {
    std::vector<double> angles;   // source angles, radians
    double source_to_center = 0.0;
    double source_to_detector = 0.0;
    int det_count = 0;
    double det_width = 0.0;       // cm per cell
    double angle_span = 0.0;

    std::size_t n_views() const { return angles.size(); }
    std::size_t n_det() const { return static_cast<std::size_t>(det_count); }
    /// Lateral offset of detector cell center d from the central ray, in cm.
    double det_offset(int d) const { return (d - 0.5 * (det_count - 1)) * det_width; }
};

using ScanGeometry = std::variant<ParallelGeometry, FanGeometry>;
using GeometryPtr = std::shared_ptr<const ScanGeometry>;

ParallelGeometry make_parallel_geometry(int n_views, double angle_start, double angle_span,
                                        int n_det, double det_lo, double det_hi);

FanGeometry make_fan_geometry(int n_views, double angle_start, double angle_span,
                              double source_to_center, double source_to_detector,
                              int n_det, double det_width);

std::size_t n_views(const ScanGeometry& g);
std::size_t n_det(const ScanGeometry& g);
std::size_t ray_count(const ScanGeometry& g);

/// Ray for (view, det); ray index j = view * n_det + det.
Ray ray_at(const ParallelGeometry& g, int view, int det);
Ray ray_at(const FanGeometry& g, int view, int det);
Ray ray_at(const ScanGeometry& g, int view, int det);
Ray ray_at(const ScanGeometry& g, std::size_t j);

/// All rays in view-major order. Deterministic and pure.
std::vector<Ray> enumerate_rays(const ScanGeometry& g);

inline GeometryPtr share(ParallelGeometry g) {
    return std::make_shared<const ScanGeometry>(std::move(g));
}
inline GeometryPtr share(FanGeometry g) {
    return std::make_shared<const ScanGeometry>(std::move(g));
}

} // namespace afire
