#pragma once

#include <cstdint>
#include <limits>
#include <numbers>

namespace fdct {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

// Fan-beam acquisition: point source and flat detector rotating about the
// isocenter, views uniformly spaced over angular_range.
struct FanGeometry {
    double source_to_center = 40.0;
    double center_to_detector = 40.0;
    double detector_width = 41.3;
    std::int64_t n_detectors = 128;
    std::int64_t n_views = 180;
    double angular_range = 2.0 * std::numbers::pi;

    void validate() const;

    double source_to_detector() const { return source_to_center + center_to_detector; }
    double detector_cell_width() const { return detector_width / static_cast<double>(n_detectors); }
    // Half fan angle subtended by the detector edge.
    double half_fan_angle() const;
    // Radius of the circular field of view covered by every view.
    double fov_radius() const;
    // Pixel edge length so an n x n image is inscribed in the field of view.
    double pixel_size_for(std::int64_t n) const;

    double view_angle(std::int64_t view) const {
        return angular_range * static_cast<double>(view) / static_cast<double>(n_views);
    }
    // Source position at a view, physical units.
    Vec2 source_pos(std::int64_t view) const;
    // Center of a detector cell at a view, physical units.
    Vec2 detector_pos(std::int64_t view, std::int64_t det) const;
    // Signed detector-cell offset from the detector midline.
    double detector_offset(std::int64_t det) const;
};

// Photon statistics for low-dose simulation. photon_count = +inf disables
// quantum noise entirely (identity sentinel).
struct DoseModel {
    double photon_count = 1e5;
    double electronic_sigma = 0.0;
    std::uint64_t seed = 0;

    bool noiseless() const {
        return photon_count == std::numeric_limits<double>::infinity() && electronic_sigma == 0.0;
    }
    void validate() const;
};

// Desk-scale default: 64x64 image, 180 views, 128 detectors, full-scale
// distance ratios preserved.
FanGeometry desk_geometry();
// Full-scale acquisition: 720 detectors, 360 views, 40 cm distances.
FanGeometry full_scale_geometry();

}  // namespace fdct
