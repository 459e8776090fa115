#include "fdct/geometry.hpp"

#include <cmath>

#include "fdct/errors.hpp"

namespace fdct {

void FanGeometry::validate() const {
    if (source_to_center <= 0.0) throw DomainError("geometry: source_to_center must be > 0");
    if (center_to_detector < 0.0) throw DomainError("geometry: center_to_detector must be >= 0");
    if (detector_width <= 0.0) throw DomainError("geometry: detector_width must be > 0");
    if (n_detectors < 1) throw DomainError("geometry: n_detectors must be >= 1");
    if (n_views < 1) throw DomainError("geometry: n_views must be >= 1");
    if (angular_range <= 0.0) throw DomainError("geometry: angular_range must be > 0");
}

double FanGeometry::half_fan_angle() const {
    return std::atan2(detector_width / 2.0, source_to_detector());
}

double FanGeometry::fov_radius() const {
    return source_to_center * std::sin(half_fan_angle());
}

double FanGeometry::pixel_size_for(std::int64_t n) const {
    // Square of side s inscribed in the FOV circle: s*sqrt(2) = 2*R.
    return fov_radius() * std::numbers::sqrt2 / static_cast<double>(n);
}

Vec2 FanGeometry::source_pos(std::int64_t view) const {
    const double beta = view_angle(view);
    return {source_to_center * std::cos(beta), source_to_center * std::sin(beta)};
}

double FanGeometry::detector_offset(std::int64_t det) const {
    return (static_cast<double>(det) + 0.5 - static_cast<double>(n_detectors) / 2.0) *
           detector_cell_width();
}

Vec2 FanGeometry::detector_pos(std::int64_t view, std::int64_t det) const {
    const double beta = view_angle(view);
    const double c = std::cos(beta), s = std::sin(beta);
    const double u = detector_offset(det);
    // Detector midline sits opposite the source; cells run along (-sin, cos).
    return {-center_to_detector * c - u * s, -center_to_detector * s + u * c};
}

void DoseModel::validate() const {
    if (!(photon_count > 0.0)) throw DomainError("dose: photon_count must be > 0");
    if (electronic_sigma < 0.0) throw DomainError("dose: electronic_sigma must be >= 0");
}

FanGeometry desk_geometry() {
    FanGeometry g;
    g.n_detectors = 128;
    g.n_views = 180;
    return g;
}

FanGeometry full_scale_geometry() {
    FanGeometry g;
    g.n_detectors = 720;
    g.n_views = 360;
    return g;
}

}  // namespace fdct
