#include "stackcnn/geometry.hpp"

#include <cmath>

#include "stackcnn/errors.hpp"

namespace stackcnn {

namespace {

void validate(const GeometryParams& p) {
    if (!(p.fov_deg > 0) || !(p.fov_deg < 180))
        throw ConfigError("geometry: fov_deg must be in (0, 180)");
    if (p.matrix_size < 1) throw ConfigError("geometry: matrix_size must be >= 1");
    if (!(p.speed_mps > 0)) throw ConfigError("geometry: speed_mps must be > 0");
    if (!(p.dt_s > 0)) throw ConfigError("geometry: dt_s must be > 0");
}

double half_angle_tan(const GeometryParams& p) {
    return std::tan(p.fov_deg * 0.5 * 3.14159265358979323846 / 180.0);
}

}  // namespace

double pixel_footprint_m(const GeometryParams& params, double distance_m) {
    validate(params);
    if (!(distance_m > 0)) throw ConfigError("geometry: distance must be > 0");
    return 2.0 * distance_m * half_angle_tan(params) / params.matrix_size;
}

double displacement_px_per_frame(const GeometryParams& params, double distance_m) {
    return params.speed_mps * params.dt_s / pixel_footprint_m(params, distance_m);
}

double min_detectable_distance_m(const GeometryParams& params, double max_disp_px) {
    validate(params);
    if (!(max_disp_px > 0)) throw ConfigError("geometry: max_disp must be > 0");
    return params.speed_mps * params.dt_s * params.matrix_size /
           (2.0 * half_angle_tan(params) * max_disp_px);
}

}  // namespace stackcnn
