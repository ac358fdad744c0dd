#pragma once

namespace stackcnn {

/// Sensor geometry for the distance / pixel-displacement trade-off, assuming
/// worst-case transverse motion (velocity perpendicular to the optical axis).
struct GeometryParams {
    double fov_deg = 40.0;    // full cone angle of the square FOV
    int matrix_size = 48;     // N pixels per side
    double speed_mps = 7500;  // transverse object speed
    double dt_s = 0.08;       // frame exposure
};

/// Ground footprint of one pixel at the given range: 2 d tan(fov/2) / N.
double pixel_footprint_m(const GeometryParams& params, double distance_m);

/// Per-frame displacement on the pixel matrix: v dt / footprint(d).
double displacement_px_per_frame(const GeometryParams& params, double distance_m);

/// Range below which the object moves faster than max_disp pixels/frame:
/// v dt N / (2 tan(fov/2) max_disp). Exact inverse of displacement_px_per_frame.
double min_detectable_distance_m(const GeometryParams& params, double max_disp_px);

}  // namespace stackcnn
