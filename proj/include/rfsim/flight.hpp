#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfsim/geometry.hpp"

namespace rfsim {

struct Rect {
    double x0 = 0.0, x1 = 0.0;
    double y0 = 0.0, y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double cx() const { return 0.5 * (x0 + x1); }
    double cy() const { return 0.5 * (y0 + y1); }
    bool contains(double x, double y) const {
        return x >= x0 && x <= x1 && y >= y0 && y <= y1;
    }
};

struct Waypoint {
    double x = 0.0;
    double y = 0.0;
};

// Constant-altitude polyline flight path.
struct Trajectory {
    std::vector<Waypoint> waypoints;
    double altitude = 30.0;
    bool closed = false;

    double path_length() const;
};

struct FlightSample {
    double t = 0.0;
    double x = 0.0, y = 0.0, z = 0.0;
    AttitudeAngles att;
};

struct FlightLog {
    std::vector<FlightSample> samples;
};

// Inward rectangular spiral sweeping `region`: a perimeter loop followed by
// loops inset by `spacing` until the remaining core is narrower than the
// spacing. The loop transitions stop one spacing short of each loop's start
// edge so the path never crosses itself.
Trajectory spiral_trajectory(const Rect& region, double spacing, double altitude);

// Additional coverage paths used for trajectory-generalization studies.
Trajectory lawnmower_trajectory(const Rect& region, double spacing, double altitude);
Trajectory perimeter_trajectory(const Rect& region, double altitude);
Trajectory random_waypoint_trajectory(const Rect& region, std::size_t count, double altitude,
                                      std::uint64_t seed);

// Constant-speed traversal of the trajectory polyline sampled every dt; one
// attitude draw per sample, each axis uniform in [-jitter, +jitter] degrees.
FlightLog sample_flight(const Trajectory& traj, double duration_s, double dt_s,
                        double jitter_deg, std::uint64_t seed);

// CSV persistence: waypoint list `x_m,y_m`, flight log
// `t_s,x_m,y_m,z_m,roll_deg,pitch_deg,yaw_deg`.
void save_trajectory_csv(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory_csv(const std::string& path, double altitude);
void save_flight_csv(const FlightLog& log, const std::string& path);

}  // namespace rfsim
