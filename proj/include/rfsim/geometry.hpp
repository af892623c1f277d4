#pragma once

#include <array>
#include <cmath>

namespace rfsim {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into [-pi, pi).
double wrap_angle(double rad);

// UAV attitude: roll about the longitudinal (x) axis, pitch about the
// lateral (y) axis, yaw about the vertical (z) axis. Radians.
struct AttitudeAngles {
    double roll = 0.0;
    double pitch = 0.0;
    double yaw = 0.0;

    static AttitudeAngles from_degrees(double roll_deg, double pitch_deg, double yaw_deg) {
        return {deg2rad(roll_deg), deg2rad(pitch_deg), deg2rad(yaw_deg)};
    }
    bool is_zero() const { return roll == 0.0 && pitch == 0.0 && yaw == 0.0; }
};

// Elevation above the horizontal plane (theta, [-pi/2, pi/2]) and azimuth
// (phi, [-pi, pi)).
struct SphericalDirection {
    double theta = 0.0;
    double phi = 0.0;

    static SphericalDirection from_degrees(double theta_deg, double phi_deg) {
        return {deg2rad(theta_deg), wrap_angle(deg2rad(phi_deg))};
    }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
};

// Row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> m{};

    double& operator()(int r, int c) { return m[3 * r + c]; }
    double operator()(int r, int c) const { return m[3 * r + c]; }

    static Mat3 identity();
    Mat3 operator*(const Mat3& o) const;
    Vec3 operator*(const Vec3& v) const;
    Mat3 transposed() const;
    double determinant() const;
};

// Individual axis rotations.
Mat3 roll_matrix(double roll);
Mat3 pitch_matrix(double pitch);
Mat3 yaw_matrix(double yaw);

// Combined attitude rotation R = R_roll * R_pitch * R_yaw, in exactly that
// multiplication order.
Mat3 rotation_matrix(const AttitudeAngles& att);

// Unit vector (cos t cos p, cos t sin p, sin t).
Vec3 direction_from_angles(const SphericalDirection& dir);

// Inverse of direction_from_angles. The input is normalized first; the zero
// vector is a domain error. At the poles (|theta| = 90 deg) the azimuth is
// 0 by convention.
SphericalDirection angles_from_direction(const Vec3& v);

// Applies the attitude rotation to a direction and converts back to angles.
SphericalDirection rotate_direction(const AttitudeAngles& att, const SphericalDirection& dir);

// Same direction expressed in the rotated (body) frame, i.e. the transpose
// rotation applied to a world-frame direction.
SphericalDirection direction_in_body_frame(const AttitudeAngles& att, const SphericalDirection& world_dir);

}  // namespace rfsim
