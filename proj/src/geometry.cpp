#include "rfsim/geometry.hpp"

#include <algorithm>

#include "rfsim/errors.hpp"

namespace rfsim {

double wrap_angle(double rad) {
    double a = std::fmod(rad + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
}

Mat3 Mat3::identity() {
    Mat3 r;
    r(0, 0) = r(1, 1) = r(2, 2) = 1.0;
    return r;
}

Mat3 Mat3::operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
            r(i, j) = s;
        }
    return r;
}

Vec3 Mat3::operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

Mat3 Mat3::transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
}

double Mat3::determinant() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 roll_matrix(double roll) {
    const double c = std::cos(roll), s = std::sin(roll);
    Mat3 r;
    r.m = {1, 0, 0,
           0, c, -s,
           0, s, c};
    return r;
}

Mat3 pitch_matrix(double pitch) {
    const double c = std::cos(pitch), s = std::sin(pitch);
    Mat3 r;
    r.m = {c, 0, s,
           0, 1, 0,
           -s, 0, c};
    return r;
}

Mat3 yaw_matrix(double yaw) {
    const double c = std::cos(yaw), s = std::sin(yaw);
    Mat3 r;
    r.m = {c, -s, 0,
           s, c, 0,
           0, 0, 1};
    return r;
}

Mat3 rotation_matrix(const AttitudeAngles& att) {
    if (!std::isfinite(att.roll) || !std::isfinite(att.pitch) || !std::isfinite(att.yaw))
        throw NumericError("rotation_matrix: attitude angles must be finite");
    return roll_matrix(att.roll) * pitch_matrix(att.pitch) * yaw_matrix(att.yaw);
}

Vec3 direction_from_angles(const SphericalDirection& dir) {
    const double ct = std::cos(dir.theta);
    return {ct * std::cos(dir.phi), ct * std::sin(dir.phi), std::sin(dir.theta)};
}

SphericalDirection angles_from_direction(const Vec3& v) {
    const double n = v.norm();
    if (n == 0.0 || !std::isfinite(n))
        throw NumericError("angles_from_direction: zero or non-finite vector");
    const double x = v.x / n, y = v.y / n, z = v.z / n;
    SphericalDirection out;
    out.theta = std::asin(std::clamp(z, -1.0, 1.0));
    out.phi = (x == 0.0 && y == 0.0) ? 0.0 : wrap_angle(std::atan2(y, x));
    return out;
}

SphericalDirection rotate_direction(const AttitudeAngles& att, const SphericalDirection& dir) {
    return angles_from_direction(rotation_matrix(att) * direction_from_angles(dir));
}

SphericalDirection direction_in_body_frame(const AttitudeAngles& att,
                                           const SphericalDirection& world_dir) {
    return angles_from_direction(rotation_matrix(att).transposed() *
                                 direction_from_angles(world_dir));
}

}  // namespace rfsim
