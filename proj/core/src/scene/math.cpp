#include "sceneloop/scene/math.hpp"

#include <cmath>

namespace sceneloop::scene {

Mat3 rotation_matrix(const Vec3& euler) {
    const double cx = std::cos(euler.x()), sx = std::sin(euler.x());
    const double cy = std::cos(euler.y()), sy = std::sin(euler.y());
    const double cz = std::cos(euler.z()), sz = std::sin(euler.z());
    Mat3 rx, ry, rz;
    rx << 1, 0, 0, 0, cx, -sx, 0, sx, cx;
    ry << cy, 0, sy, 0, 1, 0, -sy, 0, cy;
    rz << cz, -sz, 0, sz, cz, 0, 0, 0, 1;
    return rz * ry * rx;
}

Vec3 euler_from_matrix(const Mat3& r) {
    const double cy = std::hypot(r(0, 0), r(1, 0));
    if (cy > 1e-9) {
        return {std::atan2(r(2, 1), r(2, 2)), std::atan2(-r(2, 0), cy), std::atan2(r(1, 0), r(0, 0))};
    }
    // Gimbal lock: fold the remaining freedom into the X angle.
    return {std::atan2(-r(1, 2), r(1, 1)), std::atan2(-r(2, 0), cy), 0.0};
}

Vec3 look_at_euler(const Vec3& eye, const Vec3& target) {
    Vec3 forward = target - eye;
    if (forward.norm() < 1e-12) return Vec3::Zero();
    forward.normalize();
    Vec3 up_hint(0, 0, 1);
    if (std::abs(forward.dot(up_hint)) > 1.0 - 1e-9) up_hint = Vec3(0, 1, 0);
    Vec3 right = forward.cross(up_hint).normalized();
    Vec3 up = right.cross(forward);
    Mat3 r;
    r.col(0) = right;
    r.col(1) = up;
    r.col(2) = -forward;
    return euler_from_matrix(r);
}

} // namespace sceneloop::scene
