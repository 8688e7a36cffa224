#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <numbers>

namespace sceneloop::scene {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

inline double radians(double degrees) { return degrees * kPi / 180.0; }

// Euler angles in the host engine's "XYZ" mode: R = Rz * Ry * Rx.
Mat3 rotation_matrix(const Vec3& euler);

// Inverse of rotation_matrix; pitch near +-pi/2 resolves with yaw = 0.
Vec3 euler_from_matrix(const Mat3& r);

// Orientation for a camera at `eye` looking at `target` with world +Z up.
// Cameras look down their local -Z axis with local +Y up.
Vec3 look_at_euler(const Vec3& eye, const Vec3& target);

} // namespace sceneloop::scene
