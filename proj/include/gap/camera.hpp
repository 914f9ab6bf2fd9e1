#pragma once

#include "gap/types.hpp"

namespace gap {

// Pinhole camera. Camera frame: x right, y down, z forward (into the scene);
// `orientation` rotates camera coordinates into world coordinates.
struct Camera {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  double fov_y = 0.8726646259971648;  // 50 degrees
  int width = 256;
  int height = 256;

  void validate() const;  // throws ConfigError on bad FOV / resolution

  double focal() const;  // in pixels (square pixels, fy == fx)

  Vec3 right() const { return orientation * Vec3::UnitX(); }
  Vec3 down() const { return orientation * Vec3::UnitY(); }
  Vec3 forward() const { return orientation * Vec3::UnitZ(); }

  // World-space unit ray direction through continuous pixel coordinates
  // (px, py); pixel centers are at integer + 0.5.
  Vec3 ray_dir(double px, double py) const;

  // World point -> (px, py, camera depth z). z <= 0 means behind the camera.
  Vec3 project(const Vec3& p) const;

  static Camera look_at(const Vec3& position, const Vec3& target, double fov_y, int width,
                        int height, const Vec3& up = Vec3::UnitZ());
};

}  // namespace gap
