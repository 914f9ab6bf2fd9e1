#include "gap/camera.hpp"

#include "gap/errors.hpp"

#include <cmath>

namespace gap {

void Camera::validate() const {
  if (!(fov_y > 0.0) || !(fov_y < M_PI)) throw ConfigError("camera: FOV must be in (0, pi)");
  if (width < 16 || height < 16) throw ConfigError("camera: resolution must be at least 16x16");
  if (!position.allFinite()) throw ConfigError("camera: non-finite position");
}

double Camera::focal() const { return height / (2.0 * std::tan(fov_y / 2.0)); }

Vec3 Camera::ray_dir(double px, double py) const {
  const double f = focal();
  const Vec3 dir_cam((px - width / 2.0) / f, (py - height / 2.0) / f, 1.0);
  return (orientation * dir_cam).normalized();
}

Vec3 Camera::project(const Vec3& p) const {
  const Vec3 c = orientation.conjugate() * (p - position);
  const double f = focal();
  if (c.z() <= 0) return {0, 0, c.z()};
  return {c.x() / c.z() * f + width / 2.0, c.y() / c.z() * f + height / 2.0, c.z()};
}

Camera Camera::look_at(const Vec3& position, const Vec3& target, double fov_y, int width,
                       int height, const Vec3& up) {
  Vec3 fwd = target - position;
  if (fwd.squaredNorm() < 1e-24) throw ConfigError("camera: position coincides with target");
  fwd.normalize();
  Vec3 up_ref = up;
  if (std::abs(fwd.dot(up_ref.normalized())) > 0.999) up_ref = Vec3::UnitY();
  const Vec3 right = fwd.cross(up_ref).normalized();
  const Vec3 down = fwd.cross(right).normalized();

  Mat3 rot;
  rot.col(0) = right;
  rot.col(1) = down;
  rot.col(2) = fwd;

  Camera cam;
  cam.position = position;
  cam.orientation = Quat(rot).normalized();
  cam.fov_y = fov_y;
  cam.width = width;
  cam.height = height;
  cam.validate();
  return cam;
}

}  // namespace gap
