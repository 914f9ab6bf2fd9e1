#include "support/scenes.hpp"

#include <cmath>

namespace gap::testing {

std::vector<Vec3> fibonacci_sphere(int n, double radius, const Vec3& center) {
  std::vector<Vec3> pts;
  pts.reserve(n);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    pts.push_back(center + radius * Vec3(r * std::cos(phi), r * std::sin(phi), z));
  }
  return pts;
}

std::vector<Vec3> plane_grid(int per_side, double half, double plane_z) {
  std::vector<Vec3> pts;
  pts.reserve(static_cast<size_t>(per_side) * per_side);
  for (int i = 0; i < per_side; ++i)
    for (int j = 0; j < per_side; ++j)
      pts.emplace_back(-half + 2.0 * half * i / (per_side - 1),
                       -half + 2.0 * half * j / (per_side - 1), plane_z);
  return pts;
}

std::vector<Vec3> bored_sphere(int n_sphere, double sphere_radius, double bore_radius,
                               uint64_t seed) {
  std::vector<Vec3> pts;
  const double bore_r2 = bore_radius * bore_radius;
  for (const Vec3& p : fibonacci_sphere(n_sphere, sphere_radius)) {
    // drop the spherical cap above the bore mouth
    if (p.z() > 0 && p.x() * p.x() + p.y() * p.y() < bore_r2) continue;
    pts.push_back(p);
  }

  // sample the bore wall and bottom at matching surface density
  const double area_sphere = 4.0 * M_PI * sphere_radius * sphere_radius;
  const double per_area = n_sphere / area_sphere;
  const double mouth_z = std::sqrt(std::max(0.0, sphere_radius * sphere_radius - bore_r2));

  Rng rng(seed);
  const double wall_area = 2.0 * M_PI * bore_radius * mouth_z;
  const int n_wall = static_cast<int>(wall_area * per_area);
  for (int i = 0; i < n_wall; ++i) {
    const double a = rng.uniform(0, 2.0 * M_PI);
    const double z = rng.uniform(0.0, mouth_z);
    pts.emplace_back(bore_radius * std::cos(a), bore_radius * std::sin(a), z);
  }
  const double bottom_area = M_PI * bore_r2;
  const int n_bottom = static_cast<int>(bottom_area * per_area);
  for (int i = 0; i < n_bottom; ++i) {
    const double a = rng.uniform(0, 2.0 * M_PI);
    const double r = bore_radius * std::sqrt(rng.next_double());
    pts.emplace_back(r * std::cos(a), r * std::sin(a), 0.0);
  }
  return pts;
}

Quat random_rotation(Rng& rng) {
  // uniform quaternion via Gaussian-ish rejection-free construction
  const double u1 = rng.next_double();
  const double u2 = rng.uniform(0, 2.0 * M_PI);
  const double u3 = rng.uniform(0, 2.0 * M_PI);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  return Quat(a * std::sin(u2), a * std::cos(u2), b * std::sin(u3), b * std::cos(u3)).normalized();
}

GaussianSet random_disks(uint64_t seed, const RandomSceneParams& params) {
  Rng rng(seed);
  GaussianSet set;
  for (int i = 0; i < params.count; ++i) {
    GaussianDisk g;
    g.center = Vec3(rng.uniform(-params.extent, params.extent),
                    rng.uniform(-params.extent, params.extent),
                    rng.uniform(-params.extent, params.extent));
    g.rotation = random_rotation(rng);
    g.scale = Vec2(rng.uniform(params.scale_min, params.scale_max),
                   rng.uniform(params.scale_min, params.scale_max));
    g.opacity = rng.uniform(params.opacity_min, params.opacity_max);
    g.color = Vec3(rng.next_double(), rng.next_double(), rng.next_double());
    set.push_back(g);
  }
  return set;
}

Camera default_test_camera(int resolution, double distance) {
  return Camera::look_at(Vec3(distance, 0, 0), Vec3::Zero(), 50.0 * M_PI / 180.0, resolution,
                         resolution);
}

PointCloud cloud_from_points(std::vector<Vec3> points) {
  PointCloud cloud;
  cloud.points = std::move(points);
  return cloud;
}

}  // namespace gap::testing
