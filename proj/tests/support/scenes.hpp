#pragma once

#include "gap/camera.hpp"
#include "gap/gaussian_set.hpp"
#include "gap/point_cloud.hpp"
#include "gap/rng.hpp"
#include "gap/types.hpp"

#include <vector>

namespace gap::testing {

// Deterministic, roughly uniform sphere sampling (Fibonacci spiral).
std::vector<Vec3> fibonacci_sphere(int n, double radius, const Vec3& center = Vec3::Zero());

// Regular grid on the plane z = plane_z, spanning [-half, half]^2.
std::vector<Vec3> plane_grid(int per_side, double half, double plane_z = 0.0);

// Sphere with a cylindrical bore along +z (radius bore_radius, from the top
// down to the equator plane), wall and bottom sampled like the sphere.
std::vector<Vec3> bored_sphere(int n_sphere, double sphere_radius, double bore_radius,
                               uint64_t seed);

// Random disk scene inside the unit cube, facing every which way.
struct RandomSceneParams {
  int count = 20;
  double scale_min = 0.03;
  double scale_max = 0.09;
  double opacity_min = 0.25;
  double opacity_max = 0.95;
  double extent = 0.4;  // centers in [-extent, extent]^3
};
GaussianSet random_disks(uint64_t seed, const RandomSceneParams& params = {});

Quat random_rotation(Rng& rng);

Camera default_test_camera(int resolution, double distance = 2.5);

PointCloud cloud_from_points(std::vector<Vec3> points);

}  // namespace gap::testing
