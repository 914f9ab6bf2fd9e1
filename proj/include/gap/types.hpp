#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace gap {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Row-major H x W x 3 image, values nominally in [0,1].
struct ImageRGB {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  ImageRGB() = default;
  ImageRGB(int w, int h, const Vec3& fill = Vec3::Zero()) : width(w), height(h) {
    data.resize(static_cast<size_t>(w) * h * 3);
    for (int i = 0; i < w * h; ++i) {
      data[3 * i + 0] = fill.x();
      data[3 * i + 1] = fill.y();
      data[3 * i + 2] = fill.z();
    }
  }

  size_t pixel_count() const { return static_cast<size_t>(width) * height; }

  double& at(int x, int y, int c) { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
  double at(int x, int y, int c) const { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }

  Vec3 pixel(int x, int y) const {
    const size_t i = (static_cast<size_t>(y) * width + x) * 3;
    return {data[i], data[i + 1], data[i + 2]};
  }
  void set_pixel(int x, int y, const Vec3& v) {
    const size_t i = (static_cast<size_t>(y) * width + x) * 3;
    data[i] = v.x();
    data[i + 1] = v.y();
    data[i + 2] = v.z();
  }

  bool same_size(const ImageRGB& o) const { return width == o.width && height == o.height; }
};

}  // namespace gap
