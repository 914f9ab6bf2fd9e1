#pragma once

#include "gap/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gap {

// Maps raw input coordinates to the working frame: p_norm = (p - offset) * scale.
struct NormalizationInfo {
  double scale = 1.0;
  Vec3 offset = Vec3::Zero();

  Vec3 to_world(const Vec3& p_norm) const { return p_norm / scale + offset; }
};

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // empty, or one unit normal per point

  size_t size() const { return points.size(); }
  bool has_normals() const { return !normals.empty(); }
};

// Centers the cloud at its centroid and scales so the bounding box's largest
// extent is exactly 1. Returns the applied mapping.
NormalizationInfo normalize_cloud(PointCloud& cloud);

// Reads PLY (ascii or binary-little-endian; properties x,y,z and optional
// nx,ny,nz) or whitespace-separated XYZ text, normalizes to the centered unit
// cube, and optionally subsamples to target_count with the seeded RNG.
// Throws IoError for unreadable/malformed files and clouds with < 16 points.
PointCloud load_point_cloud(const std::string& path,
                            std::optional<size_t> target_count = std::nullopt,
                            uint64_t seed = 0, NormalizationInfo* info = nullptr);

}  // namespace gap
