#include "gap/point_cloud.hpp"

#include "gap/errors.hpp"
#include "gap/rng.hpp"
#include "ply_reader.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace gap {

namespace {

constexpr size_t kMinPoints = 16;

PointCloud read_ply_cloud(const std::string& path) {
  const detail::PlyColumns cols = detail::read_ply_columns(path, "vertex");
  if (cols.row_count == 0) throw IoError("PLY: no vertex element in '" + path + "'");
  const auto& xs = cols.get("x");
  const auto& ys = cols.get("y");
  const auto& zs = cols.get("z");
  if (xs.size() != cols.row_count || ys.size() != cols.row_count || zs.size() != cols.row_count)
    throw IoError("PLY: vertex data truncated in '" + path + "'");

  PointCloud cloud;
  cloud.points.resize(cols.row_count);
  for (size_t i = 0; i < cols.row_count; ++i) cloud.points[i] = Vec3(xs[i], ys[i], zs[i]);

  if (cols.has("nx") && cols.has("ny") && cols.has("nz")) {
    const auto& nxs = cols.get("nx");
    const auto& nys = cols.get("ny");
    const auto& nzs = cols.get("nz");
    cloud.normals.resize(cols.row_count);
    for (size_t i = 0; i < cols.row_count; ++i) cloud.normals[i] = Vec3(nxs[i], nys[i], nzs[i]);
  }
  return cloud;
}

PointCloud read_xyz_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  PointCloud cloud;
  bool any_normals = false;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double v[6];
    int n = 0;
    while (n < 6 && (ls >> v[n])) ++n;
    if (n != 3 && n != 6)
      throw IoError("XYZ: line " + std::to_string(line_no) + " has " + std::to_string(n) +
                    " values (want 3 or 6)");
    cloud.points.emplace_back(v[0], v[1], v[2]);
    if (n == 6) {
      any_normals = true;
      cloud.normals.emplace_back(v[3], v[4], v[5]);
    } else if (any_normals) {
      throw IoError("XYZ: inconsistent normal columns at line " + std::to_string(line_no));
    }
  }
  if (!cloud.normals.empty() && cloud.normals.size() != cloud.points.size())
    throw IoError("XYZ: inconsistent normal columns");
  return cloud;
}

void subsample(PointCloud& cloud, size_t target, uint64_t seed) {
  if (cloud.size() <= target) return;
  Rng rng(seed ^ 0x5eedc0deULL);
  std::vector<size_t> order(cloud.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  // partial Fisher-Yates: the first `target` entries become the sample
  for (size_t i = 0; i < target; ++i) {
    const size_t j = i + static_cast<size_t>(rng.next_below(order.size() - i));
    std::swap(order[i], order[j]);
  }
  order.resize(target);
  std::sort(order.begin(), order.end());

  PointCloud out;
  out.points.reserve(target);
  if (cloud.has_normals()) out.normals.reserve(target);
  for (size_t i : order) {
    out.points.push_back(cloud.points[i]);
    if (cloud.has_normals()) out.normals.push_back(cloud.normals[i]);
  }
  cloud = std::move(out);
}

}  // namespace

NormalizationInfo normalize_cloud(PointCloud& cloud) {
  if (cloud.points.empty()) throw IoError("cannot normalize an empty cloud");
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : cloud.points) centroid += p;
  centroid /= static_cast<double>(cloud.size());

  Vec3 lo = cloud.points[0] - centroid, hi = lo;
  for (const Vec3& p : cloud.points) {
    const Vec3 c = p - centroid;
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  const double extent = (hi - lo).maxCoeff();
  const double scale = extent > 0 ? 1.0 / extent : 1.0;
  for (Vec3& p : cloud.points) p = (p - centroid) * scale;

  NormalizationInfo info;
  info.scale = scale;
  info.offset = centroid;
  return info;
}

PointCloud load_point_cloud(const std::string& path, std::optional<size_t> target_count,
                            uint64_t seed, NormalizationInfo* info) {
  PointCloud cloud = detail::looks_like_ply(path) ? read_ply_cloud(path) : read_xyz_cloud(path);

  for (const Vec3& p : cloud.points)
    if (!p.allFinite()) throw IoError("cloud contains non-finite coordinates");

  if (target_count) {
    if (*target_count == 0) throw IoError("target_count must be positive");
    subsample(cloud, *target_count, seed);
  }
  if (cloud.size() < kMinPoints)
    throw IoError("cloud has " + std::to_string(cloud.size()) + " points; need at least " +
                  std::to_string(kMinPoints));

  if (cloud.has_normals()) {
    for (Vec3& n : cloud.normals) {
      const double len = n.norm();
      if (!(len > 0) || !n.allFinite()) throw IoError("cloud contains invalid normals");
      n /= len;
    }
  }

  const NormalizationInfo ni = normalize_cloud(cloud);
  if (info) *info = ni;
  return cloud;
}

}  // namespace gap
