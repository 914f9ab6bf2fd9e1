#include "gap/view_pipeline.hpp"

#include "gap/errors.hpp"
#include "gap/kdtree.hpp"
#include "gap/parallel.hpp"

#include <cmath>

namespace gap {

TriMask::Counts TriMask::counts() const {
  Counts c;
  for (MaskLabel l : labels) {
    switch (l) {
      case MaskLabel::kOffSurface: ++c.off_surface; break;
      case MaskLabel::kKeep: ++c.keep; break;
      case MaskLabel::kUpdate: ++c.update; break;
      case MaskLabel::kGenerate: ++c.generate; break;
    }
  }
  return c;
}

ViewSchedule make_schedule(int n_azimuth, const std::vector<double>& elevations, double radius,
                           double fov_y, int width, int height) {
  if (radius <= 1.0) throw ConfigError("schedule: radius must exceed 1 (outside the unit cube)");
  if (n_azimuth < 2) throw ConfigError("schedule: need at least 2 azimuth steps");
  if (elevations.empty()) throw ConfigError("schedule: need at least one elevation");

  ViewSchedule s;
  s.radius = radius;
  for (double elevation : elevations) {
    for (int k = 0; k < n_azimuth; ++k) {
      const double azimuth = 2.0 * M_PI * k / n_azimuth;
      const Vec3 pos(radius * std::cos(elevation) * std::cos(azimuth),
                     radius * std::cos(elevation) * std::sin(azimuth),
                     radius * std::sin(elevation));
      s.cameras.push_back(Camera::look_at(pos, Vec3::Zero(), fov_y, width, height));
      s.pattern.emplace_back(azimuth, elevation);
    }
  }
  return s;
}

void add_polar_views(ViewSchedule& schedule, double fov_y, int width, int height) {
  const double r = schedule.radius;
  schedule.cameras.push_back(
      Camera::look_at(Vec3(0, 0, r), Vec3::Zero(), fov_y, width, height));
  schedule.pattern.emplace_back(0.0, M_PI / 2);
  schedule.cameras.push_back(
      Camera::look_at(Vec3(0, 0, -r), Vec3::Zero(), fov_y, width, height));
  schedule.pattern.emplace_back(0.0, -M_PI / 2);
}

TriMask classify_masks(const DepthMap& depth, const Camera& cam, const GaussianSet& set,
                       const DistanceField& field) {
  if (depth.width != cam.width || depth.height != cam.height)
    throw PipelineError("classify_masks: depth map does not match the camera");
  (void)field;  // depth was traced from it; classification reads only the map

  TriMask mask(cam.width, cam.height);
  if (set.size() == 0) {
    // no disks to attribute pixels to; everything visible is fresh
    for (size_t i = 0; i < mask.labels.size(); ++i)
      mask.labels[i] = depth.hit[i] ? MaskLabel::kGenerate : MaskLabel::kOffSurface;
    return mask;
  }

  const std::vector<int32_t> hits = first_hit_map(set, cam, depth.hit.data());
  const KdTree center_tree(set.centers);

  parallel_for(0, cam.height, [&](int py) {
    for (int px = 0; px < cam.width; ++px) {
      const size_t pix = static_cast<size_t>(py) * cam.width + px;
      if (!depth.hit[pix]) continue;  // stays OFF_SURFACE

      const Vec3 dir = cam.ray_dir(px + 0.5, py + 0.5);
      const Vec3 surface = cam.position + depth.depth[pix] * dir;

      int32_t g = hits[pix];
      if (g < 0) g = center_tree.nearest(surface);

      if (!set.seen[g]) {
        mask.labels[pix] = MaskLabel::kGenerate;
        continue;
      }
      const Vec3 to_cam = (cam.position - surface).normalized();
      Vec3 n = rotation_axes(set.rotations[g]).col(2);
      if (n.dot(to_cam) < 0) n = -n;  // orient toward the camera
      const double sim = n.dot(to_cam);
      mask.labels[pix] = sim > set.best_view_cos[g] ? MaskLabel::kUpdate : MaskLabel::kKeep;
    }
  }, 16);

  return mask;
}

void update_similarity_record(GaussianSet& set, const VisibleSet& visible) {
  for (size_t k = 0; k < visible.indices.size(); ++k) {
    const uint32_t i = visible.indices[k];
    set.seen[i] = 1;
    set.best_view_cos[i] = std::max(set.best_view_cos[i], visible.cosines[k]);
  }
}

ImageRGB composite_final(const ImageRGB& rendered, const ImageRGB& inpainted,
                         const TriMask& mask) {
  if (!rendered.same_size(inpainted) || rendered.width != mask.width ||
      rendered.height != mask.height)
    throw PipelineError("composite_final: image/mask dimensions differ");

  ImageRGB out = rendered;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const MaskLabel l = mask.at(x, y);
      if (l == MaskLabel::kGenerate || l == MaskLabel::kUpdate)
        out.set_pixel(x, y, inpainted.pixel(x, y));
    }
  }
  return out;
}

std::vector<uint8_t> generate_update_mask(const TriMask& mask) {
  std::vector<uint8_t> out(mask.labels.size(), 0);
  for (size_t i = 0; i < mask.labels.size(); ++i)
    out[i] = (mask.labels[i] == MaskLabel::kGenerate || mask.labels[i] == MaskLabel::kUpdate) ? 1 : 0;
  return out;
}

std::vector<uint8_t> mask_to_palette(const TriMask& mask) {
  std::vector<uint8_t> out(mask.labels.size(), 0);
  for (size_t i = 0; i < mask.labels.size(); ++i) {
    switch (mask.labels[i]) {
      case MaskLabel::kOffSurface: out[i] = 0; break;
      case MaskLabel::kKeep: out[i] = 85; break;
      case MaskLabel::kUpdate: out[i] = 170; break;
      case MaskLabel::kGenerate: out[i] = 255; break;
    }
  }
  return out;
}

TriMask mask_from_palette(const std::vector<uint8_t>& values, int width, int height) {
  if (values.size() != static_cast<size_t>(width) * height)
    throw PipelineError("mask_from_palette: size mismatch");
  TriMask mask(width, height);
  for (size_t i = 0; i < values.size(); ++i) {
    switch (values[i]) {
      case 0: mask.labels[i] = MaskLabel::kOffSurface; break;
      case 85: mask.labels[i] = MaskLabel::kKeep; break;
      case 170: mask.labels[i] = MaskLabel::kUpdate; break;
      case 255: mask.labels[i] = MaskLabel::kGenerate; break;
      default: throw PipelineError("mask_from_palette: unknown label value");
    }
  }
  return mask;
}

}  // namespace gap
