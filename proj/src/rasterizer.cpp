#include "gap/rasterizer.hpp"

#include "gap/errors.hpp"
#include "gap/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gap {

namespace {

constexpr double kDepthDenomEps = 1e-8;
constexpr double kDenomEps = 1e-12;  // ray parallel to disk plane
constexpr double kSelectMaxQ = 4.605170185988091;  // 2 ln 10, density >= 0.1

struct PreparedDisk {
  Vec3 tu, tv, n;             // world-space disk axes
  double nm, tum, tvm;        // axis . (center - camera position)
  double inv_s1, inv_s2;
  double cutoff_q;            // quadratic-form bound where alpha reaches 1/255
  double opacity;
  Vec3 color;
  Vec3 m;                     // center - camera position
  uint32_t index;             // original set index
};

struct PreparedScene {
  const Camera* cam = nullptr;
  std::vector<PreparedDisk> disks;
  int tiles_x = 0, tiles_y = 0;
  std::vector<std::vector<uint32_t>> tile_disks;  // per tile, positions into `disks`
};

PreparedScene prepare_scene(const GaussianSet& set, const Camera& cam) {
  cam.validate();
  PreparedScene scene;
  scene.cam = &cam;
  scene.tiles_x = (cam.width + kTileSize - 1) / kTileSize;
  scene.tiles_y = (cam.height + kTileSize - 1) / kTileSize;
  scene.tile_disks.resize(static_cast<size_t>(scene.tiles_x) * scene.tiles_y);

  scene.disks.reserve(set.size());
  for (size_t i = 0; i < set.size(); ++i) {
    const double o = set.opacities[i];
    if (!(o >= kAlphaCutoff)) continue;  // can never pass the contribution cutoff
    const Vec2 s = set.scales[i];
    if (!(s.x() > 0) || !(s.y() > 0)) continue;

    PreparedDisk d;
    const Mat3 axes = rotation_axes(set.rotations[i]);
    d.tu = axes.col(0);
    d.tv = axes.col(1);
    d.n = axes.col(2);
    d.m = set.centers[i] - cam.position;
    d.nm = d.n.dot(d.m);
    d.tum = d.tu.dot(d.m);
    d.tvm = d.tv.dot(d.m);
    d.inv_s1 = 1.0 / s.x();
    d.inv_s2 = 1.0 / s.y();
    d.cutoff_q = 2.0 * std::log(255.0 * o);
    if (!(d.cutoff_q > 0)) continue;
    d.opacity = o;
    d.color = set.colors[i];
    d.index = static_cast<uint32_t>(i);

    // conservative screen bound: project the corners of the in-plane
    // rectangle that contains the cutoff ellipse
    const double r = std::sqrt(d.cutoff_q);
    const Vec3 e1 = r * s.x() * d.tu;
    const Vec3 e2 = r * s.y() * d.tv;
    const Vec3 center = set.centers[i];
    const Vec3 corners[4] = {center + e1 + e2, center + e1 - e2, center - e1 + e2,
                             center - e1 - e2};

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
    double y0 = x0, y1 = -x0;
    bool behind = false;
    for (const Vec3& c : corners) {
      const Vec3 p = cam.project(c);
      if (p.z() <= 1e-9) {
        behind = true;
        break;
      }
      x0 = std::min(x0, p.x());
      x1 = std::max(x1, p.x());
      y0 = std::min(y0, p.y());
      y1 = std::max(y1, p.y());
    }
    int tx0, tx1, ty0, ty1;
    if (behind) {
      // disk crosses the camera plane: no cheap bound, bin everywhere
      tx0 = 0;
      tx1 = scene.tiles_x - 1;
      ty0 = 0;
      ty1 = scene.tiles_y - 1;
    } else {
      const double pad = 1e-3;
      if (x1 + pad < 0.0 || y1 + pad < 0.0 || x0 - pad > cam.width || y0 - pad > cam.height)
        continue;  // fully off screen
      tx0 = std::clamp(static_cast<int>(std::floor((x0 - pad) / kTileSize)), 0, scene.tiles_x - 1);
      tx1 = std::clamp(static_cast<int>(std::floor((x1 + pad) / kTileSize)), 0, scene.tiles_x - 1);
      ty0 = std::clamp(static_cast<int>(std::floor((y0 - pad) / kTileSize)), 0, scene.tiles_y - 1);
      ty1 = std::clamp(static_cast<int>(std::floor((y1 + pad) / kTileSize)), 0, scene.tiles_y - 1);
    }

    const uint32_t pos = static_cast<uint32_t>(scene.disks.size());
    scene.disks.push_back(d);
    for (int ty = ty0; ty <= ty1; ++ty)
      for (int tx = tx0; tx <= tx1; ++tx)
        scene.tile_disks[static_cast<size_t>(ty) * scene.tiles_x + tx].push_back(pos);
  }
  return scene;
}

struct Candidate {
  double t;
  uint32_t disk;  // position into scene.disks (monotone in original index)
};

// Entry for one composited contribution, recorded for the backward pass.
struct Contribution {
  uint32_t disk;
  double t, g, alpha, transmittance;  // transmittance *before* this entry
  double u1, u2, tud, tvd, denom;
};

constexpr uint64_t kHashPrime = 1099511628211ULL;
constexpr uint64_t kHashSeed = 1469598103934665603ULL;

}  // namespace

RenderBuffers render(const GaussianSet& set, const Camera& cam, const Vec3& background,
                     uint64_t* composition_hash) {
  if (!set.consistent()) throw PipelineError("render: inconsistent attribute arrays");
  const PreparedScene scene = prepare_scene(set, cam);

  RenderBuffers rb;
  rb.color = ImageRGB(cam.width, cam.height);
  rb.depth.assign(static_cast<size_t>(cam.width) * cam.height, 0.0);
  rb.alpha.assign(static_cast<size_t>(cam.width) * cam.height, 0.0);
  rb.background = background;

  const int n_tiles = scene.tiles_x * scene.tiles_y;
  std::vector<uint64_t> tile_hashes;
  if (composition_hash) tile_hashes.assign(n_tiles, kHashSeed);

  parallel_chunks(n_tiles, [&](int tile) {
    const auto& list = scene.tile_disks[tile];
    const int tx = tile % scene.tiles_x;
    const int ty = tile / scene.tiles_x;
    const int px0 = tx * kTileSize, px1 = std::min(cam.width, px0 + kTileSize);
    const int py0 = ty * kTileSize, py1 = std::min(cam.height, py0 + kTileSize);

    std::vector<Candidate> cands;
    cands.reserve(list.size());
    uint64_t h = kHashSeed;

    for (int py = py0; py < py1; ++py) {
      for (int px = px0; px < px1; ++px) {
        const size_t pix = static_cast<size_t>(py) * cam.width + px;
        const Vec3 dir = cam.ray_dir(px + 0.5, py + 0.5);

        cands.clear();
        for (uint32_t pos : list) {
          const PreparedDisk& d = scene.disks[pos];
          const double denom = d.n.dot(dir);
          if (std::abs(denom) < kDenomEps) continue;
          const double t = d.nm / denom;
          if (t <= 0) continue;
          cands.push_back({t, pos});
        }
        std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
          if (a.t != b.t) return a.t < b.t;
          return a.disk < b.disk;
        });

        double transmittance = 1.0;
        Vec3 color_acc = Vec3::Zero();
        double depth_acc = 0.0, weight_acc = 0.0;
        if (composition_hash) h = (h ^ (pix + 1)) * kHashPrime;
        for (const Candidate& c : cands) {
          const PreparedDisk& d = scene.disks[c.disk];
          const double tud = d.tu.dot(dir), tvd = d.tv.dot(dir);
          const double u1 = c.t * tud - d.tum;
          const double u2 = c.t * tvd - d.tvm;
          const double a1 = u1 * d.inv_s1, a2 = u2 * d.inv_s2;
          const double q = a1 * a1 + a2 * a2;
          if (q >= d.cutoff_q) continue;
          const double g = std::exp(-0.5 * q);
          const double alpha = d.opacity * g;
          if (alpha < kAlphaCutoff) continue;
          const double w = transmittance * alpha;
          color_acc += w * d.color;
          depth_acc += w * c.t;
          weight_acc += w;
          transmittance *= 1.0 - alpha;
          if (composition_hash) h = (h ^ (d.index + 1)) * kHashPrime;
          if (transmittance < kMinTransmittance) break;
        }

        const Vec3 out = color_acc + transmittance * background;
        rb.color.set_pixel(px, py, out);
        rb.depth[pix] = depth_acc / std::max(weight_acc, kDepthDenomEps);
        rb.alpha[pix] = weight_acc;
      }
    }
    if (composition_hash) tile_hashes[tile] = h;
  });

  if (composition_hash) {
    uint64_t h = kHashSeed;
    for (uint64_t th : tile_hashes) h = (h ^ th) * kHashPrime;
    *composition_hash = h;
  }
  return rb;
}

namespace {

struct Grad13 {
  Vec3 center = Vec3::Zero();
  Vec4 rot = Vec4::Zero();
  Vec2 scale = Vec2::Zero();
  double opacity = 0.0;
  Vec3 color = Vec3::Zero();
};

// d(rotation columns)/d(unit quaternion component), columns = (tu, tv, n)
void rotation_column_derivs(const Quat& qn, Vec3 dcols[4][3]) {
  const double w = qn.w(), x = qn.x(), y = qn.y(), z = qn.z();
  dcols[0][0] = 2 * Vec3(0, z, -y);
  dcols[0][1] = 2 * Vec3(-z, 0, x);
  dcols[0][2] = 2 * Vec3(y, -x, 0);

  dcols[1][0] = 2 * Vec3(0, y, z);
  dcols[1][1] = 2 * Vec3(y, -2 * x, w);
  dcols[1][2] = 2 * Vec3(z, -w, -2 * x);

  dcols[2][0] = 2 * Vec3(-2 * y, x, -w);
  dcols[2][1] = 2 * Vec3(x, 0, z);
  dcols[2][2] = 2 * Vec3(w, z, -2 * y);

  dcols[3][0] = 2 * Vec3(-2 * z, w, x);
  dcols[3][1] = 2 * Vec3(-w, -2 * z, y);
  dcols[3][2] = 2 * Vec3(x, y, 0);
}

}  // namespace

GaussianGradients render_backward(const GaussianSet& set, const Camera& cam,
                                  const ImageRGB& dL_dcolor, const Vec3& background) {
  if (!set.consistent()) throw PipelineError("render_backward: inconsistent attribute arrays");
  if (dL_dcolor.width != cam.width || dL_dcolor.height != cam.height)
    throw PipelineError("render_backward: dL_dcolor dimensions do not match the camera");
  const PreparedScene scene = prepare_scene(set, cam);

  const int n_tiles = scene.tiles_x * scene.tiles_y;
  std::vector<std::vector<Grad13>> tile_grads(n_tiles);

  parallel_chunks(n_tiles, [&](int tile) {
    const auto& list = scene.tile_disks[tile];
    if (list.empty()) return;
    const int tx = tile % scene.tiles_x;
    const int ty = tile / scene.tiles_x;
    const int px0 = tx * kTileSize, px1 = std::min(cam.width, px0 + kTileSize);
    const int py0 = ty * kTileSize, py1 = std::min(cam.height, py0 + kTileSize);

    // position of a scene disk inside this tile's gradient slab
    std::vector<Grad13>& grads = tile_grads[tile];
    grads.assign(list.size(), Grad13{});
    // map scene position -> slab slot; tiles hold few disks, linear probe via
    // sorted lookup (list entries are ascending by construction)
    auto slot_of = [&](uint32_t pos) {
      return static_cast<size_t>(
          std::lower_bound(list.begin(), list.end(), pos) - list.begin());
    };

    std::vector<Candidate> cands;
    cands.reserve(list.size());
    std::vector<Contribution> entries;
    entries.reserve(64);

    for (int py = py0; py < py1; ++py) {
      for (int px = px0; px < px1; ++px) {
        const Vec3 dir = cam.ray_dir(px + 0.5, py + 0.5);
        const Vec3 pl = dL_dcolor.pixel(px, py);

        cands.clear();
        for (uint32_t pos : list) {
          const PreparedDisk& d = scene.disks[pos];
          const double denom = d.n.dot(dir);
          if (std::abs(denom) < kDenomEps) continue;
          const double t = d.nm / denom;
          if (t <= 0) continue;
          cands.push_back({t, pos});
        }
        std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
          if (a.t != b.t) return a.t < b.t;
          return a.disk < b.disk;
        });

        entries.clear();
        double transmittance = 1.0;
        for (const Candidate& c : cands) {
          const PreparedDisk& d = scene.disks[c.disk];
          const double tud = d.tu.dot(dir), tvd = d.tv.dot(dir);
          const double denom = d.n.dot(dir);
          const double u1 = c.t * tud - d.tum;
          const double u2 = c.t * tvd - d.tvm;
          const double a1 = u1 * d.inv_s1, a2 = u2 * d.inv_s2;
          const double q = a1 * a1 + a2 * a2;
          if (q >= d.cutoff_q) continue;
          const double g = std::exp(-0.5 * q);
          const double alpha = d.opacity * g;
          if (alpha < kAlphaCutoff) continue;
          entries.push_back({c.disk, c.t, g, alpha, transmittance, u1, u2, tud, tvd, denom});
          transmittance *= 1.0 - alpha;
          if (transmittance < kMinTransmittance) break;
        }
        if (entries.empty()) continue;

        // back-to-front suffix accumulation
        Vec3 color_behind = background;
        for (size_t k = entries.size(); k-- > 0;) {
          const Contribution& e = entries[k];
          const PreparedDisk& d = scene.disks[e.disk];
          Grad13& gr = grads[slot_of(e.disk)];

          const double w = e.transmittance * e.alpha;
          gr.color += pl * w;

          const double d_alpha = pl.dot(e.transmittance * (d.color - color_behind));
          gr.opacity += d_alpha * e.g;
          const double d_g = d_alpha * d.opacity;
          const double d_q = d_g * (-0.5 * e.g);

          const double du1 = d_q * 2.0 * e.u1 * d.inv_s1 * d.inv_s1;
          const double du2 = d_q * 2.0 * e.u2 * d.inv_s2 * d.inv_s2;
          gr.scale.x() += d_q * (-2.0 * e.u1 * e.u1 * d.inv_s1 * d.inv_s1 * d.inv_s1);
          gr.scale.y() += d_q * (-2.0 * e.u2 * e.u2 * d.inv_s2 * d.inv_s2 * d.inv_s2);

          gr.center += du1 * ((e.tud / e.denom) * d.n - d.tu) +
                       du2 * ((e.tvd / e.denom) * d.n - d.tv);

          const Vec3 x_minus_p = e.t * dir - d.m;  // o + t d - center
          const Vec3 d_tu = du1 * x_minus_p;
          const Vec3 d_tv = du2 * x_minus_p;
          const Vec3 d_n = -((du1 * e.tud + du2 * e.tvd) / e.denom) * x_minus_p;

          const Quat qn = set.rotations[d.index].normalized();
          Vec3 dcols[4][3];
          rotation_column_derivs(qn, dcols);
          Vec4 g_hat;
          for (int k4 = 0; k4 < 4; ++k4)
            g_hat[k4] = d_tu.dot(dcols[k4][0]) + d_tv.dot(dcols[k4][1]) + d_n.dot(dcols[k4][2]);
          // through the normalization q_hat = q / |q|
          const Vec4 q_raw(set.rotations[d.index].w(), set.rotations[d.index].x(),
                           set.rotations[d.index].y(), set.rotations[d.index].z());
          const double norm = q_raw.norm();
          const Vec4 q_unit = q_raw / norm;
          gr.rot += (g_hat - q_unit * q_unit.dot(g_hat)) / norm;

          color_behind = e.alpha * d.color + (1.0 - e.alpha) * color_behind;
        }
      }
    }
  });

  GaussianGradients out;
  out.resize_zero(set.size());
  for (int tile = 0; tile < n_tiles; ++tile) {
    const auto& list = scene.tile_disks[tile];
    const auto& grads = tile_grads[tile];
    for (size_t j = 0; j < grads.size(); ++j) {
      const uint32_t orig = scene.disks[list[j]].index;
      out.center[orig] += grads[j].center;
      out.rotation_wxyz[orig] += grads[j].rot;
      out.scale[orig] += grads[j].scale;
      out.opacity[orig] += grads[j].opacity;
      out.color[orig] += grads[j].color;
    }
  }
  return out;
}

std::vector<int32_t> first_hit_map(const GaussianSet& set, const Camera& cam,
                                   const uint8_t* mask) {
  if (!set.consistent()) throw PipelineError("first_hit_map: inconsistent attribute arrays");
  const PreparedScene scene = prepare_scene(set, cam);
  std::vector<int32_t> hits(static_cast<size_t>(cam.width) * cam.height, -1);

  const int n_tiles = scene.tiles_x * scene.tiles_y;
  parallel_chunks(n_tiles, [&](int tile) {
    const auto& list = scene.tile_disks[tile];
    if (list.empty()) return;
    const int tx = tile % scene.tiles_x;
    const int ty = tile / scene.tiles_x;
    const int px0 = tx * kTileSize, px1 = std::min(cam.width, px0 + kTileSize);
    const int py0 = ty * kTileSize, py1 = std::min(cam.height, py0 + kTileSize);

    for (int py = py0; py < py1; ++py) {
      for (int px = px0; px < px1; ++px) {
        const size_t pix = static_cast<size_t>(py) * cam.width + px;
        if (mask && !mask[pix]) continue;
        const Vec3 dir = cam.ray_dir(px + 0.5, py + 0.5);

        double best_t = std::numeric_limits<double>::infinity();
        int32_t best = -1;
        for (uint32_t pos : list) {
          const PreparedDisk& d = scene.disks[pos];
          if (d.opacity < kSelectMinOpacity) continue;
          const double denom = d.n.dot(dir);
          if (std::abs(denom) < kDenomEps) continue;
          const double t = d.nm / denom;
          if (t <= 0) continue;
          if (t > best_t || (t == best_t && static_cast<int32_t>(d.index) >= best && best >= 0))
            continue;
          const double u1 = t * d.tu.dot(dir) - d.tum;
          const double u2 = t * d.tv.dot(dir) - d.tvm;
          const double a1 = u1 * d.inv_s1, a2 = u2 * d.inv_s2;
          const double q = a1 * a1 + a2 * a2;
          if (q > kSelectMaxQ) continue;
          best_t = t;
          best = static_cast<int32_t>(d.index);
        }
        hits[pix] = best;
      }
    }
  });
  return hits;
}

VisibleSet select_first_hit(const GaussianSet& set, const Camera& cam,
                            const std::vector<uint8_t>& pixel_mask) {
  if (pixel_mask.size() != static_cast<size_t>(cam.width) * cam.height)
    throw PipelineError("select_first_hit: mask dimensions do not match the camera");
  const std::vector<int32_t> hits = first_hit_map(set, cam, pixel_mask.data());

  std::vector<uint8_t> chosen(set.size(), 0);
  for (int32_t h : hits)
    if (h >= 0) chosen[h] = 1;

  VisibleSet vs;
  for (size_t i = 0; i < chosen.size(); ++i) {
    if (!chosen[i]) continue;
    const Vec3 to_cam = (cam.position - set.centers[i]).normalized();
    const Vec3 n = rotation_axes(set.rotations[i]).col(2);
    // normal oriented toward the camera before the dot product
    vs.indices.push_back(static_cast<uint32_t>(i));
    vs.cosines.push_back(std::abs(n.dot(to_cam)));
  }
  return vs;
}

}  // namespace gap
