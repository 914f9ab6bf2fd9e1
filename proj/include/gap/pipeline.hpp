#pragma once

#include "gap/gaussian_inpaint.hpp"
#include "gap/optimizer.hpp"
#include "gap/provider.hpp"
#include "gap/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gap {

struct RunConfig {
  std::string input;
  std::string prompt = "weathered terracotta";
  std::string provider = "procedural";  // procedural | remote
  std::string remote_url;
  double remote_timeout_s = 60.0;
  std::string output = "splats.ply";
  std::string log_path;   // empty: derive "<output>.log.jsonl"; "-": disabled
  std::string debug_dir;  // per-view depth/mask PNG dumps when set

  uint64_t seed = 0;
  int resolution = 256;
  std::optional<size_t> target_count;

  // view schedule
  int n_azimuth = 8;
  std::vector<double> elevations_deg = {-20.0, 20.0};
  bool polar_views = false;
  double view_radius = 2.5;
  double fov_y_deg = 50.0;

  double strength_generate = 1.0;
  double strength_update = 0.5;
  Vec3 background = Vec3::Zero();
  int normals_k = 16;

  OptimConfig optim;
  InpaintConfig inpaint;

  int total_views() const {
    return n_azimuth * static_cast<int>(elevations_deg.size()) + (polar_views ? 2 : 0);
  }
  void validate() const;  // throws ConfigError
};

struct RunSummary {
  size_t input_points = 0;
  size_t gaussians_initial = 0;
  size_t gaussians_final = 0;
  size_t unseen_before_inpaint = 0;
  int views_processed = 0;
  int views_skipped = 0;
  double wall_seconds = 0.0;
  std::vector<ViewReport> reports;
};

// Full gaussianization run: load -> field -> init -> per-view
// {trace, render, classify, inpaint, composite, select, optimize, record,
// densify} -> 3D inpainting of unseen disks -> splat PLY export.
// `provider_override` (not owned) replaces the configured provider when given.
RunSummary run_pipeline(const RunConfig& cfg, AppearanceProvider* provider_override = nullptr);

}  // namespace gap
