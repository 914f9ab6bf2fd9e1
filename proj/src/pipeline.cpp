#include "gap/pipeline.hpp"

#include "gap/distance_field.hpp"
#include "gap/errors.hpp"
#include "gap/normals.hpp"
#include "gap/png_io.hpp"
#include "gap/splat_io.hpp"
#include "gap/view_pipeline.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

namespace gap {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

std::string view_png_path(const std::string& dir, int view, const char* kind) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "/view_%03d_%s.png", view, kind);
  return dir + buf;
}

}  // namespace

void RunConfig::validate() const {
  if (input.empty()) throw ConfigError("no input point cloud given");
  if (output.empty()) throw ConfigError("no output path given");
  if (total_views() < 2) throw ConfigError("schedule requires >= 2 cameras");
  if (n_azimuth < 2) throw ConfigError("schedule requires >= 2 azimuth steps");
  if (resolution < 16) throw ConfigError("resolution must be at least 16");
  if (!(view_radius > 1.0)) throw ConfigError("view radius must exceed 1");
  if (!(fov_y_deg > 0) || fov_y_deg >= 180) throw ConfigError("fov must be in (0, 180)");
  if (!(strength_generate > 0) || strength_generate > 1 || !(strength_update > 0) ||
      strength_update > 1 || strength_update > strength_generate)
    throw ConfigError("strengths must satisfy 0 < update <= generate <= 1");
  if (normals_k < 4) throw ConfigError("normal estimation needs k >= 4");
  optim.validate();
  inpaint.validate();
}

RunSummary run_pipeline(const RunConfig& cfg, AppearanceProvider* provider_override) {
  const auto t_start = std::chrono::steady_clock::now();
  cfg.validate();

  std::unique_ptr<AppearanceProvider> owned;
  AppearanceProvider* provider = provider_override;
  if (!provider) {
    owned = make_provider(cfg.provider, {cfg.remote_url, cfg.remote_timeout_s});
    provider = owned.get();
  }

  std::ofstream log;
  if (cfg.log_path != "-") {
    const std::string path = cfg.log_path.empty() ? cfg.output + ".log.jsonl" : cfg.log_path;
    log.open(path, std::ios::trunc);
    if (!log) throw IoError("cannot write run log '" + path + "'");
  }
  auto log_line = [&](const nlohmann::json& j) {
    if (log.is_open()) log << j.dump() << "\n";
  };

  // ---- geometry setup
  NormalizationInfo norm_info;
  PointCloud cloud = load_point_cloud(cfg.input, cfg.target_count, cfg.seed, &norm_info);

  std::vector<Vec3> normals;
  if (cloud.has_normals()) {
    normals = cloud.normals;
  } else {
    normals = estimate_normals(cloud, cfg.normals_k).normals;
  }

  const double spacing = mean_knn_spacing(cloud.points);
  OptimConfig optim = cfg.optim;
  if (!(optim.tau > 0)) optim.tau = 2.0 * spacing;
  InpaintConfig inpaint = cfg.inpaint;
  if (!(inpaint.rho > 0)) inpaint.rho = 2.0 * spacing;
  if (!(inpaint.tau > 0)) inpaint.tau = optim.tau;

  const DistanceField field(cloud.points, 1, normals);
  GaussianSet set = init_gaussians(cloud, normals);

  RunSummary summary;
  summary.input_points = cloud.size();
  summary.gaussians_initial = set.size();

  ViewSchedule schedule =
      make_schedule(cfg.n_azimuth, [&] {
        std::vector<double> rad;
        for (double d : cfg.elevations_deg) rad.push_back(d * kDegToRad);
        return rad;
      }(), cfg.view_radius, cfg.fov_y_deg * kDegToRad, cfg.resolution, cfg.resolution);
  if (cfg.polar_views)
    add_polar_views(schedule, cfg.fov_y_deg * kDegToRad, cfg.resolution, cfg.resolution);

  log_line({{"event", "start"},
            {"input", cfg.input},
            {"points", cloud.size()},
            {"gaussians", set.size()},
            {"views", schedule.cameras.size()},
            {"provider", provider->name()},
            {"tau", optim.tau},
            {"rho", inpaint.rho},
            {"seed", cfg.seed}});

  // ---- per-view loop
  for (size_t view = 0; view < schedule.cameras.size(); ++view) {
    const Camera& cam = schedule.cameras[view];
    const DepthMap depth = sphere_trace_depth(field, cam);
    const RenderBuffers rb = render(set, cam, cfg.background);
    const TriMask mask = classify_masks(depth, cam, set, field);

    if (!cfg.debug_dir.empty()) {
      write_file(view_png_path(cfg.debug_dir, static_cast<int>(view), "depth"),
                 encode_png_gray16(quantize_depth(depth), depth.width, depth.height));
      write_file(view_png_path(cfg.debug_dir, static_cast<int>(view), "mask"),
                 encode_png_indexed8(mask_to_palette(mask), mask.width, mask.height));
    }

    InpaintRequest req;
    req.image = rb.color;
    req.depth = depth;
    req.trimask = mask;
    req.prompt = cfg.prompt;
    req.strength_generate = cfg.strength_generate;
    req.strength_update = cfg.strength_update;
    req.seed = cfg.seed + view;
    req.camera = cam;

    InpaintResponse response;
    try {
      response = provider->inpaint(req);
    } catch (const ProviderError& e) {
      std::cerr << "[view " << view << "] provider failed, skipping: " << e.what() << "\n";
      ++summary.views_skipped;
      ViewReport report;
      report.view_index = static_cast<int>(view);
      report.skipped = true;
      summary.reports.push_back(report);
      log_line({{"view", view}, {"skipped", true}, {"reason", e.what()}});
      continue;
    }

    const ImageRGB target = composite_final(rb.color, response.image, mask);
    const VisibleSet visible = select_first_hit(set, cam, generate_update_mask(mask));

    std::vector<double> densify_grads(optim.densify ? set.size() : 0, 0.0);
    ViewReport report = optimize_view(set, visible, target, cam, field, optim, cfg.background,
                                      optim.densify ? &densify_grads : nullptr);
    report.view_index = static_cast<int>(view);
    update_similarity_record(set, visible);

    size_t densified = 0;
    if (optim.densify) {
      const size_t before = set.size();
      set = densify(set, densify_grads, optim);
      densified = set.size() - before;
    }

    const TriMask::Counts counts = mask.counts();
    log_line({{"view", view},
              {"azimuth", schedule.pattern[view].first},
              {"elevation", schedule.pattern[view].second},
              {"generate_px", counts.generate},
              {"keep_px", counts.keep},
              {"update_px", counts.update},
              {"off_px", counts.off_surface},
              {"visible", report.visible_count},
              {"loss_initial", report.loss_initial},
              {"loss_final", report.loss_final},
              {"non_decreasing", report.non_decreasing},
              {"densified", densified},
              {"gaussians", set.size()}});
    summary.reports.push_back(report);
    ++summary.views_processed;
  }

  // ---- 3D inpainting of the disks no view optimized
  const std::vector<uint32_t> unseen = find_unseen(set);
  summary.unseen_before_inpaint = unseen.size();
  if (!unseen.empty()) {
    color_diffuse(set, unseen, inpaint);
    size_scale(set, unseen, inpaint);
    opacity_control(set, unseen, inpaint);
  }

  export_splat_ply(set, cfg.output, norm_info);
  summary.gaussians_final = set.size();
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  log_line({{"event", "done"},
            {"gaussians", set.size()},
            {"unseen_before_inpaint", unseen.size()},
            {"skipped_views", summary.views_skipped},
            {"wall_seconds", summary.wall_seconds},
            {"output", cfg.output}});
  return summary;
}

}  // namespace gap
