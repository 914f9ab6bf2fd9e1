#include "gap/camera.hpp"
#include "gap/errors.hpp"
#include "gap/pipeline.hpp"
#include "gap/png_io.hpp"
#include "gap/rasterizer.hpp"
#include "gap/splat_io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>

namespace {

constexpr double kDegToRad = M_PI / 180.0;

int run_command(const gap::RunConfig& cfg) {
  const gap::RunSummary s = gap::run_pipeline(cfg);
  std::printf("points:               %zu\n", s.input_points);
  std::printf("gaussians:            %zu -> %zu\n", s.gaussians_initial, s.gaussians_final);
  std::printf("views processed:      %d (%d skipped)\n", s.views_processed, s.views_skipped);
  std::printf("unseen before inpaint: %zu\n", s.unseen_before_inpaint);
  std::printf("wall time:            %.1fs\n", s.wall_seconds);
  std::printf("wrote %s\n", cfg.output.c_str());
  return 0;
}

int render_command(const std::string& input, const std::string& output, double azimuth_deg,
                   double elevation_deg, double radius_scale, double fov_deg, int resolution,
                   const std::vector<double>& bg) {
  const gap::GaussianSet set = gap::import_splat_ply(input);
  if (set.size() == 0) throw gap::IoError("splat file is empty");

  gap::Vec3 lo = set.centers[0], hi = set.centers[0];
  for (const gap::Vec3& c : set.centers) {
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  const gap::Vec3 center = 0.5 * (lo + hi);
  const double extent = std::max((hi - lo).maxCoeff(), 1e-6);

  const double az = azimuth_deg * kDegToRad, el = elevation_deg * kDegToRad;
  const gap::Vec3 pos = center + radius_scale * extent *
                                     gap::Vec3(std::cos(el) * std::cos(az),
                                               std::cos(el) * std::sin(az), std::sin(el));
  const gap::Camera cam =
      gap::Camera::look_at(pos, center, fov_deg * kDegToRad, resolution, resolution);

  const gap::Vec3 background(bg[0], bg[1], bg[2]);
  const gap::RenderBuffers rb = gap::render(set, cam, background);
  gap::write_file(output, gap::encode_png_rgb8(rb.color));
  std::printf("wrote %s (%dx%d, %zu disks)\n", output.c_str(), resolution, resolution, set.size());
  return 0;
}

int inspect_command(const std::string& input) {
  const gap::GaussianSet set = gap::import_splat_ply(input);
  if (set.size() == 0) {
    std::printf("empty splat file\n");
    return 0;
  }
  gap::Vec3 lo = set.centers[0], hi = set.centers[0];
  double s_min = 1e300, s_max = 0, s_sum = 0;
  double o_min = 1e300, o_max = 0, o_sum = 0;
  for (size_t i = 0; i < set.size(); ++i) {
    lo = lo.cwiseMin(set.centers[i]);
    hi = hi.cwiseMax(set.centers[i]);
    const double s = set.scales[i].maxCoeff();
    s_min = std::min(s_min, s);
    s_max = std::max(s_max, s);
    s_sum += s;
    o_min = std::min(o_min, set.opacities[i]);
    o_max = std::max(o_max, set.opacities[i]);
    o_sum += set.opacities[i];
  }
  std::printf("disks:    %zu\n", set.size());
  std::printf("bbox min: (%.4f, %.4f, %.4f)\n", lo.x(), lo.y(), lo.z());
  std::printf("bbox max: (%.4f, %.4f, %.4f)\n", hi.x(), hi.y(), hi.z());
  std::printf("scale:    min %.6f  mean %.6f  max %.6f\n", s_min, s_sum / set.size(), s_max);
  std::printf("opacity:  min %.4f  mean %.4f  max %.4f\n", o_min, o_sum / set.size(), o_max);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaussianize: point clouds to appearance-bearing 2D Gaussian splats"};
  app.require_subcommand(1);
  app.set_config("--config")->configurable(false);

  gap::RunConfig cfg;
  int views_flag = -1;
  long long target_count = -1;
  std::vector<double> bg{0.0, 0.0, 0.0};

  CLI::App* run = app.add_subcommand("run", "run the full gaussianization pipeline");
  run->add_option("--input,-i", cfg.input, "input point cloud (PLY or XYZ)");
  run->add_option("--prompt,-p", cfg.prompt, "text prompt for the appearance provider");
  run->add_option("--provider", cfg.provider, "appearance backend: procedural | remote");
  run->add_option("--remote-url", cfg.remote_url, "remote provider endpoint (http://host:port)");
  run->add_option("--remote-timeout", cfg.remote_timeout_s, "remote request timeout, seconds");
  run->add_option("--out,-o", cfg.output, "output splat PLY path");
  run->add_option("--log", cfg.log_path, "run log path (JSON lines); '-' disables");
  run->add_option("--debug-dir", cfg.debug_dir, "dump per-view depth/mask PNGs here");
  run->add_option("--seed", cfg.seed, "RNG seed (whole run is deterministic per seed)");
  run->add_option("--resolution", cfg.resolution, "view resolution in pixels");
  run->add_option("--views", views_flag, "total ring views (azimuths x elevation rings)");
  run->add_option("--elevations", cfg.elevations_deg, "elevation rings in degrees");
  run->add_option("--radius", cfg.view_radius, "camera orbit radius (unit-cube scale)");
  run->add_option("--fov", cfg.fov_y_deg, "vertical field of view, degrees");
  run->add_flag("--polar", cfg.polar_views, "append top/bottom polar views");
  run->add_option("--target-count", target_count, "subsample the cloud to this many points");
  run->add_option("--steps", cfg.optim.steps_per_view, "optimization steps per view");
  run->add_option("--alpha", cfg.optim.alpha, "distance-loss weight");
  run->add_option("--beta", cfg.optim.beta, "scale-loss weight");
  run->add_option("--tau", cfg.optim.tau, "scale cap (default: 2x mean 3-NN spacing)");
  run->add_flag("--densify", cfg.optim.densify, "enable split/clone densification");
  run->add_option("--densify-threshold", cfg.optim.densify_grad_threshold,
                  "center-gradient norm that triggers densification");
  run->add_option("--strength-generate", cfg.strength_generate, "denoising strength, new regions");
  run->add_option("--strength-update", cfg.strength_update, "denoising strength, updated regions");
  run->add_option("--bg", bg, "background color r g b")->expected(3);

  std::string in_path, out_path = "render.png";
  double azimuth = 30, elevation = 20, radius_scale = 2.5, fov = 50;
  int resolution = 512;
  CLI::App* render_cmd = app.add_subcommand("render", "render a splat PLY to a PNG");
  render_cmd->add_option("--input,-i", in_path, "splat PLY")->required();
  render_cmd->add_option("--out,-o", out_path, "output PNG");
  render_cmd->add_option("--azimuth", azimuth, "camera azimuth, degrees");
  render_cmd->add_option("--elevation", elevation, "camera elevation, degrees");
  render_cmd->add_option("--radius-scale", radius_scale, "orbit radius as a bbox-extent multiple");
  render_cmd->add_option("--fov", fov, "vertical field of view, degrees");
  render_cmd->add_option("--resolution", resolution, "image size in pixels");
  render_cmd->add_option("--bg", bg, "background color r g b")->expected(3);

  std::string inspect_path;
  CLI::App* inspect_cmd = app.add_subcommand("inspect", "print splat set statistics");
  inspect_cmd->add_option("--input,-i", inspect_path, "splat PLY")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) {
      if (views_flag >= 0) {
        const int rings = std::max<int>(1, static_cast<int>(cfg.elevations_deg.size()));
        cfg.n_azimuth = views_flag / rings;
      }
      if (target_count >= 0) cfg.target_count = static_cast<size_t>(target_count);
      cfg.background = gap::Vec3(bg[0], bg[1], bg[2]);
      return run_command(cfg);
    }
    if (render_cmd->parsed())
      return render_command(in_path, out_path, azimuth, elevation, radius_scale, fov, resolution,
                            bg);
    if (inspect_cmd->parsed()) return inspect_command(inspect_path);
  } catch (const gap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gap::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "pipeline error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
