#include "gap/optimizer.hpp"

#include "gap/errors.hpp"
#include "gap/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace gap {

void OptimConfig::validate() const {
  if (steps_per_view <= 0) throw ConfigError("optim: steps_per_view must be positive");
  for (double lr : {lr_center, lr_rotation, lr_scale, lr_opacity, lr_color})
    if (!(lr > 0)) throw ConfigError("optim: learning rates must be positive");
  if (alpha < 0 || beta < 0) throw ConfigError("optim: loss weights must be non-negative");
  if (densify && !(densify_grad_threshold > 0))
    throw ConfigError("optim: densify threshold must be positive");
}

namespace {

// flat parameter layout per visible disk: 3 center, 4 rotation (w,x,y,z),
// 2 scale, 1 opacity, 3 color
constexpr int kParamsPerDisk = 13;

struct Adam {
  std::vector<double> m, v;
  double beta1, beta2, eps;
  double beta1_t = 1.0, beta2_t = 1.0;

  Adam(size_t n, const OptimConfig& cfg)
      : m(n, 0.0), v(n, 0.0), beta1(cfg.adam_beta1), beta2(cfg.adam_beta2), eps(cfg.adam_eps) {}

  void step_begin() {
    beta1_t *= beta1;
    beta2_t *= beta2;
  }

  double update(size_t i, double grad, double lr) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad;
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad * grad;
    const double m_hat = m[i] / (1.0 - beta1_t);
    const double v_hat = v[i] / (1.0 - beta2_t);
    return -lr * m_hat / (std::sqrt(v_hat) + eps);
  }
};

double combined_loss_value(const GaussianSet& set, const VisibleSet& visible,
                           const DistanceField& field, const OptimConfig& cfg,
                           const RenderingLoss& rl, double* dist_value = nullptr) {
  double value = rl.value;
  double dist = 0.0;
  if (cfg.alpha > 0) {
    dist = distance_loss(set, visible, field, nullptr);
    value += cfg.alpha * dist;
  }
  if (cfg.beta > 0) value += cfg.beta * scale_loss(set, visible, cfg.tau, nullptr);
  if (dist_value) *dist_value = dist;
  return value;
}

}  // namespace

ViewReport optimize_view(GaussianSet& set, const VisibleSet& visible, const ImageRGB& target,
                         const Camera& cam, const DistanceField& field, const OptimConfig& cfg,
                         const Vec3& background, std::vector<double>* accum_center_grad) {
  cfg.validate();
  if (!(cfg.tau > 0)) throw PipelineError("optimize_view: tau not set");
  ViewReport report;
  report.visible_count = visible.indices.size();
  if (visible.indices.empty()) {
    report.skipped = true;
    return report;
  }

  const size_t n_vis = visible.indices.size();
  Adam adam(n_vis * kParamsPerDisk, cfg);
  std::vector<Vec3> dist_grads;
  std::vector<Vec2> scale_grads;
  std::vector<double> grad_norm_accum(accum_center_grad ? n_vis : 0, 0.0);

  for (int step = 0; step < cfg.steps_per_view; ++step) {
    const RenderBuffers rb = render(set, cam, background);
    const RenderingLoss rl = rendering_loss(rb.color, target);

    if (step == 0) {
      report.render_loss_initial = rl.value;
      report.loss_initial = combined_loss_value(set, visible, field, cfg, rl);
    }

    const GaussianGradients g = render_backward(set, cam, rl.grad, background);
    if (cfg.alpha > 0) distance_loss(set, visible, field, &dist_grads);
    if (cfg.beta > 0) scale_loss(set, visible, cfg.tau, &scale_grads);

    adam.step_begin();
    for (size_t k = 0; k < n_vis; ++k) {
      const uint32_t i = visible.indices[k];
      const size_t base = k * kParamsPerDisk;

      Vec3 gc = g.center[i];
      if (accum_center_grad) grad_norm_accum[k] += gc.norm();
      if (cfg.alpha > 0) gc += cfg.alpha * dist_grads[k];
      for (int a = 0; a < 3; ++a)
        set.centers[i][a] += adam.update(base + a, gc[a], cfg.lr_center);

      const Vec4& gr = g.rotation_wxyz[i];
      Quat& q = set.rotations[i];
      q.w() += adam.update(base + 3, gr[0], cfg.lr_rotation);
      q.x() += adam.update(base + 4, gr[1], cfg.lr_rotation);
      q.y() += adam.update(base + 5, gr[2], cfg.lr_rotation);
      q.z() += adam.update(base + 6, gr[3], cfg.lr_rotation);

      Vec2 gs = g.scale[i];
      if (cfg.beta > 0) gs += cfg.beta * scale_grads[k];
      set.scales[i].x() += adam.update(base + 7, gs.x(), cfg.lr_scale);
      set.scales[i].y() += adam.update(base + 8, gs.y(), cfg.lr_scale);
      set.scales[i] = set.scales[i].cwiseMax(1e-5);

      set.opacities[i] += adam.update(base + 9, g.opacity[i], cfg.lr_opacity);
      set.opacities[i] = std::clamp(set.opacities[i], 0.0, 1.0);

      for (int a = 0; a < 3; ++a)
        set.colors[i][a] += adam.update(base + 10 + a, g.color[i][a], cfg.lr_color);
    }
  }

  // post-pass cleanup per the contract
  for (size_t k = 0; k < n_vis; ++k) {
    const uint32_t i = visible.indices[k];
    set.rotations[i].normalize();
    set.scales[i] = set.scales[i].cwiseMax(1e-5);
    set.opacities[i] = std::clamp(set.opacities[i], 0.0, 1.0);
  }

  {
    const RenderBuffers rb = render(set, cam, background);
    const RenderingLoss rl = rendering_loss(rb.color, target);
    report.render_loss_final = rl.value;
    report.loss_final =
        combined_loss_value(set, visible, field, cfg, rl, &report.distance_loss_final);
  }
  report.steps = cfg.steps_per_view;
  report.non_decreasing = report.loss_final > report.loss_initial;

  if (accum_center_grad) {
    if (accum_center_grad->size() != set.size())
      throw PipelineError("optimize_view: accumulator size mismatch");
    for (size_t k = 0; k < n_vis; ++k)
      (*accum_center_grad)[visible.indices[k]] +=
          grad_norm_accum[k] / static_cast<double>(cfg.steps_per_view);
  }
  return report;
}

GaussianSet densify(const GaussianSet& set, const std::vector<double>& grads,
                    const OptimConfig& cfg) {
  if (grads.size() != set.size()) throw PipelineError("densify: gradient array size mismatch");
  if (!(cfg.tau > 0)) throw PipelineError("densify: tau not set");

  std::vector<uint8_t> split_parent(set.size(), 0);
  std::vector<uint32_t> hot;
  for (size_t i = 0; i < set.size(); ++i)
    if (grads[i] > cfg.densify_grad_threshold) hot.push_back(static_cast<uint32_t>(i));

  GaussianSet out;
  for (uint32_t i : hot) {
    const double s_max = std::max(set.scales[i].x(), set.scales[i].y());
    if (s_max >= cfg.tau / 2.0) split_parent[i] = 1;
  }

  // originals, minus the split parents
  for (size_t i = 0; i < set.size(); ++i) {
    if (split_parent[i]) continue;
    out.centers.push_back(set.centers[i]);
    out.rotations.push_back(set.rotations[i]);
    out.scales.push_back(set.scales[i]);
    out.opacities.push_back(set.opacities[i]);
    out.colors.push_back(set.colors[i]);
    out.best_view_cos.push_back(set.best_view_cos[i]);
    out.seen.push_back(set.seen[i]);
  }

  auto push_new = [&](const Vec3& center, const Quat& rot, const Vec2& scale, double opacity,
                      const Vec3& color) {
    out.centers.push_back(center);
    out.rotations.push_back(rot);
    out.scales.push_back(scale);
    out.opacities.push_back(opacity);
    out.colors.push_back(color);
    out.best_view_cos.push_back(-1.0);
    out.seen.push_back(0);
  };

  for (uint32_t i : hot) {
    const Mat3 axes = rotation_axes(set.rotations[i]);
    const Vec2& s = set.scales[i];
    const bool first_major = s.x() >= s.y();
    const Vec3 axis = first_major ? axes.col(0) : axes.col(1);
    const double s_max = std::max(s.x(), s.y());

    if (!split_parent[i]) {
      // clone: copy offset by one scale along the larger tangent axis
      push_new(set.centers[i] + s_max * axis, set.rotations[i], s, set.opacities[i],
               set.colors[i]);
    } else {
      const Vec2 child_scale = s / 1.6;
      push_new(set.centers[i] + 0.5 * s_max * axis, set.rotations[i], child_scale,
               set.opacities[i], set.colors[i]);
      push_new(set.centers[i] - 0.5 * s_max * axis, set.rotations[i], child_scale,
               set.opacities[i], set.colors[i]);
    }
  }
  return out;
}

}  // namespace gap
