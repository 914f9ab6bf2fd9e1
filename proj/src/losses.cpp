#include "gap/losses.hpp"

#include "gap/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace gap {

double distance_loss(const GaussianSet& set, const VisibleSet& visible,
                     const DistanceField& field, std::vector<Vec3>* grad_centers) {
  if (grad_centers) grad_centers->assign(visible.indices.size(), Vec3::Zero());
  if (visible.indices.empty()) return 0.0;

  double sum = 0.0;
  for (size_t k = 0; k < visible.indices.size(); ++k) {
    const Vec3& c = set.centers[visible.indices[k]];
    const double f = field.udf(c);
    sum += f;
    if (grad_centers && f > 1e-12) (*grad_centers)[k] = field.gradient(c);
  }
  return sum / static_cast<double>(visible.indices.size());
}

double scale_loss(const GaussianSet& set, const VisibleSet& visible, double tau,
                  std::vector<Vec2>* grad_scales) {
  if (!(tau > 0)) throw PipelineError("scale_loss: tau must be positive");
  if (grad_scales) grad_scales->assign(visible.indices.size(), Vec2::Zero());
  if (visible.indices.empty()) return 0.0;

  double sum = 0.0;
  for (size_t k = 0; k < visible.indices.size(); ++k) {
    const Vec2& s = set.scales[visible.indices[k]];
    const double s_max = std::max(s.x(), s.y());
    const double term = std::min(s_max, tau) - s_max;
    sum += term * term;
    if (grad_scales && s_max > tau) {
      // d/ds_max (tau - s_max)^2 = 2 (s_max - tau)
      const double g = 2.0 * (s_max - tau);
      Vec2& gs = (*grad_scales)[k];
      if (s.x() == s.y()) {
        gs = Vec2(0.5 * g, 0.5 * g);
      } else if (s.x() > s.y()) {
        gs.x() = g;
      } else {
        gs.y() = g;
      }
    }
  }
  return sum / static_cast<double>(visible.indices.size());
}

namespace {

constexpr int kWindow = 11;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;

std::array<double, kWindow> ssim_kernel() {
  std::array<double, kWindow> k;
  const double sigma = 1.5;
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - (kWindow - 1) / 2.0;
    k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable valid-mode convolution of a single channel (row-major w x h).
// Output is (w - 10) x (h - 10).
void conv_valid(const std::vector<double>& in, int w, int h,
                const std::array<double, kWindow>& k, std::vector<double>& tmp,
                std::vector<double>& out) {
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  tmp.assign(static_cast<size_t>(ow) * h, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += k[i] * in[static_cast<size_t>(y) * w + x + i];
      tmp[static_cast<size_t>(y) * ow + x] = acc;
    }
  }
  out.assign(static_cast<size_t>(ow) * oh, 0.0);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += k[i] * tmp[static_cast<size_t>(y + i) * ow + x];
      out[static_cast<size_t>(y) * ow + x] = acc;
    }
  }
}

// Adjoint of conv_valid: scatters a (w-10) x (h-10) gradient back to w x h.
void conv_valid_adjoint(const std::vector<double>& g, int w, int h,
                        const std::array<double, kWindow>& k, std::vector<double>& tmp,
                        std::vector<double>& out) {
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  // vertical adjoint: (ow x oh) -> (ow x h)
  tmp.assign(static_cast<size_t>(ow) * h, 0.0);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      const double v = g[static_cast<size_t>(y) * ow + x];
      if (v == 0.0) continue;
      for (int i = 0; i < kWindow; ++i) tmp[static_cast<size_t>(y + i) * ow + x] += k[i] * v;
    }
  // horizontal adjoint: (ow x h) -> (w x h)
  out.assign(static_cast<size_t>(w) * h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      const double v = tmp[static_cast<size_t>(y) * ow + x];
      if (v == 0.0) continue;
      for (int i = 0; i < kWindow; ++i) out[static_cast<size_t>(y) * w + x + i] += k[i] * v;
    }
}

}  // namespace

RenderingLoss rendering_loss(const ImageRGB& rendered, const ImageRGB& target) {
  if (!rendered.same_size(target)) throw PipelineError("rendering_loss: dimension mismatch");
  const int w = rendered.width, h = rendered.height;
  if (w < kWindow || h < kWindow)
    throw PipelineError("rendering_loss: images must be at least 11x11 for the D-SSIM window");

  RenderingLoss out;
  out.grad = ImageRGB(w, h);
  const size_t n = rendered.data.size();

  // L1 term, mean over pixels and channels
  double l1 = 0.0;
  for (size_t i = 0; i < n; ++i) l1 += std::abs(rendered.data[i] - target.data[i]);
  l1 /= static_cast<double>(n);
  out.l1 = l1;
  for (size_t i = 0; i < n; ++i) {
    const double d = rendered.data[i] - target.data[i];
    out.grad.data[i] = 0.8 * (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0)) / static_cast<double>(n);
  }

  // D-SSIM term on the valid interior, per channel
  static const std::array<double, kWindow> kernel = ssim_kernel();
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  const size_t on = static_cast<size_t>(ow) * oh;

  std::vector<double> x(static_cast<size_t>(w) * h), y_(static_cast<size_t>(w) * h);
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  std::vector<double> ux, uy, vx, vy, vxy, tmp;
  std::vector<double> g_ux(on), g_vx(on), g_vxy(on), adj;

  double ssim_sum = 0.0;
  const double mean_scale = 1.0 / (3.0 * static_cast<double>(on));

  for (int c = 0; c < 3; ++c) {
    for (size_t i = 0; i < x.size(); ++i) {
      x[i] = rendered.data[3 * i + c];
      y_[i] = target.data[3 * i + c];
      xx[i] = x[i] * x[i];
      yy[i] = y_[i] * y_[i];
      xy[i] = x[i] * y_[i];
    }
    conv_valid(x, w, h, kernel, tmp, ux);
    conv_valid(y_, w, h, kernel, tmp, uy);
    conv_valid(xx, w, h, kernel, tmp, vx);
    conv_valid(yy, w, h, kernel, tmp, vy);
    conv_valid(xy, w, h, kernel, tmp, vxy);

    for (size_t i = 0; i < on; ++i) {
      const double a1 = 2.0 * ux[i] * uy[i] + kSsimC1;
      const double a2 = 2.0 * (vxy[i] - ux[i] * uy[i]) + kSsimC2;
      const double b1 = ux[i] * ux[i] + uy[i] * uy[i] + kSsimC1;
      const double b2 = (vx[i] - ux[i] * ux[i]) + (vy[i] - uy[i] * uy[i]) + kSsimC2;
      const double s = (a1 * a2) / (b1 * b2);
      ssim_sum += s;

      // dL/ds for L = 0.2 * (1 - mean s) / 2
      const double dl_ds = 0.2 * (-0.5) * mean_scale;
      g_ux[i] = dl_ds * (2.0 * uy[i] * (a2 - a1) / (b1 * b2) -
                         2.0 * ux[i] * s * (1.0 / b1 - 1.0 / b2));
      g_vx[i] = dl_ds * (-s / b2);
      g_vxy[i] = dl_ds * (2.0 * a1 / (b1 * b2));
    }

    conv_valid_adjoint(g_ux, w, h, kernel, tmp, adj);
    for (size_t i = 0; i < x.size(); ++i) out.grad.data[3 * i + c] += adj[i];
    conv_valid_adjoint(g_vx, w, h, kernel, tmp, adj);
    for (size_t i = 0; i < x.size(); ++i) out.grad.data[3 * i + c] += adj[i] * 2.0 * x[i];
    conv_valid_adjoint(g_vxy, w, h, kernel, tmp, adj);
    for (size_t i = 0; i < x.size(); ++i) out.grad.data[3 * i + c] += adj[i] * y_[i];
  }

  const double mean_ssim = ssim_sum / (3.0 * static_cast<double>(on));
  out.dssim = (1.0 - mean_ssim) / 2.0;
  out.value = 0.8 * out.l1 + 0.2 * out.dssim;
  return out;
}

}  // namespace gap
