#include "gap/provider.hpp"

#include "gap/errors.hpp"
#include "gap/parallel.hpp"
#include "gap/png_io.hpp"
#include "gap/rng.hpp"
#include "util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>

namespace gap {

namespace {

inline double lattice_value(int64_t ix, int64_t iy, int64_t iz, uint64_t seed) {
  uint64_t h = seed;
  h ^= static_cast<uint64_t>(ix) * 0x9e3779b97f4a7c15ULL;
  h ^= static_cast<uint64_t>(iy) * 0xc2b2ae3d27d4eb4fULL;
  h ^= static_cast<uint64_t>(iz) * 0x165667b19e3779f9ULL;
  uint64_t state = h;
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

inline double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(const Vec3& p, double freq, uint64_t seed) {
  const Vec3 x = p * freq;
  const Vec3 fl(std::floor(x.x()), std::floor(x.y()), std::floor(x.z()));
  const int64_t ix = static_cast<int64_t>(fl.x());
  const int64_t iy = static_cast<int64_t>(fl.y());
  const int64_t iz = static_cast<int64_t>(fl.z());
  const double fx = smooth(x.x() - fl.x());
  const double fy = smooth(x.y() - fl.y());
  const double fz = smooth(x.z() - fl.z());

  auto v = [&](int dx, int dy, int dz) { return lattice_value(ix + dx, iy + dy, iz + dz, seed); };
  const double c00 = v(0, 0, 0) + fx * (v(1, 0, 0) - v(0, 0, 0));
  const double c10 = v(0, 1, 0) + fx * (v(1, 1, 0) - v(0, 1, 0));
  const double c01 = v(0, 0, 1) + fx * (v(1, 0, 1) - v(0, 0, 1));
  const double c11 = v(0, 1, 1) + fx * (v(1, 1, 1) - v(0, 1, 1));
  const double c0 = c00 + fy * (c10 - c00);
  const double c1 = c01 + fy * (c11 - c01);
  return c0 + fz * (c1 - c0);
}

}  // namespace

Vec3 procedural_texture(const Vec3& point, const std::string& prompt) {
  if (prompt.rfind("gradient", 0) == 0) {
    // axis-aligned ramp fixture: "gradient", "gradient:y", "gradient:z"
    int axis = 0;
    if (prompt.size() >= 10 && prompt[8] == ':') {
      if (prompt[9] == 'y') axis = 1;
      if (prompt[9] == 'z') axis = 2;
    }
    const double t = std::clamp(point[axis] + 0.5, 0.0, 1.0);
    const Vec3 a(0.05, 0.15, 0.85), b(0.95, 0.80, 0.10);
    return a + t * (b - a);
  }

  const uint64_t seed = fnv1a64(prompt);
  Rng rng(seed);
  Vec3 palette[4];
  for (Vec3& c : palette)
    c = Vec3(0.08 + 0.88 * rng.next_double(), 0.08 + 0.88 * rng.next_double(),
             0.08 + 0.88 * rng.next_double());
  const double base_freq = 2.0 + 5.0 * rng.next_double();

  double value = 0.0, amp = 0.5, freq = base_freq, norm = 0.0;
  for (int octave = 0; octave < 4; ++octave) {
    value += amp * value_noise(point, freq, seed + 0x517cc1b727220a95ULL * (octave + 1));
    norm += amp;
    amp *= 0.5;
    freq *= 2.03;
  }
  double t = std::clamp(value / norm, 0.0, 1.0);

  // piecewise-linear blend across the 4 palette stops
  const double pos = t * 3.0;
  const int k = std::min(2, static_cast<int>(pos));
  const double f = pos - k;
  return palette[k] + f * (palette[k + 1] - palette[k]);
}

void validate_request(const InpaintRequest& req) {
  const int w = req.image.width, h = req.image.height;
  if (w <= 0 || h <= 0) throw ProviderError("inpaint request: empty image");
  if (req.depth.width != w || req.depth.height != h)
    throw ProviderError("inpaint request: depth dimensions mismatch");
  if (req.trimask.width != w || req.trimask.height != h)
    throw ProviderError("inpaint request: mask dimensions mismatch");
  if (!(req.strength_generate > 0) || req.strength_generate > 1 || !(req.strength_update > 0) ||
      req.strength_update > 1)
    throw ProviderError("inpaint request: strengths must be in (0, 1]");
  if (req.strength_update > req.strength_generate)
    throw ProviderError("inpaint request: strength_update must not exceed strength_generate");
}

InpaintResponse ProceduralProvider::inpaint(const InpaintRequest& req) {
  validate_request(req);
  InpaintResponse res;
  res.image = req.image;

  const Camera& cam = req.camera;
  parallel_for(0, req.image.height, [&](int y) {
    for (int x = 0; x < req.image.width; ++x) {
      const size_t pix = static_cast<size_t>(y) * req.image.width + x;
      const MaskLabel l = req.trimask.labels[pix];
      if (l != MaskLabel::kGenerate && l != MaskLabel::kUpdate) continue;
      if (!req.depth.hit[pix]) continue;
      const Vec3 world = cam.position + req.depth.depth[pix] * cam.ray_dir(x + 0.5, y + 0.5);
      res.image.set_pixel(x, y, procedural_texture(world, req.prompt));
    }
  }, 16);
  return res;
}

std::vector<uint16_t> quantize_depth(const DepthMap& depth) {
  std::vector<uint16_t> out(depth.pixel_count(), 0);
  for (size_t i = 0; i < out.size(); ++i) {
    if (!depth.hit[i]) continue;  // 0 encodes "miss"
    const double t = std::clamp(depth.depth[i] / DistanceField::kFarBound, 0.0, 1.0);
    out[i] = static_cast<uint16_t>(std::lround(t * 65535.0));
  }
  return out;
}

std::string inpaint_request_to_json(const InpaintRequest& req) {
  nlohmann::json body;
  body["image"] = detail::base64_encode(encode_png_rgb8(req.image));
  body["depth"] = detail::base64_encode(
      encode_png_gray16(quantize_depth(req.depth), req.depth.width, req.depth.height));
  body["mask"] = detail::base64_encode(
      encode_png_indexed8(mask_to_palette(req.trimask), req.trimask.width, req.trimask.height));
  body["prompt"] = req.prompt;
  body["strength_generate"] = req.strength_generate;
  body["strength_update"] = req.strength_update;
  body["seed"] = req.seed;
  return body.dump();
}

RemoteProvider::RemoteProvider(RemoteProviderOptions options) : options_(std::move(options)) {
  std::string rest = options_.url;
  const std::string http = "http://";
  if (rest.rfind(http, 0) != 0) {
    if (rest.rfind("https://", 0) == 0)
      throw ConfigError("remote provider: https endpoints are not supported");
    throw ConfigError("remote provider: url must start with http://");
  }
  rest = rest.substr(http.size());
  const size_t slash = rest.find('/');
  if (slash != std::string::npos) {
    path_prefix_ = rest.substr(slash);
    if (path_prefix_ == "/") path_prefix_.clear();
    rest = rest.substr(0, slash);
  }
  const size_t colon = rest.find(':');
  if (colon != std::string::npos) {
    host_ = rest.substr(0, colon);
    port_ = std::atoi(rest.substr(colon + 1).c_str());
    if (port_ <= 0 || port_ > 65535) throw ConfigError("remote provider: bad port");
  } else {
    host_ = rest;
    port_ = 80;
  }
  if (host_.empty()) throw ConfigError("remote provider: empty host");
}

InpaintResponse RemoteProvider::inpaint(const InpaintRequest& req) {
  validate_request(req);
  const std::string body = inpaint_request_to_json(req);

  httplib::Client client(host_, port_);
  const auto timeout = std::chrono::milliseconds(
      static_cast<long>(options_.timeout_seconds * 1000.0));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  if (const char* token = std::getenv("GAP_PROVIDER_TOKEN"))
    headers.emplace("Authorization", std::string("Bearer ") + token);

  const auto res = client.Post((path_prefix_ + "/v1/inpaint").c_str(), headers, body,
                               "application/json");
  if (!res) throw ProviderError("remote provider: request failed (" + host_ + ")");
  if (res->status != 200)
    throw ProviderError("remote provider: HTTP " + std::to_string(res->status));

  try {
    const nlohmann::json parsed = nlohmann::json::parse(res->body);
    const std::vector<uint8_t> png = detail::base64_decode(parsed.at("image").get<std::string>());
    InpaintResponse out;
    out.image = decode_png_rgb8(png);
    if (!out.image.same_size(req.image))
      throw ProviderError("remote provider: response image dimensions differ from request");
    return out;
  } catch (const ProviderError&) {
    throw;
  } catch (const std::exception& e) {
    throw ProviderError(std::string("remote provider: malformed response (") + e.what() + ")");
  }
}

std::unique_ptr<AppearanceProvider> make_provider(const std::string& kind,
                                                  const RemoteProviderOptions& remote) {
  if (kind == "procedural") return std::make_unique<ProceduralProvider>();
  if (kind == "remote") {
    if (remote.url.empty()) throw ConfigError("remote provider requires provider.remote.url");
    return std::make_unique<RemoteProvider>(remote);
  }
  throw ConfigError("unknown provider '" + kind + "' (expected procedural|remote)");
}

}  // namespace gap
