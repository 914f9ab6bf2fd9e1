#pragma once

#include "gap/camera.hpp"
#include "gap/distance_field.hpp"
#include "gap/types.hpp"
#include "gap/view_pipeline.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace gap {

struct InpaintRequest {
  ImageRGB image;      // current render
  DepthMap depth;      // ray distances from the distance field
  TriMask trimask;
  std::string prompt;
  double strength_generate = 1.0;
  double strength_update = 0.5;
  uint64_t seed = 0;
  // The camera is carried for backends that reason in world space (the
  // procedural one back-projects through the depth map). It is not part of
  // the wire protocol.
  Camera camera;
};

struct InpaintResponse {
  ImageRGB image;
};

class AppearanceProvider {
 public:
  virtual ~AppearanceProvider() = default;
  virtual InpaintResponse inpaint(const InpaintRequest& req) = 0;
  virtual std::string name() const = 0;
};

// Deterministic world-space solid texture: the prompt picks a palette and
// noise frequencies, so the same surface point gets the same color from every
// view. Prompts starting with "gradient" produce an axis-aligned color ramp
// (test fixture).
Vec3 procedural_texture(const Vec3& point, const std::string& prompt);

// Fills GENERATE/UPDATE pixels by back-projecting them through the depth map
// and sampling procedural_texture; other pixels pass through unchanged.
class ProceduralProvider : public AppearanceProvider {
 public:
  InpaintResponse inpaint(const InpaintRequest& req) override;
  std::string name() const override { return "procedural"; }
};

struct RemoteProviderOptions {
  std::string url;           // e.g. http://host:port (POST /v1/inpaint)
  double timeout_seconds = 60.0;
};

// HTTP client for an external depth-aware inpainting service. Request/response
// bodies are JSON with base64 PNG payloads; failures throw ProviderError and
// the pipeline skips the view.
class RemoteProvider : public AppearanceProvider {
 public:
  explicit RemoteProvider(RemoteProviderOptions options);
  InpaintResponse inpaint(const InpaintRequest& req) override;
  std::string name() const override { return "remote"; }

 private:
  RemoteProviderOptions options_;
  std::string host_;
  int port_ = 80;
  std::string path_prefix_;
};

// Shared request validation (dimension consistency, strength ordering).
void validate_request(const InpaintRequest& req);

// Wire helpers, exposed for the mock-server tests.
std::string inpaint_request_to_json(const InpaintRequest& req);
std::vector<uint16_t> quantize_depth(const DepthMap& depth);

std::unique_ptr<AppearanceProvider> make_provider(const std::string& kind,
                                                  const RemoteProviderOptions& remote);

}  // namespace gap
