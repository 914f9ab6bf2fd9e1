#pragma once

#include "gap/gaussian_set.hpp"
#include "gap/types.hpp"

#include <cstdint>
#include <vector>

namespace gap {

struct InpaintConfig {
  int neighbor_count = 8;      // L
  double normal_gate = 0.5;    // cosine gate (60 degrees)
  double base_opacity = 0.9;   // o0
  double reference_count = 8;  // P0
  double rho = 0.0;            // density radius; <= 0 means "derive 2x mean 3-NN spacing"
  double tau = 0.0;            // cap for the activated inpainted radius

  void validate() const;
};

// Indices with seen == false.
std::vector<uint32_t> find_unseen(const GaussianSet& set);

// Distance-, normal-, and opacity-weighted color blend from the L nearest seen
// disks; neighbors whose normal dot is at or below the gate contribute zero.
// Falls back to the nearest seen disk's color when every weight is gated out.
// Throws PipelineError when no disk has been seen.
void color_diffuse(GaussianSet& set, const std::vector<uint32_t>& unseen,
                   const InpaintConfig& cfg);

// log(mean distance of the L nearest disks, seen or not); the stored radius is
// the exponential of that value clamped to [1e-4, tau], both components equal.
void size_scale(GaussianSet& set, const std::vector<uint32_t>& unseen, const InpaintConfig& cfg);

// Raw log-domain value of the size rule for a given mean neighbor distance.
double size_scale_raw(double mean_neighbor_distance);

// o0 / max(1, P / P0) with P the number of other disks within rho.
void opacity_control(GaussianSet& set, const std::vector<uint32_t>& unseen,
                     const InpaintConfig& cfg);

}  // namespace gap
