#pragma once

#include "gap/gaussian_set.hpp"
#include "gap/point_cloud.hpp"

#include <string>

namespace gap {

// Binary little-endian PLY in the common splat interchange layout:
// x y z, nx ny nz (disk normal), f_dc_0..2 ((color - 0.5) / 0.2820948),
// opacity (inverse sigmoid), scale_0..2 (log domain; scale_2 = log(1e-6) for
// the flat disk axis), rot_0..3 (quaternion w x y z). Geometry is
// de-normalized back to the input frame via `denorm`.
void export_splat_ply(const GaussianSet& set, const std::string& path,
                      const NormalizationInfo& denorm = {});

// Inverse of export_splat_ply (activations applied; bookkeeping reset to
// seen = true). Coordinates are kept in the file's frame.
GaussianSet import_splat_ply(const std::string& path);

}  // namespace gap
