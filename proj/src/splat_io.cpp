#include "gap/splat_io.hpp"

#include "gap/errors.hpp"
#include "ply_reader.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace gap {

namespace {

constexpr double kShC0 = 0.28209479177387814;  // degree-0 spherical-harmonic basis
constexpr double kFlatLogScale = -13.815510557964274;  // log(1e-6)

double inverse_sigmoid(double o) {
  const double c = std::clamp(o, 1e-7, 1.0 - 1e-7);
  return std::log(c / (1.0 - c));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void put_float(std::ofstream& out, double v) {
  const float f = static_cast<float>(v);
  out.write(reinterpret_cast<const char*>(&f), sizeof(float));
}

}  // namespace

void export_splat_ply(const GaussianSet& set, const std::string& path,
                      const NormalizationInfo& denorm) {
  if (!set.consistent()) throw PipelineError("export: inconsistent attribute arrays");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");

  out << "ply\n"
      << "format binary_little_endian 1.0\n"
      << "element vertex " << set.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property float nx\nproperty float ny\nproperty float nz\n"
      << "property float f_dc_0\nproperty float f_dc_1\nproperty float f_dc_2\n"
      << "property float opacity\n"
      << "property float scale_0\nproperty float scale_1\nproperty float scale_2\n"
      << "property float rot_0\nproperty float rot_1\nproperty float rot_2\nproperty float rot_3\n"
      << "end_header\n";

  for (size_t i = 0; i < set.size(); ++i) {
    const Vec3 p = denorm.to_world(set.centers[i]);
    const Vec3 n = rotation_axes(set.rotations[i]).col(2);
    const Quat q = set.rotations[i].normalized();

    put_float(out, p.x());
    put_float(out, p.y());
    put_float(out, p.z());
    put_float(out, n.x());
    put_float(out, n.y());
    put_float(out, n.z());
    for (int c = 0; c < 3; ++c) put_float(out, (set.colors[i][c] - 0.5) / kShC0);
    put_float(out, inverse_sigmoid(set.opacities[i]));
    put_float(out, std::log(set.scales[i].x() / denorm.scale));
    put_float(out, std::log(set.scales[i].y() / denorm.scale));
    put_float(out, kFlatLogScale);
    put_float(out, q.w());
    put_float(out, q.x());
    put_float(out, q.y());
    put_float(out, q.z());
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

GaussianSet import_splat_ply(const std::string& path) {
  const detail::PlyColumns cols = detail::read_ply_columns(path, "vertex");
  const size_t m = cols.row_count;
  const char* needed[] = {"x",    "y",    "z",       "f_dc_0",  "f_dc_1", "f_dc_2",
                          "opacity", "scale_0", "scale_1", "rot_0",  "rot_1",
                          "rot_2",   "rot_3"};
  for (const char* name : needed)
    if (!cols.has(name)) throw IoError("splat PLY: missing property '" + std::string(name) + "'");

  GaussianSet set;
  set.centers.resize(m);
  set.rotations.resize(m);
  set.scales.resize(m);
  set.opacities.resize(m);
  set.colors.resize(m);
  set.best_view_cos.assign(m, -1.0);
  set.seen.assign(m, 1);

  const auto& xs = cols.get("x");
  const auto& ys = cols.get("y");
  const auto& zs = cols.get("z");
  const auto& o = cols.get("opacity");
  const auto& s0 = cols.get("scale_0");
  const auto& s1 = cols.get("scale_1");
  const auto& rw = cols.get("rot_0");
  const auto& rx = cols.get("rot_1");
  const auto& ry = cols.get("rot_2");
  const auto& rz = cols.get("rot_3");
  const std::vector<double>* dc[3] = {&cols.get("f_dc_0"), &cols.get("f_dc_1"),
                                      &cols.get("f_dc_2")};

  for (size_t i = 0; i < m; ++i) {
    set.centers[i] = Vec3(xs[i], ys[i], zs[i]);
    for (int c = 0; c < 3; ++c) set.colors[i][c] = (*dc[c])[i] * kShC0 + 0.5;
    set.opacities[i] = sigmoid(o[i]);
    set.scales[i] = Vec2(std::exp(s0[i]), std::exp(s1[i]));
    Quat q(rw[i], rx[i], ry[i], rz[i]);
    const double norm = q.norm();
    set.rotations[i] = norm > 0 ? q.normalized() : Quat::Identity();
  }
  return set;
}

}  // namespace gap
