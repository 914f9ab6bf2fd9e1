#pragma once

// Minimal PLY reader shared by the point-cloud loader and the splat importer.
// Supports ascii 1.0 and binary_little_endian 1.0, scalar properties of all
// standard types, and list properties (skipped unless requested element).

#include "gap/errors.hpp"

#include <map>
#include <string>
#include <vector>

namespace gap::detail {

struct PlyColumns {
  size_t row_count = 0;
  std::map<std::string, std::vector<double>> columns;

  bool has(const std::string& name) const { return columns.count(name) > 0; }
  const std::vector<double>& get(const std::string& name) const {
    auto it = columns.find(name);
    if (it == columns.end()) throw IoError("PLY: missing property '" + name + "'");
    return it->second;
  }
};

// Parses the named element's scalar properties into per-property columns.
// Other elements are skipped. Throws IoError on malformed input.
PlyColumns read_ply_columns(const std::string& path, const std::string& element);

bool looks_like_ply(const std::string& path);

}  // namespace gap::detail
