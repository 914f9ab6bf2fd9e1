#include "ply_reader.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gap::detail {

namespace {

enum class ScalarType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

size_t type_size(ScalarType t) {
  switch (t) {
    case ScalarType::kInt8:
    case ScalarType::kUInt8:
      return 1;
    case ScalarType::kInt16:
    case ScalarType::kUInt16:
      return 2;
    case ScalarType::kInt32:
    case ScalarType::kUInt32:
    case ScalarType::kFloat32:
      return 4;
    case ScalarType::kFloat64:
      return 8;
  }
  return 0;
}

ScalarType parse_type(const std::string& s) {
  if (s == "char" || s == "int8") return ScalarType::kInt8;
  if (s == "uchar" || s == "uint8") return ScalarType::kUInt8;
  if (s == "short" || s == "int16") return ScalarType::kInt16;
  if (s == "ushort" || s == "uint16") return ScalarType::kUInt16;
  if (s == "int" || s == "int32") return ScalarType::kInt32;
  if (s == "uint" || s == "uint32") return ScalarType::kUInt32;
  if (s == "float" || s == "float32") return ScalarType::kFloat32;
  if (s == "double" || s == "float64") return ScalarType::kFloat64;
  throw IoError("PLY: unknown property type '" + s + "'");
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::kFloat32;
  bool is_list = false;
  ScalarType count_type = ScalarType::kUInt8;
};

struct Element {
  std::string name;
  size_t count = 0;
  std::vector<Property> properties;
};

double read_binary_scalar(std::istream& in, ScalarType t) {
  std::array<unsigned char, 8> buf;
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(type_size(t)));
  if (!in) throw IoError("PLY: unexpected end of binary data");
  switch (t) {
    case ScalarType::kInt8:
      return static_cast<double>(static_cast<int8_t>(buf[0]));
    case ScalarType::kUInt8:
      return static_cast<double>(buf[0]);
    case ScalarType::kInt16: {
      int16_t v;
      std::memcpy(&v, buf.data(), 2);
      return v;
    }
    case ScalarType::kUInt16: {
      uint16_t v;
      std::memcpy(&v, buf.data(), 2);
      return v;
    }
    case ScalarType::kInt32: {
      int32_t v;
      std::memcpy(&v, buf.data(), 4);
      return v;
    }
    case ScalarType::kUInt32: {
      uint32_t v;
      std::memcpy(&v, buf.data(), 4);
      return v;
    }
    case ScalarType::kFloat32: {
      float v;
      std::memcpy(&v, buf.data(), 4);
      return v;
    }
    case ScalarType::kFloat64: {
      double v;
      std::memcpy(&v, buf.data(), 8);
      return v;
    }
  }
  return 0.0;
}

double parse_ascii_scalar(std::istream& line_in) {
  double v;
  if (!(line_in >> v)) throw IoError("PLY: malformed ascii row");
  return v;
}

}  // namespace

bool looks_like_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  char magic[3] = {};
  in.read(magic, 3);
  return in && magic[0] == 'p' && magic[1] == 'l' && magic[2] == 'y';
}

PlyColumns read_ply_columns(const std::string& path, const std::string& element) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw IoError("PLY: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "ply") throw IoError("PLY: missing magic");

  bool binary = false;
  bool format_seen = false;
  std::vector<Element> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "comment" || tok == "obj_info" || tok.empty()) continue;
    if (tok == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii") {
        binary = false;
      } else if (fmt == "binary_little_endian") {
        binary = true;
      } else {
        throw IoError("PLY: unsupported format '" + fmt + "'");
      }
      format_seen = true;
    } else if (tok == "element") {
      Element e;
      if (!(ls >> e.name >> e.count)) throw IoError("PLY: malformed element line");
      elements.push_back(e);
    } else if (tok == "property") {
      if (elements.empty()) throw IoError("PLY: property before element");
      std::string t;
      ls >> t;
      Property p;
      if (t == "list") {
        std::string ct, vt;
        if (!(ls >> ct >> vt >> p.name)) throw IoError("PLY: malformed list property");
        p.is_list = true;
        p.count_type = parse_type(ct);
        p.type = parse_type(vt);
      } else {
        p.type = parse_type(t);
        if (!(ls >> p.name)) throw IoError("PLY: malformed property line");
      }
      elements.back().properties.push_back(p);
    } else if (tok == "end_header") {
      break;
    } else {
      throw IoError("PLY: unexpected header token '" + tok + "'");
    }
  }
  if (!format_seen) throw IoError("PLY: missing format line");
  if (!in) throw IoError("PLY: truncated header");

  PlyColumns out;
  for (const Element& e : elements) {
    const bool wanted = (e.name == element);
    if (wanted) {
      out.row_count = e.count;
      for (const Property& p : e.properties)
        if (!p.is_list) out.columns[p.name].reserve(e.count);
    }
    for (size_t row = 0; row < e.count; ++row) {
      if (binary) {
        for (const Property& p : e.properties) {
          if (p.is_list) {
            const double n = read_binary_scalar(in, p.count_type);
            const size_t count = n < 0 ? 0 : static_cast<size_t>(n);
            in.seekg(static_cast<std::streamoff>(count * type_size(p.type)), std::ios::cur);
            if (!in) throw IoError("PLY: truncated list data");
          } else {
            const double v = read_binary_scalar(in, p.type);
            if (wanted) out.columns[p.name].push_back(v);
          }
        }
      } else {
        std::string row_line;
        do {
          if (!std::getline(in, row_line)) throw IoError("PLY: truncated ascii data");
        } while (row_line.find_first_not_of(" \t\r\n") == std::string::npos);
        std::istringstream rs(row_line);
        for (const Property& p : e.properties) {
          if (p.is_list) {
            const double n = parse_ascii_scalar(rs);
            const size_t count = n < 0 ? 0 : static_cast<size_t>(n);
            for (size_t i = 0; i < count; ++i) parse_ascii_scalar(rs);
          } else {
            const double v = parse_ascii_scalar(rs);
            if (wanted) out.columns[p.name].push_back(v);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace gap::detail
