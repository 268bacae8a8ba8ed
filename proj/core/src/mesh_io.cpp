#include "texlayer/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string_view>
#include <tuple>
#include <vector>

#include "texlayer/error.hpp"

namespace texlayer {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view token, std::size_t line) {
  double v = 0.0;
  // from_chars rejects a leading '+'
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    fail(ErrorCode::kParseError,
         "line " + std::to_string(line) + ": bad number '" + std::string(token) + "'");
  }
  return v;
}

long long parse_int(std::string_view token, std::size_t line) {
  long long v = 0;
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    fail(ErrorCode::kParseError,
         "line " + std::to_string(line) + ": bad integer '" + std::string(token) + "'");
  }
  return v;
}

// Already-unit normals are kept untouched so save/load cycles are exact.
void normalize_loaded(Vec3& n) {
  const double len = n.norm();
  if (len > 0.0 && std::abs(len - 1.0) > 1e-12) n /= len;
}

// ---------------------------------------------------------------- OBJ

std::uint32_t resolve_obj_index(long long idx, std::size_t count, std::size_t line) {
  long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(count) + idx;
  if (idx == 0 || resolved < 0 || resolved >= static_cast<long long>(count)) {
    fail(ErrorCode::kParseError, "line " + std::to_string(line) + ": index out of range");
  }
  return static_cast<std::uint32_t>(resolved);
}

TriangleMesh parse_obj(std::string_view text, LengthUnit units) {
  std::vector<Vec3> positions;
  std::vector<VertexColor> position_colors;
  std::vector<Vec2> texcoords;
  std::vector<Vec3> normals;

  using Corner = std::tuple<std::uint32_t, std::uint32_t, std::int64_t>;  // v, vt, vn (-1 absent)
  std::map<Corner, std::uint32_t> corner_ids;
  std::vector<Corner> corners;
  std::vector<Triangle> triangles;
  bool any_corner_without_normal = false;
  bool any_color = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') {
      if (eol == text.size()) break;
      continue;
    }
    const auto tok = split_ws(line);
    const std::string_view kw = tok[0];
    if (kw == "v") {
      if (tok.size() != 4 && tok.size() != 5 && tok.size() != 7) {
        fail(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": malformed vertex");
      }
      positions.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no),
                             parse_double(tok[3], line_no));
      VertexColor c{0, 0, 0};
      if (tok.size() == 7) {
        any_color = true;
        for (int k = 0; k < 3; ++k) {
          const double f = std::clamp(parse_double(tok[4 + k], line_no), 0.0, 1.0);
          c[k] = static_cast<std::uint8_t>(std::lround(f * 255.0));
        }
      }
      position_colors.push_back(c);
    } else if (kw == "vt") {
      if (tok.size() < 3 || tok.size() > 4) {
        fail(ErrorCode::kParseError,
             "line " + std::to_string(line_no) + ": malformed texture coordinate");
      }
      texcoords.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no));
    } else if (kw == "vn") {
      if (tok.size() != 4) {
        fail(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": malformed normal");
      }
      normals.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no),
                           parse_double(tok[3], line_no));
    } else if (kw == "f") {
      if (tok.size() != 4) {
        fail(ErrorCode::kParseError,
             "line " + std::to_string(line_no) + ": only triangular faces are supported");
      }
      Triangle tri{};
      for (int k = 0; k < 3; ++k) {
        const std::string_view ref = tok[1 + k];
        const std::size_t s1 = ref.find('/');
        if (s1 == std::string_view::npos) {
          fail(ErrorCode::kMissingUVs,
               "line " + std::to_string(line_no) + ": face corner without texture coordinate");
        }
        const std::size_t s2 = ref.find('/', s1 + 1);
        const std::string_view v_tok = ref.substr(0, s1);
        const std::string_view vt_tok =
            ref.substr(s1 + 1, s2 == std::string_view::npos ? std::string_view::npos : s2 - s1 - 1);
        if (vt_tok.empty()) {
          fail(ErrorCode::kMissingUVs,
               "line " + std::to_string(line_no) + ": face corner without texture coordinate");
        }
        const std::uint32_t v = resolve_obj_index(parse_int(v_tok, line_no), positions.size(), line_no);
        const std::uint32_t vt =
            resolve_obj_index(parse_int(vt_tok, line_no), texcoords.size(), line_no);
        std::int64_t vn = -1;
        if (s2 != std::string_view::npos && s2 + 1 < ref.size()) {
          vn = resolve_obj_index(parse_int(ref.substr(s2 + 1), line_no), normals.size(), line_no);
        } else {
          any_corner_without_normal = true;
        }
        const Corner corner{v, vt, vn};
        auto [it, inserted] =
            corner_ids.try_emplace(corner, static_cast<std::uint32_t>(corners.size()));
        if (inserted) corners.push_back(corner);
        tri[k] = it->second;
      }
      triangles.push_back(tri);
    }
    // o, g, s, usemtl, mtllib and unknown statements carry nothing we need
    if (eol == text.size()) break;
  }

  if (texcoords.empty()) fail(ErrorCode::kMissingUVs, "OBJ declares no texture coordinates");
  if (triangles.empty()) fail(ErrorCode::kEmptyMesh, "OBJ contains no triangles");

  TriangleMesh::Data data;
  data.units = units;
  data.positions.reserve(corners.size());
  data.uvs.reserve(corners.size());
  for (const auto& [v, vt, vn] : corners) {
    data.positions.push_back(positions[v]);
    data.uvs.push_back(texcoords[vt]);
    if (!any_corner_without_normal) data.normals.push_back(normals[static_cast<std::size_t>(vn)]);
    if (any_color) data.colors.push_back(position_colors[v]);
  }
  for (Vec3& n : data.normals) normalize_loaded(n);
  data.triangles = std::move(triangles);
  return TriangleMesh::build(std::move(data));
}

// ---------------------------------------------------------------- PLY

enum class PlyType { kInt8, kUInt8, kInt16, kUInt16, kInt32, kUInt32, kFloat32, kFloat64 };

std::optional<PlyType> parse_ply_type(std::string_view s) {
  if (s == "char" || s == "int8") return PlyType::kInt8;
  if (s == "uchar" || s == "uint8") return PlyType::kUInt8;
  if (s == "short" || s == "int16") return PlyType::kInt16;
  if (s == "ushort" || s == "uint16") return PlyType::kUInt16;
  if (s == "int" || s == "int32") return PlyType::kInt32;
  if (s == "uint" || s == "uint32") return PlyType::kUInt32;
  if (s == "float" || s == "float32") return PlyType::kFloat32;
  if (s == "double" || s == "float64") return PlyType::kFloat64;
  return std::nullopt;
}

std::size_t ply_type_size(PlyType t) {
  switch (t) {
    case PlyType::kInt8:
    case PlyType::kUInt8: return 1;
    case PlyType::kInt16:
    case PlyType::kUInt16: return 2;
    case PlyType::kInt32:
    case PlyType::kUInt32:
    case PlyType::kFloat32: return 4;
    case PlyType::kFloat64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

enum class PlyEncoding { kAscii, kBinaryLE, kBinaryBE };

class PlyReader {
 public:
  PlyReader(std::span<const std::byte> data, std::size_t offset, PlyEncoding enc)
      : data_(data), pos_(offset), enc_(enc) {}

  double read(PlyType type) {
    if (enc_ == PlyEncoding::kAscii) return read_ascii();
    const std::size_t n = ply_type_size(type);
    if (pos_ + n > data_.size()) fail(ErrorCode::kParseError, "PLY body is truncated");
    unsigned char buf[8];
    std::memcpy(buf, data_.data() + pos_, n);
    pos_ += n;
    const bool swap = (enc_ == PlyEncoding::kBinaryBE) == (std::endian::native == std::endian::little);
    if (swap) std::reverse(buf, buf + n);
    switch (type) {
      case PlyType::kInt8: { std::int8_t v; std::memcpy(&v, buf, 1); return v; }
      case PlyType::kUInt8: { std::uint8_t v; std::memcpy(&v, buf, 1); return v; }
      case PlyType::kInt16: { std::int16_t v; std::memcpy(&v, buf, 2); return v; }
      case PlyType::kUInt16: { std::uint16_t v; std::memcpy(&v, buf, 2); return v; }
      case PlyType::kInt32: { std::int32_t v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::kUInt32: { std::uint32_t v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::kFloat32: { float v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::kFloat64: { double v; std::memcpy(&v, buf, 8); return v; }
    }
    return 0.0;
  }

 private:
  double read_ascii() {
    while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    const std::size_t begin = pos_;
    while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    if (begin == pos_) fail(ErrorCode::kParseError, "PLY body is truncated");
    const std::string_view tok(reinterpret_cast<const char*>(data_.data()) + begin, pos_ - begin);
    return parse_double(tok, 0);
  }

  std::span<const std::byte> data_;
  std::size_t pos_;
  PlyEncoding enc_;
};

TriangleMesh parse_ply(std::span<const std::byte> bytes, LengthUnit units) {
  const std::string_view all(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  const std::size_t header_end = all.find("end_header");
  if (all.substr(0, 3) != "ply" || header_end == std::string_view::npos) {
    fail(ErrorCode::kParseError, "not a PLY file");
  }
  std::size_t body = all.find('\n', header_end);
  if (body == std::string_view::npos) fail(ErrorCode::kParseError, "PLY header is truncated");
  ++body;

  PlyEncoding encoding = PlyEncoding::kAscii;
  std::vector<PlyElement> elements;
  std::size_t pos = 0;
  bool saw_format = false;
  while (pos < header_end) {
    const std::size_t eol = all.find('\n', pos);
    const auto tok = split_ws(all.substr(pos, eol - pos));
    pos = eol + 1;
    if (tok.empty()) continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) fail(ErrorCode::kParseError, "malformed PLY format line");
      if (tok[1] == "ascii") encoding = PlyEncoding::kAscii;
      else if (tok[1] == "binary_little_endian") encoding = PlyEncoding::kBinaryLE;
      else if (tok[1] == "binary_big_endian") encoding = PlyEncoding::kBinaryBE;
      else fail(ErrorCode::kParseError, "unknown PLY format");
      saw_format = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) fail(ErrorCode::kParseError, "malformed PLY element line");
      const long long count = parse_int(tok[2], 0);
      if (count < 0) fail(ErrorCode::kParseError, "negative PLY element count");
      elements.push_back({std::string(tok[1]), static_cast<std::size_t>(count), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) fail(ErrorCode::kParseError, "PLY property before element");
      PlyProperty prop;
      if (tok.size() == 5 && tok[1] == "list") {
        const auto ct = parse_ply_type(tok[2]);
        const auto it = parse_ply_type(tok[3]);
        if (!ct || !it) fail(ErrorCode::kParseError, "unknown PLY list type");
        prop.is_list = true;
        prop.count_type = *ct;
        prop.type = *it;
        prop.name = tok[4];
      } else if (tok.size() == 3) {
        const auto t = parse_ply_type(tok[1]);
        if (!t) fail(ErrorCode::kParseError, "unknown PLY property type");
        prop.type = *t;
        prop.name = tok[2];
      } else {
        fail(ErrorCode::kParseError, "malformed PLY property line");
      }
      elements.back().properties.push_back(prop);
    }
  }
  if (!saw_format) fail(ErrorCode::kParseError, "PLY header lacks a format line");

  TriangleMesh::Data data;
  data.units = units;
  PlyReader reader(bytes, body, encoding);
  bool has_uv = false;
  bool has_normals = false;
  bool has_colors = false;
  for (const PlyElement& el : elements) {
    if (el.name == "vertex") {
      auto find = [&](std::initializer_list<std::string_view> names) -> int {
        for (std::size_t i = 0; i < el.properties.size(); ++i) {
          for (std::string_view n : names) {
            if (el.properties[i].name == n && !el.properties[i].is_list) return static_cast<int>(i);
          }
        }
        return -1;
      };
      const int ix = find({"x"}), iy = find({"y"}), iz = find({"z"});
      if (ix < 0 || iy < 0 || iz < 0) fail(ErrorCode::kParseError, "PLY vertex lacks x, y, z");
      int iu = find({"s", "u", "texture_u", "texture_s"});
      int iv = find({"t", "v", "texture_v", "texture_t"});
      const int inx = find({"nx"}), iny = find({"ny"}), inz = find({"nz"});
      const int ir = find({"red"}), ig = find({"green"}), ib = find({"blue"});
      has_uv = iu >= 0 && iv >= 0;
      has_normals = inx >= 0 && iny >= 0 && inz >= 0;
      has_colors = ir >= 0 && ig >= 0 && ib >= 0;
      std::vector<double> values(el.properties.size());
      for (std::size_t n = 0; n < el.count; ++n) {
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
          const PlyProperty& prop = el.properties[p];
          if (prop.is_list) {
            const auto cnt = static_cast<std::size_t>(reader.read(prop.count_type));
            for (std::size_t k = 0; k < cnt; ++k) reader.read(prop.type);
            values[p] = 0.0;
          } else {
            values[p] = reader.read(prop.type);
          }
        }
        data.positions.emplace_back(values[ix], values[iy], values[iz]);
        if (has_uv) data.uvs.emplace_back(values[iu], values[iv]);
        if (has_normals) {
          Vec3 nrm(values[inx], values[iny], values[inz]);
          normalize_loaded(nrm);
          data.normals.push_back(nrm);
        }
        if (has_colors) {
          data.colors.push_back({static_cast<std::uint8_t>(values[ir]),
                                 static_cast<std::uint8_t>(values[ig]),
                                 static_cast<std::uint8_t>(values[ib])});
        }
      }
    } else if (el.name == "face") {
      int list = -1;
      for (std::size_t i = 0; i < el.properties.size(); ++i) {
        const auto& p = el.properties[i];
        if (p.is_list && (p.name == "vertex_indices" || p.name == "vertex_index")) {
          list = static_cast<int>(i);
        }
      }
      if (list < 0) fail(ErrorCode::kParseError, "PLY face lacks vertex_indices");
      for (std::size_t n = 0; n < el.count; ++n) {
        for (std::size_t p = 0; p < el.properties.size(); ++p) {
          const PlyProperty& prop = el.properties[p];
          if (!prop.is_list) {
            reader.read(prop.type);
            continue;
          }
          const auto cnt = static_cast<std::size_t>(reader.read(prop.count_type));
          if (static_cast<int>(p) == list && cnt != 3) {
            fail(ErrorCode::kParseError, "only triangular PLY faces are supported");
          }
          Triangle tri{};
          for (std::size_t k = 0; k < cnt; ++k) {
            const double idx = reader.read(prop.type);
            if (static_cast<int>(p) == list) {
              if (idx < 0) fail(ErrorCode::kParseError, "negative PLY vertex index");
              tri[k] = static_cast<std::uint32_t>(idx);
            }
          }
          if (static_cast<int>(p) == list) data.triangles.push_back(tri);
        }
      }
    } else {
      for (std::size_t n = 0; n < el.count; ++n) {
        for (const PlyProperty& prop : el.properties) {
          if (prop.is_list) {
            const auto cnt = static_cast<std::size_t>(reader.read(prop.count_type));
            for (std::size_t k = 0; k < cnt; ++k) reader.read(prop.type);
          } else {
            reader.read(prop.type);
          }
        }
      }
    }
  }
  if (!has_uv) fail(ErrorCode::kMissingUVs, "PLY vertices carry no texture coordinates");
  if (data.triangles.empty()) fail(ErrorCode::kEmptyMesh, "PLY contains no triangles");
  return TriangleMesh::build(std::move(data));
}

template <class T>
void append_le(std::string& out, T v) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.append(reinterpret_cast<const char*>(buf), sizeof(T));
}

}  // namespace

TriangleMesh load_mesh(std::span<const std::byte> source, MeshFormat format, LengthUnit units) {
  if (format == MeshFormat::kObj) {
    return parse_obj({reinterpret_cast<const char*>(source.data()), source.size()}, units);
  }
  return parse_ply(source, units);
}

TriangleMesh load_mesh(const std::string& text, MeshFormat format, LengthUnit units) {
  return load_mesh(std::as_bytes(std::span(text.data(), text.size())), format, units);
}

TriangleMesh load_mesh_file(const std::filesystem::path& path, LengthUnit units) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  MeshFormat format;
  if (ext == ".obj") {
    format = MeshFormat::kObj;
  } else if (ext == ".ply") {
    format = MeshFormat::kPly;
  } else {
    fail(ErrorCode::kParseError, "unknown mesh extension '" + ext + "'");
  }
  return load_mesh(ss.str(), format, units);
}

std::string save_mesh_ply(const TriangleMesh& mesh) {
  const bool colors = !mesh.colors().empty();
  std::string out;
  out += "ply\nformat binary_little_endian 1.0\n";
  out += "comment units " + std::string(length_unit_name(mesh.units())) + "\n";
  out += "element vertex " + std::to_string(mesh.vertex_count()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  out += "property double nx\nproperty double ny\nproperty double nz\n";
  out += "property double s\nproperty double t\n";
  if (colors) out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "element face " + std::to_string(mesh.triangle_count()) + "\n";
  out += "property list uchar uint vertex_indices\nend_header\n";
  const auto p = mesh.positions();
  const auto n = mesh.normals();
  const auto uv = mesh.uvs();
  const auto c = mesh.colors();
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    for (int k = 0; k < 3; ++k) append_le(out, p[i][k]);
    for (int k = 0; k < 3; ++k) append_le(out, n[i][k]);
    append_le(out, uv[i].x());
    append_le(out, uv[i].y());
    if (colors) out.append(reinterpret_cast<const char*>(c[i].data()), 3);
  }
  for (const Triangle& t : mesh.triangles()) {
    append_le(out, std::uint8_t{3});
    for (std::uint32_t v : t) append_le(out, v);
  }
  return out;
}

void save_mesh_ply_file(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  const std::string bytes = save_mesh_ply(mesh);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace texlayer
