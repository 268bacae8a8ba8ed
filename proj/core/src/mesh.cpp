#include "texlayer/mesh.hpp"

#include <atomic>
#include <string>

#include "texlayer/error.hpp"

namespace texlayer {

namespace {

std::atomic<std::uint64_t> next_mesh_id{1};

}  // namespace

std::string_view length_unit_name(LengthUnit unit) {
  switch (unit) {
    case LengthUnit::kMeters: return "meters";
    case LengthUnit::kCentimeters: return "centimeters";
    case LengthUnit::kMillimeters: return "millimeters";
  }
  return "meters";
}

std::optional<LengthUnit> parse_length_unit(std::string_view name) {
  if (name == "meters" || name == "m") return LengthUnit::kMeters;
  if (name == "centimeters" || name == "cm") return LengthUnit::kCentimeters;
  if (name == "millimeters" || name == "mm") return LengthUnit::kMillimeters;
  return std::nullopt;
}

double square_cm_per_unit(LengthUnit unit) {
  switch (unit) {
    case LengthUnit::kMeters: return 1e4;
    case LengthUnit::kCentimeters: return 1.0;
    case LengthUnit::kMillimeters: return 1e-2;
  }
  return 1e4;
}

std::vector<Vec3> compute_vertex_normals(std::span<const Vec3> positions,
                                         std::span<const Triangle> triangles) {
  std::vector<Vec3> normals(positions.size(), Vec3::Zero());
  for (const Triangle& t : triangles) {
    // the unnormalized cross product is twice the area times the unit normal
    const Vec3 n = (positions[t[1]] - positions[t[0]]).cross(positions[t[2]] - positions[t[0]]);
    for (std::uint32_t v : t) normals[v] += n;
  }
  for (Vec3& n : normals) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
  return normals;
}

TriangleMesh TriangleMesh::build(Data data) {
  const std::size_t n = data.positions.size();
  if (data.uvs.empty() && n > 0) {
    fail(ErrorCode::kMissingUVs, "mesh has no texture coordinates");
  }
  if (data.uvs.size() != n) {
    fail(ErrorCode::kParseError, "texture coordinate count differs from vertex count");
  }
  if (!data.normals.empty() && data.normals.size() != n) {
    fail(ErrorCode::kParseError, "normal count differs from vertex count");
  }
  if (!data.colors.empty() && data.colors.size() != n) {
    fail(ErrorCode::kParseError, "color count differs from vertex count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& uv = data.uvs[i];
    if (!(uv.x() >= 0.0 && uv.x() <= 1.0 && uv.y() >= 0.0 && uv.y() <= 1.0)) {
      fail(ErrorCode::kParseError,
           "texture coordinate of vertex " + std::to_string(i) + " lies outside [0,1]");
    }
    if (!data.positions[i].allFinite()) {
      fail(ErrorCode::kParseError, "non-finite vertex position " + std::to_string(i));
    }
  }
  for (std::size_t t = 0; t < data.triangles.size(); ++t) {
    for (std::uint32_t v : data.triangles[t]) {
      if (v >= n) {
        fail(ErrorCode::kParseError,
             "triangle " + std::to_string(t) + " references missing vertex " + std::to_string(v));
      }
    }
  }

  TriangleMesh mesh;
  if (data.normals.empty()) {
    data.normals = compute_vertex_normals(data.positions, data.triangles);
    mesh.normals_recomputed_ = true;
  }
  for (const Vec3& p : data.positions) mesh.bounds_.extend(p);
  mesh.data_ = std::move(data);
  mesh.id_ = next_mesh_id.fetch_add(1);
  return mesh;
}

TriangleMesh TriangleMesh::with_units(LengthUnit units) const {
  TriangleMesh copy = *this;
  copy.data_.units = units;
  return copy;
}

double mesh_surface_area(const TriangleMesh& mesh) {
  const auto p = mesh.positions();
  double area = 0.0;
  for (const Triangle& t : mesh.triangles()) {
    area += 0.5 * (p[t[1]] - p[t[0]]).cross(p[t[2]] - p[t[0]]).norm();
  }
  return area;
}

}  // namespace texlayer
