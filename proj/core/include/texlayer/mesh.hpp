#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "texlayer/math.hpp"

namespace texlayer {

enum class LengthUnit { kMeters, kCentimeters, kMillimeters };

std::string_view length_unit_name(LengthUnit unit);
std::optional<LengthUnit> parse_length_unit(std::string_view name);
/// Square centimetres in one squared model unit.
double square_cm_per_unit(LengthUnit unit);

using Triangle = std::array<std::uint32_t, 3>;
using VertexColor = std::array<std::uint8_t, 3>;

/// Indexed triangle mesh with per-vertex texture coordinates. Immutable once
/// built; share it through std::shared_ptr<const TriangleMesh>.
class TriangleMesh {
 public:
  struct Data {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;  // empty: recomputed, area weighted
    std::vector<Vec2> uvs;
    std::vector<Triangle> triangles;
    std::vector<VertexColor> colors;  // optional
    LengthUnit units = LengthUnit::kMeters;
  };

  /// Validates and freezes. Throws ParseError on dangling indices,
  /// mismatched attribute counts or uv outside [0,1]; MissingUVs when uvs
  /// are absent. An empty triangle list is accepted here; loaders reject it.
  static TriangleMesh build(Data data);

  TriangleMesh() = default;

  std::span<const Vec3> positions() const { return data_.positions; }
  std::span<const Vec3> normals() const { return data_.normals; }
  std::span<const Vec2> uvs() const { return data_.uvs; }
  std::span<const Triangle> triangles() const { return data_.triangles; }
  std::span<const VertexColor> colors() const { return data_.colors; }
  LengthUnit units() const { return data_.units; }
  const Box3& bounds() const { return bounds_; }
  std::size_t vertex_count() const { return data_.positions.size(); }
  std::size_t triangle_count() const { return data_.triangles.size(); }
  bool normals_recomputed() const { return normals_recomputed_; }

  /// Process-unique identity, used to detect stale depth maps.
  std::uint64_t id() const { return id_; }

  /// Same geometry, different declared units.
  TriangleMesh with_units(LengthUnit units) const;

 private:
  Data data_;
  Box3 bounds_;
  bool normals_recomputed_ = false;
  std::uint64_t id_ = 0;
};

/// Area-weighted vertex normals (unit length; zero for isolated vertices).
std::vector<Vec3> compute_vertex_normals(std::span<const Vec3> positions,
                                         std::span<const Triangle> triangles);

/// Sum of triangle areas in squared model units.
double mesh_surface_area(const TriangleMesh& mesh);

}  // namespace texlayer
