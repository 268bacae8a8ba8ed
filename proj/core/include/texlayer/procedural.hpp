#pragma once

#include <cstdint>
#include <span>

#include "texlayer/mesh.hpp"

namespace texlayer {

/// Flat grid of segments x segments quads spanning origin + a * edge_u +
/// b * edge_v for a, b in [0, 1], with texture coordinates mapped linearly
/// onto [uv_min, uv_max]. Triangles wind counter-clockwise seen from
/// edge_u x edge_v.
TriangleMesh make_plane(const Vec3& origin, const Vec3& edge_u, const Vec3& edge_v,
                        int segments = 1, const Vec2& uv_min = Vec2(0.0, 0.0),
                        const Vec2& uv_max = Vec2(1.0, 1.0),
                        LengthUnit units = LengthUnit::kMeters);

/// Axis-aligned square of the given side in the plane z = height, centered
/// on the z axis, covering the whole texture domain.
TriangleMesh make_flat_square(double side = 1.0, double height = 0.0, int segments = 1,
                              LengthUnit units = LengthUnit::kMeters);

/// Two parallel squares on the z axis, the front one at z_front facing +z
/// and a second one at z_back; each occupies its own half of the texture
/// domain (front: u < 0.5, back: u > 0.5) with a texel gap between them.
TriangleMesh make_coaxial_quads(double side = 2.0, double z_front = 0.0, double z_back = -1.0,
                                int segments = 1);
/// Texture half holding the front quad of make_coaxial_quads.
inline constexpr double kCoaxialFrontUMax = 0.49;
inline constexpr double kCoaxialBackUMin = 0.51;

/// Surface of the cube [0, 1]^3; every face is its own texture island.
TriangleMesh make_unit_cube();

struct TerrainParams {
  int columns = 256;        // quads along x
  int rows = 128;           // quads along y
  double size_x = 1.0;      // extent in metres
  double size_y = 0.5;
  double amplitude = 0.02;  // peak height variation
  std::uint64_t seed = 7;
};

/// Height field z = f(x, y) over [0, size_x] x [0, size_y] made of seeded
/// sinusoid octaves; texture coordinates are (x / size_x, y / size_y).
TriangleMesh make_terrain(const TerrainParams& params = {});

struct SphereParams {
  int stacks = 32;
  int slices = 64;
  double radius = 1.0;
  double bump = 0.0;  // relative radial noise amplitude
  std::uint64_t seed = 11;
};

/// Latitude/longitude sphere with a texture seam along longitude 0.
/// Triangle count is 2 * slices * (stacks - 1).
TriangleMesh make_uv_sphere(const SphereParams& params = {});

/// Concatenates meshes (same units as the first).
TriangleMesh merge_meshes(std::span<const TriangleMesh> meshes);

}  // namespace texlayer
