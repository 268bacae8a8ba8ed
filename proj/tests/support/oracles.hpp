#pragma once

// Brute-force reference implementations used to check the engine. They
// share no code with the library beyond its public data types.

#include <cstdint>
#include <optional>
#include <vector>

#include "texlayer/camera.hpp"
#include "texlayer/depth.hpp"
#include "texlayer/grid.hpp"
#include "texlayer/mesh.hpp"
#include "texlayer/octree.hpp"
#include "texlayer/tool.hpp"

namespace oracle {

using texlayer::BoolGrid;
using texlayer::Camera;
using texlayer::DepthMap;
using texlayer::EditingTool;
using texlayer::TriangleMesh;
using texlayer::Vec2;
using texlayer::Vec3;

/// Barycentric weights of texel center q in a texel-space triangle, or
/// nullopt when the center is outside under the tie-break: a center on an
/// edge belongs to the triangle whose interior lies toward +x from that
/// edge, or toward +y for horizontal edges.
std::optional<std::array<long double, 3>> cover(const Vec2& a, const Vec2& b, const Vec2& c,
                                               long double qx, long double qy);

/// Covered texel centers of the mesh at its texture coordinates.
BoolGrid coverage(const TriangleMesh& mesh, int width, int height);

/// Texels a stroke must write: some triangle covering the texel center maps
/// to a surface point that is in front of the camera, inside the viewport
/// and depth range, within bias of the depth map, and inside the tool
/// shape's pixel block.
std::vector<std::uint32_t> edited_texels(const TriangleMesh& mesh, const Camera& camera,
                                         const DepthMap& depth, const EditingTool& tool,
                                         int width, int height, double bias);

/// Uncovered texels with a covered texel within Chebyshev distance k.
BoolGrid outline(const BoolGrid& coverage, int k);

/// Outline texels within Chebyshev distance r of an edited texel.
std::vector<std::uint32_t> padded(const BoolGrid& outline, const std::vector<std::uint32_t>& edited,
                                  int r);

/// Nearest ray hit over every triangle (t in [0, 1]).
struct Hit {
  double t = 0.0;
  std::uint32_t triangle = 0;
  Vec3 point;
};
std::optional<Hit> raycast(const TriangleMesh& mesh, const texlayer::Ray& ray);

/// Cells at the given depth that a closed-box clip of each triangle leaves
/// non-empty, sorted.
std::vector<texlayer::CellCoord> crossed_cells(const TriangleMesh& mesh, const texlayer::Box3& root,
                                               int depth);

/// Polygon clipping test: does triangle abc meet the closed box?
bool triangle_meets_box(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& lo,
                        const Vec3& hi);

/// Cell containing a point at the given depth under root.
texlayer::CellCoord cell_of(const texlayer::Box3& root, int depth, const Vec3& p);

/// Window pixels whose centers fall inside the tool shape.
std::vector<std::array<int, 2>> tool_pixels(const Camera& camera, const EditingTool& tool);

}  // namespace oracle
