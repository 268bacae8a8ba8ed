#pragma once

#include <cstdint>
#include <vector>

#include "texlayer/camera.hpp"
#include "texlayer/grid.hpp"
#include "texlayer/mesh.hpp"
#include "texlayer/raster.hpp"

namespace texlayer {

/// Nearest normalized depth per pixel; 1.0 marks background. Records the
/// camera and mesh it was rendered for so stale use can be detected.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<float> depth;
  std::uint64_t camera_key = 0;
  std::uint64_t mesh_id = 0;

  float at(int x, int y) const {
    return depth[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(x)];
  }
  bool matches(const TriangleMesh& mesh, const Camera& camera) const {
    return mesh_id == mesh.id() && camera_key == camera.fingerprint();
  }
};

/// Renders the mesh depth under the camera. Triangles are clipped against
/// the near and far planes in clip space; depth is interpolated linearly in
/// window space and compared with "less than".
DepthMap render_depth(const TriangleMesh& mesh, const Camera& camera,
                      const RasterConfig& config = {});

/// Texture coordinate to texel-space position on a width x height grid.
inline Vec2 uv_to_texel(const Vec2& uv, int width, int height) {
  return Vec2(uv.x() * width, uv.y() * height);
}

/// Texels of a width x height grid whose centers are covered by at least
/// one triangle placed at its texture coordinates.
BoolGrid uv_coverage(const TriangleMesh& mesh, int width, int height,
                     const RasterConfig& config = {});
inline BoolGrid uv_coverage(const TriangleMesh& mesh, int resolution) {
  return uv_coverage(mesh, resolution, resolution);
}

/// Texels covered by more than one triangle (overlapping UV islands).
/// Overlaps resolve last-writer-wins in triangle order during editing.
std::size_t uv_overlap_count(const TriangleMesh& mesh, int resolution);

}  // namespace texlayer
