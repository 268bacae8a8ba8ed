#include "texlayer/depth.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace texlayer {

namespace {

struct ClipVertex {
  Vec4 clip;
};

struct WindowTriangle {
  std::array<Vec2, 3> xy;
  std::array<double, 3> depth;
};

// Sutherland-Hodgman against one plane given by a signed distance function.
// Intersections are always computed from the inside endpoint, so an edge
// shared by two triangles yields the same clipped point in both.
template <class Distance>
std::size_t clip_polygon(const std::array<Vec4, 8>& in, std::size_t n, std::array<Vec4, 8>& out,
                         Distance dist) {
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec4& cur = in[i];
    const Vec4& nxt = in[(i + 1) % n];
    const double dc = dist(cur);
    const double dn = dist(nxt);
    const bool cin = dc >= 0.0;
    const bool nin = dn >= 0.0;
    if (cin) out[m++] = cur;
    if (cin != nin) {
      const Vec4& inside = cin ? cur : nxt;
      const Vec4& outside = cin ? nxt : cur;
      const double di = cin ? dc : dn;
      const double dout = cin ? dn : dc;
      const double t = di / (di - dout);
      out[m++] = inside + t * (outside - inside);
    }
  }
  return m;
}

std::vector<WindowTriangle> clip_and_project(const TriangleMesh& mesh, const Camera& camera) {
  const Mat4 vp = camera.view_projection();
  std::vector<Vec4> clip(mesh.vertex_count());
  const auto positions = mesh.positions();
  for (std::size_t i = 0; i < clip.size(); ++i) clip[i] = vp * positions[i].homogeneous();

  constexpr double kMinW = 1e-12;
  std::vector<WindowTriangle> out;
  out.reserve(mesh.triangle_count());
  for (const Triangle& t : mesh.triangles()) {
    std::array<Vec4, 8> a{clip[t[0]], clip[t[1]], clip[t[2]]};
    std::array<Vec4, 8> b;
    std::size_t n = 3;
    n = clip_polygon(a, n, b, [](const Vec4& v) { return v.z() + v.w(); });
    if (n < 3) continue;
    n = clip_polygon(b, n, a, [](const Vec4& v) { return v.w() - v.z(); });
    if (n < 3) continue;
    n = clip_polygon(a, n, b, [](const Vec4& v) { return v.w() - kMinW; });
    if (n < 3) continue;

    std::array<Vec2, 8> xy;
    std::array<double, 8> z;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec4& c = b[i];
      xy[i] = Vec2((c.x() / c.w() + 1.0) * 0.5 * camera.width,
                   (c.y() / c.w() + 1.0) * 0.5 * camera.height);
      z[i] = (c.z() / c.w() + 1.0) * 0.5;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      out.push_back({{xy[0], xy[i], xy[i + 1]}, {z[0], z[i], z[i + 1]}});
    }
  }
  return out;
}

}  // namespace

DepthMap render_depth(const TriangleMesh& mesh, const Camera& camera, const RasterConfig& config) {
  camera.validate();
  DepthMap map;
  map.width = camera.width;
  map.height = camera.height;
  map.camera_key = camera.fingerprint();
  map.mesh_id = mesh.id();

  const std::vector<WindowTriangle> tris = clip_and_project(mesh, camera);
  std::vector<double> depth(static_cast<std::size_t>(map.width) * map.height, 1.0);
  for_each_row_band(map.height, config, [&](int row_begin, int row_end) {
    for (const WindowTriangle& t : tris) {
      scan_triangle(t.xy[0], t.xy[1], t.xy[2], map.width, row_begin, row_end,
                    [&](int x, int y, double b0, double b1, double b2) {
                      const double z = b0 * t.depth[0] + b1 * t.depth[1] + b2 * t.depth[2];
                      double& dst = depth[static_cast<std::size_t>(y) * map.width + x];
                      if (z < dst) dst = std::clamp(z, 0.0, 1.0);
                    });
    }
  });
  map.depth.assign(depth.begin(), depth.end());
  return map;
}

BoolGrid uv_coverage(const TriangleMesh& mesh, int width, int height, const RasterConfig& config) {
  BoolGrid grid(std::max(width, 1), std::max(height, 1));
  const auto uv = mesh.uvs();
  for_each_row_band(grid.height, config, [&](int row_begin, int row_end) {
    for (const Triangle& t : mesh.triangles()) {
      scan_triangle(uv_to_texel(uv[t[0]], grid.width, grid.height),
                    uv_to_texel(uv[t[1]], grid.width, grid.height),
                    uv_to_texel(uv[t[2]], grid.width, grid.height), grid.width, row_begin, row_end,
                    [&](int x, int y, double, double, double) { grid.set(x, y); });
    }
  });
  return grid;
}

std::size_t uv_overlap_count(const TriangleMesh& mesh, int resolution) {
  std::vector<std::uint16_t> hits(static_cast<std::size_t>(resolution) * resolution, 0);
  const auto uv = mesh.uvs();
  for (const Triangle& t : mesh.triangles()) {
    scan_triangle(uv_to_texel(uv[t[0]], resolution, resolution),
                  uv_to_texel(uv[t[1]], resolution, resolution),
                  uv_to_texel(uv[t[2]], resolution, resolution), resolution, 0, resolution,
                  [&](int x, int y, double, double, double) {
                    auto& h = hits[static_cast<std::size_t>(y) * resolution + x];
                    if (h < 2) ++h;
                  });
  }
  return static_cast<std::size_t>(std::count(hits.begin(), hits.end(), std::uint16_t{2}));
}

}  // namespace texlayer
