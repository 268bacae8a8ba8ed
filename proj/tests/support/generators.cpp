#include "generators.hpp"

#include <cmath>
#include <numbers>

namespace gen {

using texlayer::Vec2;
using texlayer::Vec3;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

namespace {

Vec3 random_unit(Rng& rng) {
  for (;;) {
    const Vec3 v(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    const double n = v.norm();
    if (n > 0.1 && n <= 1.0) return v / n;
  }
}

}  // namespace

texlayer::TriangleMesh random_scene(Rng& rng, int max_triangles) {
  texlayer::TriangleMesh::Data d;
  const int patches = uniform_int(rng, 2, 6);
  std::vector<std::array<Vec2, 2>> islands;
  for (int p = 0; p < patches; ++p) {
    const int n = uniform_int(rng, 1, 6);
    const int m = uniform_int(rng, 1, 6);
    if (static_cast<int>(d.triangles.size()) + 2 * n * m > max_triangles) break;
    const Vec3 normal = random_unit(rng);
    Vec3 e1 = normal.unitOrthogonal();
    Vec3 e2 = normal.cross(e1);
    const double size = uniform(rng, 0.4, 1.5);
    const Vec3 center(uniform(rng, -0.6, 0.6), uniform(rng, -0.6, 0.6), uniform(rng, -0.6, 0.6));
    const double bump = uniform(rng, 0.0, 0.15) * size;

    std::array<Vec2, 2> island;
    if (!islands.empty() && uniform(rng, 0, 1) < 0.2) {
      island = islands[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(islands.size()) - 1))];
    } else {
      const int cell = p % 16;
      const double x0 = (cell % 4) / 4.0 + 1.0 / 64.0;
      const double y0 = (cell / 4) / 4.0 + 1.0 / 64.0;
      island = {Vec2(x0, y0), Vec2(x0 + 3.0 / 16.0, y0 + 3.0 / 16.0)};
      islands.push_back(island);
    }

    const auto base = static_cast<std::uint32_t>(d.positions.size());
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= n; ++i) {
        const double a = static_cast<double>(i) / n - 0.5;
        const double b = static_cast<double>(j) / m - 0.5;
        const double h = (i == 0 || j == 0 || i == n || j == m) ? 0.0 : uniform(rng, -bump, bump);
        d.positions.push_back(center + size * (a * e1 + b * e2) + h * normal);
        d.uvs.emplace_back(island[0].x() + (island[1].x() - island[0].x()) * i / n,
                           island[0].y() + (island[1].y() - island[0].y()) * j / m);
      }
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < n; ++i) {
        const std::uint32_t v00 = base + static_cast<std::uint32_t>(j * (n + 1) + i);
        const std::uint32_t v10 = v00 + 1;
        const std::uint32_t v01 = v00 + static_cast<std::uint32_t>(n + 1);
        const std::uint32_t v11 = v01 + 1;
        d.triangles.push_back({v00, v10, v11});
        d.triangles.push_back({v00, v11, v01});
      }
  }
  return texlayer::TriangleMesh::build(std::move(d));
}

texlayer::Camera random_camera(Rng& rng) {
  const Vec3 eye = random_unit(rng) * uniform(rng, 2.5, 4.0);
  Vec3 up = random_unit(rng);
  if (std::abs(up.normalized().dot(eye.normalized())) > 0.9) up = eye.unitOrthogonal();
  const int w = uniform_int(rng, 48, 160);
  const int h = uniform_int(rng, 48, 160);
  if (uniform(rng, 0, 1) < 0.25) {
    return texlayer::Camera::look_at_orthographic(eye, Vec3::Zero(), up, uniform(rng, 0.8, 1.6), 0.5,
                                                  8.0, w, h);
  }
  return texlayer::Camera::look_at_perspective(eye, Vec3::Zero(), up, uniform(rng, 30, 70), 0.3,
                                               8.0, w, h);
}

texlayer::BoolGrid random_grid(Rng& rng, int width, int height, double density) {
  texlayer::BoolGrid g(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (uniform(rng, 0, 1) < density) g.set(x, y);
  return g;
}

texlayer::EditingTool random_tool(Rng& rng, const texlayer::Camera& camera) {
  const double x = uniform(rng, 0, camera.width);
  const double y = uniform(rng, 0, camera.height);
  const int r = uniform_int(rng, 1, 30);
  const double pick = uniform(rng, 0, 1);
  if (pick < 0.5) return texlayer::make_circle_tool(x, y, r, 1.0);
  if (pick < 0.75) return texlayer::make_square_tool(x, y, r, 1.0);
  texlayer::EditingTool tool;
  tool.x = x;
  tool.y = y;
  tool.shape = random_grid(rng, uniform_int(rng, 1, 40), uniform_int(rng, 1, 40), 0.6);
  tool.shape.set(0, 0);
  return tool;
}

texlayer::TriangleMesh random_islands(Rng& rng, int count) {
  texlayer::TriangleMesh::Data d;
  for (int k = 0; k < count; ++k) {
    const auto base = static_cast<std::uint32_t>(d.positions.size());
    const double u0 = uniform(rng, 0.0, 0.85), v0 = uniform(rng, 0.0, 0.85);
    const double u1 = u0 + uniform(rng, 0.02, 0.15), v1 = v0 + uniform(rng, 0.02, 0.15);
    if (uniform(rng, 0, 1) < 0.5) {
      for (const Vec2& uv : {Vec2(u0, v0), Vec2(u1, v0), Vec2(u1, v1), Vec2(u0, v1)}) {
        d.uvs.push_back(uv);
        d.positions.emplace_back(uv.x(), uv.y(), 0.0);
      }
      d.triangles.push_back({base, base + 1, base + 2});
      d.triangles.push_back({base, base + 2, base + 3});
    } else {
      for (const Vec2& uv : {Vec2(u0, v0), Vec2(u1, uniform(rng, v0, v1)), Vec2(uniform(rng, u0, u1), v1)}) {
        d.uvs.push_back(uv);
        d.positions.emplace_back(uv.x(), uv.y(), 0.0);
      }
      d.triangles.push_back({base, base + 1, base + 2});
    }
  }
  return texlayer::TriangleMesh::build(std::move(d));
}

}  // namespace gen
