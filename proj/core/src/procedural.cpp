#include "texlayer/procedural.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "texlayer/error.hpp"

namespace texlayer {

namespace {

void add_grid(TriangleMesh::Data& d, int nx, int ny, auto&& position, auto&& uv) {
  const auto base = static_cast<std::uint32_t>(d.positions.size());
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double a = static_cast<double>(i) / nx;
      const double b = static_cast<double>(j) / ny;
      d.positions.push_back(position(a, b));
      d.uvs.push_back(uv(a, b));
    }
  }
  const auto stride = static_cast<std::uint32_t>(nx + 1);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::uint32_t v00 = base + static_cast<std::uint32_t>(j) * stride + static_cast<std::uint32_t>(i);
      const std::uint32_t v10 = v00 + 1;
      const std::uint32_t v01 = v00 + stride;
      const std::uint32_t v11 = v01 + 1;
      d.triangles.push_back({v00, v10, v11});
      d.triangles.push_back({v00, v11, v01});
    }
  }
}

}  // namespace

TriangleMesh make_plane(const Vec3& origin, const Vec3& edge_u, const Vec3& edge_v, int segments,
                        const Vec2& uv_min, const Vec2& uv_max, LengthUnit units) {
  if (segments < 1) fail(ErrorCode::kInvalidArgument, "segments must be >= 1");
  TriangleMesh::Data d;
  d.units = units;
  add_grid(
      d, segments, segments, [&](double a, double b) { return Vec3(origin + a * edge_u + b * edge_v); },
      [&](double a, double b) {
        return Vec2(uv_min.x() + a * (uv_max.x() - uv_min.x()),
                    uv_min.y() + b * (uv_max.y() - uv_min.y()));
      });
  return TriangleMesh::build(std::move(d));
}

TriangleMesh make_flat_square(double side, double height, int segments, LengthUnit units) {
  return make_plane(Vec3(-0.5 * side, -0.5 * side, height), Vec3(side, 0, 0), Vec3(0, side, 0),
                    segments, Vec2(0, 0), Vec2(1, 1), units);
}

TriangleMesh make_coaxial_quads(double side, double z_front, double z_back, int segments) {
  const TriangleMesh meshes[2] = {
      make_plane(Vec3(-0.5 * side, -0.5 * side, z_front), Vec3(side, 0, 0), Vec3(0, side, 0),
                 segments, Vec2(0.0, 0.0), Vec2(kCoaxialFrontUMax, 1.0)),
      make_plane(Vec3(-0.5 * side, -0.5 * side, z_back), Vec3(side, 0, 0), Vec3(0, side, 0),
                 segments, Vec2(kCoaxialBackUMin, 0.0), Vec2(1.0, 1.0))};
  return merge_meshes(meshes);
}

TriangleMesh make_unit_cube() {
  struct Face {
    Vec3 origin, eu, ev;
  };
  // outward-facing: eu x ev points away from the cube
  const Face faces[6] = {
      {Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(1, 0, 0)},  // z = 0
      {Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0, 1, 0)},  // z = 1
      {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 0, 1)},  // y = 0
      {Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(1, 0, 0)},  // y = 1
      {Vec3(0, 0, 0), Vec3(0, 0, 1), Vec3(0, 1, 0)},  // x = 0
      {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)},  // x = 1
  };
  std::vector<TriangleMesh> parts;
  for (int f = 0; f < 6; ++f) {
    const double u0 = (f % 3) / 3.0 + 0.01;
    const double v0 = (f / 3) / 2.0 + 0.01;
    parts.push_back(make_plane(faces[f].origin, faces[f].eu, faces[f].ev, 1, Vec2(u0, v0),
                               Vec2(u0 + 1.0 / 3.0 - 0.02, v0 + 0.5 - 0.02)));
  }
  return merge_meshes(parts);
}

TriangleMesh make_terrain(const TerrainParams& p) {
  if (p.columns < 1 || p.rows < 1 || !(p.size_x > 0) || !(p.size_y > 0)) {
    fail(ErrorCode::kInvalidArgument, "terrain needs positive size and resolution");
  }
  struct Wave {
    double kx, ky, phase, amp;
  };
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Wave> waves;
  double total = 0.0;
  for (int octave = 0; octave < 5; ++octave) {
    const double freq = 3.0 * std::pow(2.0, octave);
    for (int k = 0; k < 2; ++k) {
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      const double amp = std::pow(0.5, octave);
      waves.push_back({freq * std::cos(angle), freq * std::sin(angle),
                       2.0 * std::numbers::pi * unit(rng), amp});
      total += amp;
    }
  }
  auto height = [&](double x, double y) {
    double h = 0.0;
    for (const Wave& w : waves) h += w.amp * std::sin(w.kx * x + w.ky * y + w.phase);
    return p.amplitude * h / total;
  };
  TriangleMesh::Data d;
  add_grid(
      d, p.columns, p.rows,
      [&](double a, double b) {
        const double x = a * p.size_x;
        const double y = b * p.size_y;
        return Vec3(x, y, height(x, y));
      },
      [](double a, double b) { return Vec2(a, b); });
  return TriangleMesh::build(std::move(d));
}

TriangleMesh make_uv_sphere(const SphereParams& p) {
  if (p.stacks < 2 || p.slices < 3 || !(p.radius > 0)) {
    fail(ErrorCode::kInvalidArgument, "sphere needs stacks >= 2, slices >= 3, radius > 0");
  }
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  // smooth bumps: a few random spherical waves
  struct Bump {
    Vec3 dir;
    double freq, phase;
  };
  std::vector<Bump> bumps;
  for (int k = 0; k < 6; ++k) {
    Vec3 dir(unit(rng), unit(rng), unit(rng));
    if (dir.norm() < 1e-6) dir = Vec3::UnitZ();
    bumps.push_back({dir.normalized(), 4.0 + 8.0 * std::abs(unit(rng)), 3.0 * unit(rng)});
  }
  TriangleMesh::Data d;
  const int cols = p.slices + 1;
  for (int i = 0; i <= p.stacks; ++i) {
    const double v = static_cast<double>(i) / p.stacks;
    const double theta = std::numbers::pi * (1.0 - v);  // v = 0 at the south pole
    for (int j = 0; j <= p.slices; ++j) {
      const double u = static_cast<double>(j) / p.slices;
      const double phi = 2.0 * std::numbers::pi * u;
      const Vec3 n(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                   std::cos(theta));
      double r = p.radius;
      if (p.bump != 0.0) {
        double s = 0.0;
        for (const Bump& b : bumps) s += std::sin(b.freq * b.dir.dot(n) + b.phase);
        r *= 1.0 + p.bump * s / static_cast<double>(bumps.size());
      }
      d.positions.push_back(r * n);
      d.uvs.emplace_back(u, v);
    }
  }
  for (int i = 0; i < p.stacks; ++i) {
    for (int j = 0; j < p.slices; ++j) {
      const auto v00 = static_cast<std::uint32_t>(i * cols + j);
      const auto v10 = v00 + 1;
      const auto v01 = v00 + static_cast<std::uint32_t>(cols);
      const auto v11 = v01 + 1;
      if (i != 0) d.triangles.push_back({v00, v10, v11});
      if (i != p.stacks - 1) d.triangles.push_back({v00, v11, v01});
    }
  }
  return TriangleMesh::build(std::move(d));
}

TriangleMesh merge_meshes(std::span<const TriangleMesh> meshes) {
  TriangleMesh::Data d;
  if (!meshes.empty()) d.units = meshes.front().units();
  for (const TriangleMesh& m : meshes) {
    const auto base = static_cast<std::uint32_t>(d.positions.size());
    d.positions.insert(d.positions.end(), m.positions().begin(), m.positions().end());
    d.normals.insert(d.normals.end(), m.normals().begin(), m.normals().end());
    d.uvs.insert(d.uvs.end(), m.uvs().begin(), m.uvs().end());
    for (const Triangle& t : m.triangles()) d.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
  }
  return TriangleMesh::build(std::move(d));
}

}  // namespace texlayer
