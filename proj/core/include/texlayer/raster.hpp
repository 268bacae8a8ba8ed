#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

#include "texlayer/math.hpp"
#include "texlayer/texture.hpp"

namespace texlayer {

// Fill rules shared by every backend:
//  * a texel (x, y) is sampled at its center (x + 0.5, y + 0.5);
//  * a center exactly on an edge belongs to the triangle only when that edge
//    is a top or left edge in raster order (rows ascending);
//  * attributes are interpolated perspective-correctly with the vertex w;
//  * depth comparisons are "less than" with a caller-supplied bias.
// Edge functions are evaluated per texel with the edge endpoints in a
// canonical order, so two triangles sharing an edge compute bit-identical
// (negated) values and never both cover, nor both miss, a center on it.

enum class RasterBackend {
  kReference,  // single-threaded, the semantic reference
  kParallel,   // row bands on worker threads; must match the reference
};

struct RasterConfig {
  RasterBackend backend = RasterBackend::kReference;
  unsigned threads = 0;  // 0 = hardware concurrency (parallel backend only)
};

namespace raster_detail {

inline double edge_function(const Vec2& u, const Vec2& v, double qx, double qy) {
  const bool swap = v.x() < u.x() || (v.x() == u.x() && v.y() < u.y());
  const Vec2& a = swap ? v : u;
  const Vec2& b = swap ? u : v;
  const double e = (b.x() - a.x()) * (qy - a.y()) - (b.y() - a.y()) * (qx - a.x());
  return swap ? -e : e;
}

/// True when the directed edge u->v of a counter-clockwise triangle owns
/// centers lying exactly on it.
inline bool owns_boundary(const Vec2& u, const Vec2& v) {
  const double dx = v.x() - u.x();
  const double dy = v.y() - u.y();
  return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

}  // namespace raster_detail

/// Visits every texel center of a width x height target, restricted to rows
/// [row_begin, row_end), covered by triangle (p0, p1, p2) in texel units.
/// visit(x, y, b0, b1, b2) receives linear barycentric weights of p0..p2.
template <class Visit>
void scan_triangle(const Vec2& p0, const Vec2& p1, const Vec2& p2, int width, int row_begin,
                   int row_end, Visit&& visit) {
  using raster_detail::edge_function;
  using raster_detail::owns_boundary;

  const double area = edge_function(p0, p1, p2.x(), p2.y());
  if (!(std::abs(area) > 0.0) || !std::isfinite(area)) return;

  // Orient counter-clockwise; order[k] maps oriented vertex k to input index.
  const bool flip = area < 0.0;
  const Vec2& a = p0;
  const Vec2& b = flip ? p2 : p1;
  const Vec2& c = flip ? p1 : p2;
  const double inv_area = 1.0 / std::abs(area);

  const double min_x = std::min({a.x(), b.x(), c.x()});
  const double max_x = std::max({a.x(), b.x(), c.x()});
  const double min_y = std::min({a.y(), b.y(), c.y()});
  const double max_y = std::max({a.y(), b.y(), c.y()});

  const int x0 = static_cast<int>(std::max(0.0, std::ceil(min_x - 0.5)));
  const int x1 = static_cast<int>(std::min(static_cast<double>(width - 1), std::floor(max_x - 0.5)));
  const int y0 = static_cast<int>(std::max(static_cast<double>(row_begin), std::ceil(min_y - 0.5)));
  const int y1 =
      static_cast<int>(std::min(static_cast<double>(row_end - 1), std::floor(max_y - 0.5)));
  if (x0 > x1 || y0 > y1) return;

  const bool own_ab = owns_boundary(a, b);
  const bool own_bc = owns_boundary(b, c);
  const bool own_ca = owns_boundary(c, a);

  for (int y = y0; y <= y1; ++y) {
    const double qy = y + 0.5;
    for (int x = x0; x <= x1; ++x) {
      const double qx = x + 0.5;
      const double e_bc = edge_function(b, c, qx, qy);
      if (e_bc < 0.0 || (e_bc == 0.0 && !own_bc)) continue;
      const double e_ca = edge_function(c, a, qx, qy);
      if (e_ca < 0.0 || (e_ca == 0.0 && !own_ca)) continue;
      const double e_ab = edge_function(a, b, qx, qy);
      if (e_ab < 0.0 || (e_ab == 0.0 && !own_ab)) continue;
      const double wa = e_bc * inv_area;
      const double wb = e_ca * inv_area;
      const double wc = e_ab * inv_area;
      if (flip) {
        visit(x, y, wa, wc, wb);
      } else {
        visit(x, y, wa, wb, wc);
      }
    }
  }
}

/// Runs band(row_begin, row_end) over [0, height) according to the backend.
/// Bands are disjoint, so per-texel results do not depend on the split.
void for_each_row_band(int height, const RasterConfig& config,
                       const std::function<void(int, int)>& band);

/// Perspective-correct weights from linear screen weights and vertex w.
inline std::array<double, 3> perspective_weights(double b0, double b1, double b2, double w0,
                                                 double w1, double w2) {
  const double q0 = b0 / w0;
  const double q1 = b1 / w1;
  const double q2 = b2 / w2;
  const double inv = 1.0 / (q0 + q1 + q2);
  return {q0 * inv, q1 * inv, q2 * inv};
}

// Generic entry point: per-fragment rule over pooled target planes.

inline constexpr std::size_t kMaxRasterAttributes = 8;
inline constexpr std::size_t kMaxRasterTargets = 4;

struct RasterVertex {
  Vec2 position{0.0, 0.0};  // texel units
  double w = 1.0;
  std::array<double, kMaxRasterAttributes> attributes{};
};

using RasterTriangle = std::array<RasterVertex, 3>;

struct Fragment {
  int x = 0;
  int y = 0;
  std::size_t triangle = 0;
  std::array<double, kMaxRasterAttributes> attributes{};
};

struct FragmentOutput {
  bool keep = false;
  std::array<double, kMaxRasterTargets> values{};
};

using FragmentRule = std::function<FragmentOutput(const Fragment&)>;

/// Offers every covered texel to rule; kept fragments write values[i] into
/// targets[i] via TexturePlane::set_value. Triangles are applied in
/// submission order, so the last one wins on overlap. Returns the number of
/// distinct texels written.
std::size_t rasterize(std::span<const RasterTriangle> triangles,
                      std::span<TexturePlane* const> targets, const FragmentRule& rule,
                      const RasterConfig& config = {});

}  // namespace texlayer
