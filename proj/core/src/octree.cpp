#include "texlayer/octree.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>

#include "texlayer/error.hpp"

namespace texlayer {

double SurfaceOctree::cell_size(int level) const {
  return root_.extent().x() / std::ldexp(1.0, level);
}

Box3 SurfaceOctree::cell_box(int level, const CellCoord& cell) const {
  const double size = cell_size(level);
  Box3 b;
  for (int k = 0; k < 3; ++k) {
    b.min[k] = root_.min[k] + size * cell[static_cast<std::size_t>(k)];
    b.max[k] = root_.min[k] + size * (cell[static_cast<std::size_t>(k)] + 1.0);
  }
  return b;
}

std::span<const std::uint32_t> SurfaceOctree::leaf_triangles(std::size_t leaf) const {
  const std::uint32_t begin = leaf_offsets_[leaf];
  const std::uint32_t end = leaf_offsets_[leaf + 1];
  return std::span<const std::uint32_t>(leaf_triangles_).subspan(begin, end - begin);
}

std::size_t SurfaceOctree::level_size(int level) const {
  if (level == depth_) return leaf_count();
  return levels_[static_cast<std::size_t>(level)].first_child.size();
}

std::optional<std::uint32_t> SurfaceOctree::find_leaf(const CellCoord& cell) const {
  if (leaf_count() == 0) return std::nullopt;
  const std::uint32_t limit = std::uint32_t{1} << depth_;
  if (cell[0] >= limit || cell[1] >= limit || cell[2] >= limit) return std::nullopt;
  std::uint32_t node = 0;
  for (int level = 0; level < depth_; ++level) {
    const int shift = depth_ - level - 1;
    const int oct = static_cast<int>(((cell[0] >> shift) & 1u) | (((cell[1] >> shift) & 1u) << 1) |
                                     (((cell[2] >> shift) & 1u) << 2));
    const std::uint8_t mask = child_mask(level, node);
    if ((mask & (1u << oct)) == 0) return std::nullopt;
    const std::uint8_t below = static_cast<std::uint8_t>(mask & ((1u << oct) - 1u));
    node = first_child(level, node) + static_cast<std::uint32_t>(std::popcount(below));
  }
  return node;
}

Box3 cubify(const Box3& box) {
  if (box.empty()) fail(ErrorCode::kInvalidArgument, "cannot cubify an empty box");
  const double side = std::max(box.extent().maxCoeff(), std::numeric_limits<double>::min());
  const Vec3 half = Vec3::Constant(0.5 * side);
  Box3 cube;
  cube.min = box.center() - half;
  cube.max = box.center() + half;
  return cube;
}

bool triangle_box_overlap(const Vec3& center, const Vec3& half, const Vec3& a, const Vec3& b,
                          const Vec3& c) {
  const Vec3 v0 = a - center;
  const Vec3 v1 = b - center;
  const Vec3 v2 = c - center;
  // box face normals
  for (int k = 0; k < 3; ++k) {
    const double lo = std::min({v0[k], v1[k], v2[k]});
    const double hi = std::max({v0[k], v1[k], v2[k]});
    if (lo > half[k] || hi < -half[k]) return false;
  }
  const Vec3 e0 = v1 - v0;
  const Vec3 e1 = v2 - v1;
  const Vec3 e2 = v0 - v2;
  // edge cross products
  const Vec3 edges[3] = {e0, e1, e2};
  for (const Vec3& e : edges) {
    for (int k = 0; k < 3; ++k) {
      Vec3 axis = Vec3::Zero();
      axis[(k + 1) % 3] = -e[(k + 2) % 3];
      axis[(k + 2) % 3] = e[(k + 1) % 3];
      const double p0 = axis.dot(v0);
      const double p1 = axis.dot(v1);
      const double p2 = axis.dot(v2);
      const double r = half.x() * std::abs(axis.x()) + half.y() * std::abs(axis.y()) +
                       half.z() * std::abs(axis.z());
      if (std::min({p0, p1, p2}) > r || std::max({p0, p1, p2}) < -r) return false;
    }
  }
  // triangle plane
  const Vec3 n = e0.cross(e1);
  const double d = n.dot(v0);
  const double r = half.x() * std::abs(n.x()) + half.y() * std::abs(n.y()) +
                   half.z() * std::abs(n.z());
  return !(d > r || d < -r);
}

namespace {

struct BuildLevel {
  std::vector<std::uint32_t> offsets;  // node -> first entry, size nodes + 1
  std::vector<std::uint32_t> entries;  // triangle ids
  std::vector<CellCoord> cells;
};

std::uint64_t level_scratch_bytes(std::uint64_t nodes, std::uint64_t entries) {
  return nodes * (sizeof(std::uint32_t) + sizeof(CellCoord)) + entries * sizeof(std::uint32_t);
}

constexpr std::uint64_t kInternalNodeBytes = sizeof(std::uint32_t) + sizeof(std::uint8_t);

}  // namespace

SurfaceOctree build_octree(const TriangleMesh& mesh, int depth, const OctreeOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (mesh.triangle_count() == 0) fail(ErrorCode::kEmptyMesh, "octree needs triangles");
  if (depth < 0 || depth > kMaxOctreeDepth) {
    fail(ErrorCode::kInvalidArgument, "octree depth must be in [0, 16]");
  }
  SurfaceOctree tree;
  tree.depth_ = depth;
  tree.root_ = options.root ? cubify(*options.root) : cubify(mesh.bounds());

  const auto positions = mesh.positions();
  const auto tris = mesh.triangles();
  std::vector<Box3> tri_boxes(tris.size());
  for (std::size_t i = 0; i < tris.size(); ++i) {
    for (std::uint32_t v : tris[i]) tri_boxes[i].extend(positions[v]);
  }
  auto overlaps = [&](std::uint32_t t, const Vec3& lo, const Vec3& hi) {
    const Box3& tb = tri_boxes[t];
    if ((tb.min.array() > hi.array()).any() || (tb.max.array() < lo.array()).any()) return false;
    const Triangle& tri = tris[t];
    return triangle_box_overlap(0.5 * (lo + hi), 0.5 * (hi - lo), positions[tri[0]],
                                positions[tri[1]], positions[tri[2]]);
  };

  BuildLevel cur;
  cur.offsets = {0};
  for (std::uint32_t t = 0; t < tris.size(); ++t) {
    if (overlaps(t, tree.root_.min, tree.root_.max)) cur.entries.push_back(t);
  }
  if (cur.entries.empty()) {
    fail(ErrorCode::kInvalidArgument, "mesh does not intersect the octree root");
  }
  cur.offsets.push_back(static_cast<std::uint32_t>(cur.entries.size()));
  cur.cells = {CellCoord{0, 0, 0}};

  std::uint64_t internal_bytes = 0;
  std::uint64_t peak = level_scratch_bytes(1, cur.entries.size());
  std::uint64_t node_count = 1;
  auto check_budget = [&](std::uint64_t projected) {
    peak = std::max(peak, projected);
    if (options.memory_budget != 0 && projected > options.memory_budget) {
      fail(ErrorCode::kMemoryBudgetExceeded,
           "octree needs " + std::to_string(projected) + " bytes, budget is " +
               std::to_string(options.memory_budget));
    }
  };
  check_budget(peak);

  for (int level = 0; level < depth; ++level) {
    const std::size_t nodes = cur.cells.size();
    const double child_size = tree.cell_size(level + 1);
    // Pass 1: which children each entry crosses, and the exact next size.
    std::vector<std::uint8_t> masks(cur.entries.size(), 0);
    std::uint64_t next_nodes = 0;
    std::uint64_t next_entries = 0;
    for (std::size_t n = 0; n < nodes; ++n) {
      std::uint8_t node_mask = 0;
      for (std::uint32_t e = cur.offsets[n]; e < cur.offsets[n + 1]; ++e) {
        std::uint8_t m = 0;
        for (int oct = 0; oct < 8; ++oct) {
          const CellCoord child{cur.cells[n][0] * 2 + (oct & 1),
                                cur.cells[n][1] * 2 + ((oct >> 1) & 1),
                                cur.cells[n][2] * 2 + ((oct >> 2) & 1)};
          Vec3 lo, hi;
          for (int k = 0; k < 3; ++k) {
            lo[k] = tree.root_.min[k] + child_size * child[static_cast<std::size_t>(k)];
            hi[k] = tree.root_.min[k] + child_size * (child[static_cast<std::size_t>(k)] + 1.0);
          }
          if (overlaps(cur.entries[e], lo, hi)) m = static_cast<std::uint8_t>(m | (1u << oct));
        }
        masks[e] = m;
        node_mask = static_cast<std::uint8_t>(node_mask | m);
        next_entries += static_cast<std::uint64_t>(std::popcount(m));
      }
      next_nodes += static_cast<std::uint64_t>(std::popcount(node_mask));
    }
    if (next_entries > std::numeric_limits<std::uint32_t>::max() ||
        next_nodes > std::numeric_limits<std::uint32_t>::max()) {
      fail(ErrorCode::kMemoryBudgetExceeded, "octree level exceeds 32-bit indexing");
    }
    const bool next_is_leaf = level + 1 == depth;
    const std::uint64_t this_level_bytes = nodes * kInternalNodeBytes;
    check_budget(internal_bytes + this_level_bytes +
                 level_scratch_bytes(nodes, cur.entries.size()) + masks.size() +
                 level_scratch_bytes(next_nodes, next_entries) +
                 (next_is_leaf ? 0 : next_nodes * kInternalNodeBytes));

    // Pass 2: children in octant order, entries in parent order.
    SurfaceOctree::Level out;
    out.first_child.resize(nodes);
    out.child_mask.resize(nodes);
    BuildLevel next;
    next.offsets.reserve(next_nodes + 1);
    next.entries.reserve(next_entries);
    next.cells.reserve(next_nodes);
    next.offsets.push_back(0);
    for (std::size_t n = 0; n < nodes; ++n) {
      std::uint8_t node_mask = 0;
      for (std::uint32_t e = cur.offsets[n]; e < cur.offsets[n + 1]; ++e) {
        node_mask = static_cast<std::uint8_t>(node_mask | masks[e]);
      }
      out.first_child[n] = static_cast<std::uint32_t>(next.cells.size());
      out.child_mask[n] = node_mask;
      for (int oct = 0; oct < 8; ++oct) {
        if ((node_mask & (1u << oct)) == 0) continue;
        for (std::uint32_t e = cur.offsets[n]; e < cur.offsets[n + 1]; ++e) {
          if ((masks[e] & (1u << oct)) != 0) next.entries.push_back(cur.entries[e]);
        }
        next.offsets.push_back(static_cast<std::uint32_t>(next.entries.size()));
        next.cells.push_back({cur.cells[n][0] * 2 + (oct & 1), cur.cells[n][1] * 2 + ((oct >> 1) & 1),
                              cur.cells[n][2] * 2 + ((oct >> 2) & 1)});
      }
    }
    internal_bytes += this_level_bytes;
    node_count += next_nodes;
    tree.levels_.push_back(std::move(out));
    cur = std::move(next);
  }

  tree.leaf_offsets_ = std::move(cur.offsets);
  tree.leaf_triangles_ = std::move(cur.entries);
  tree.stats_.node_count = node_count;
  tree.stats_.leaf_count = tree.leaf_count();
  tree.stats_.triangle_refs = tree.leaf_triangles_.size();
  tree.stats_.structure_bytes = internal_bytes +
                                tree.leaf_offsets_.size() * sizeof(std::uint32_t) +
                                tree.leaf_triangles_.size() * sizeof(std::uint32_t);
  tree.stats_.peak_bytes = std::max(peak, tree.stats_.structure_bytes);
  tree.stats_.build_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return tree;
}

OctreeLayer::OctreeLayer(const SurfaceOctree& octree, ElementKind element, Palette palette,
                         DisplayLimits limits)
    : OctreeLayer(octree.leaf_count(), element, std::move(palette), limits) {}

OctreeLayer::OctreeLayer(std::size_t leaf_count, ElementKind element, Palette palette,
                         DisplayLimits limits)
    : values_(static_cast<int>(std::min<std::size_t>(leaf_count, std::numeric_limits<int>::max())),
              1, element),
      valid_(leaf_count, 0),
      palette_(std::move(palette)),
      limits_(limits) {
  if (leaf_count > static_cast<std::size_t>(std::numeric_limits<int>::max())) {
    fail(ErrorCode::kCapacityExceeded, "too many leaves for one layer");
  }
  if (element == ElementKind::kRgba8 || element == ElementKind::kBool) {
    fail(ErrorCode::kInvalidArgument, "octree layers hold numeric values");
  }
  if (!(limits.lower < limits.upper)) {
    fail(ErrorCode::kInvalidArgument, "layer limits need lower < upper");
  }
}

void OctreeLayer::set(std::size_t leaf, double value) {
  values_.set_value(leaf, value);
  valid_[leaf] = 1;
}

std::size_t OctreeLayer::valid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

namespace {

// Slab test of the segment against a box; [t0, t1] within [0, 1].
bool segment_box(const Ray& ray, const Vec3& inv, const Box3& box, double& t0, double& t1) {
  t0 = 0.0;
  t1 = 1.0;
  for (int k = 0; k < 3; ++k) {
    if (ray.direction[k] == 0.0) {
      if (ray.origin[k] < box.min[k] || ray.origin[k] > box.max[k]) return false;
      continue;
    }
    double a = (box.min[k] - ray.origin[k]) * inv[k];
    double b = (box.max[k] - ray.origin[k]) * inv[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return false;
  }
  return true;
}

// Moller-Trumbore, two-sided.
std::optional<double> ray_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = ray.direction.cross(e2);
  const double det = e1.dot(p);
  if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = ray.origin - a;
  const double u = s.dot(p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = ray.direction.dot(q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (t < 0.0 || t > 1.0) return std::nullopt;
  return t;
}

constexpr double kLeafSlack = 1e-9;

}  // namespace

std::optional<RayHit> octree_raycast(const SurfaceOctree& octree, const TriangleMesh& mesh,
                                     const Ray& ray) {
  if (octree.leaf_count() == 0) return std::nullopt;
  const Vec3 inv(1.0 / ray.direction.x(), 1.0 / ray.direction.y(), 1.0 / ray.direction.z());
  const auto positions = mesh.positions();
  const auto tris = mesh.triangles();
  const int depth = octree.depth();
  std::array<double, kMaxOctreeDepth + 1> sizes{};
  for (int l = 0; l <= depth; ++l) sizes[static_cast<std::size_t>(l)] = octree.cell_size(l);
  const Vec3 origin = octree.root().min;

  struct Item {
    int level;
    std::uint32_t node;
    CellCoord cell;
    double t0;
    double t1;
  };
  // At most 8 pending siblings per level.
  std::array<Item, 8 * (kMaxOctreeDepth + 1)> stack;
  std::size_t top = 0;
  double t0, t1;
  if (!segment_box(ray, inv, octree.root(), t0, t1)) return std::nullopt;
  stack[top++] = {0, 0, {0, 0, 0}, t0, t1};

  while (top > 0) {
    const Item it = stack[--top];
    if (it.level == depth) {
      std::optional<RayHit> best;
      for (std::uint32_t t : octree.leaf_triangles(it.node)) {
        const Triangle& tri = tris[t];
        const auto hit = ray_triangle(ray, positions[tri[0]], positions[tri[1]], positions[tri[2]]);
        if (!hit || *hit < it.t0 - kLeafSlack || *hit > it.t1 + kLeafSlack) continue;
        if (!best || *hit < best->t) best = RayHit{*hit, t, it.node};
      }
      if (best) return best;
      continue;
    }
    const std::uint8_t mask = octree.child_mask(it.level, it.node);
    std::uint32_t child = octree.first_child(it.level, it.node);
    const double size = sizes[static_cast<std::size_t>(it.level + 1)];
    Item kids[8];
    int count = 0;
    for (int oct = 0; oct < 8; ++oct) {
      if ((mask & (1u << oct)) == 0) continue;
      const CellCoord cell{it.cell[0] * 2 + (oct & 1), it.cell[1] * 2 + ((oct >> 1) & 1),
                           it.cell[2] * 2 + ((oct >> 2) & 1)};
      const std::uint32_t node = child++;
      Box3 box;
      for (int k = 0; k < 3; ++k) {
        box.min[k] = origin[k] + size * cell[static_cast<std::size_t>(k)];
        box.max[k] = origin[k] + size * (cell[static_cast<std::size_t>(k)] + 1.0);
      }
      double c0, c1;
      if (!segment_box(ray, inv, box, c0, c1)) continue;
      kids[count++] = {it.level + 1, node, cell, c0, c1};
    }
    // nearest child ends on top of the stack
    std::sort(kids, kids + count, [](const Item& a, const Item& b) {
      return a.t0 != b.t0 ? a.t0 > b.t0 : a.node > b.node;
    });
    for (int i = 0; i < count; ++i) stack[top++] = kids[i];
  }
  return std::nullopt;
}

std::vector<std::array<int, 2>> tool_pixels(const Camera& camera, const EditingTool& tool) {
  std::vector<std::array<int, 2>> pixels;
  const int tw = tool.shape_width();
  const int th = tool.shape_height();
  // shape index of pixel p is floor(p + 0.5 - T_p + T/2)
  const double ox = tool.x - 0.5 * tw - 0.5;
  const double oy = tool.y - 0.5 * th - 0.5;
  for (int j = 0; j < th; ++j) {
    const int py = static_cast<int>(std::ceil(j + oy));
    if (py < 0 || py >= camera.height) continue;
    for (int i = 0; i < tw; ++i) {
      if (!tool.shape.at(i, j)) continue;
      const int px = static_cast<int>(std::ceil(i + ox));
      if (px < 0 || px >= camera.width) continue;
      pixels.push_back({px, py});
    }
  }
  return pixels;
}

OctreeEditResult octree_edit(const SurfaceOctree& octree, OctreeLayer& layer,
                             const TriangleMesh& mesh, const Camera& camera,
                             const EditingTool& tool, double value) {
  const auto start = std::chrono::steady_clock::now();
  tool.validate();
  camera.validate();
  if (layer.size() != octree.leaf_count()) {
    fail(ErrorCode::kLayerMeshMismatch, "octree layer does not match the octree");
  }
  OctreeEditResult result;
  const Mat4 inverse_vp = camera.view_projection().inverse();
  for (const auto& [px, py] : tool_pixels(camera, tool)) {
    const Ray ray = camera_ray(inverse_vp, camera.width, camera.height, px + 0.5, py + 0.5);
    ++result.rays;
    if (const auto hit = octree_raycast(octree, mesh, ray)) {
      layer.set(hit->leaf, value);
      result.edited.push_back(hit->leaf);
    }
  }
  std::sort(result.edited.begin(), result.edited.end());
  result.edited.erase(std::unique(result.edited.begin(), result.edited.end()), result.edited.end());

  // The baseline keeps values on the CPU and re-sends every leaf color.
  const std::vector<Rgba8> upload = octree_layer_colors(layer);
  result.transfer_bytes = upload.size() * sizeof(Rgba8);
  result.duration_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::uint64_t octree_upload_size(const OctreeLayer& layer) {
  return static_cast<std::uint64_t>(layer.size()) * sizeof(Rgba8);
}

std::vector<Rgba8> octree_layer_colors(const OctreeLayer& layer) {
  std::vector<Rgba8> colors(layer.size(), Rgba8{});
  for (std::size_t i = 0; i < layer.size(); ++i) {
    if (layer.valid(i)) {
      colors[i] = to_rgba8(map_value_to_color(layer.palette(), layer.limits(), layer.value(i)));
    }
  }
  return colors;
}

double octree_precision(const SurfaceOctree& octree, const TriangleMesh& mesh) {
  if (octree.leaf_count() == 0) return std::numeric_limits<double>::infinity();
  return mesh_surface_area(mesh) * square_cm_per_unit(mesh.units()) /
         static_cast<double>(octree.leaf_count());
}

}  // namespace texlayer
