#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "texlayer/camera.hpp"
#include "texlayer/layer.hpp"
#include "texlayer/mesh.hpp"
#include "texlayer/texture.hpp"
#include "texlayer/tool.hpp"

namespace texlayer {

inline constexpr int kMaxOctreeDepth = 16;

using CellCoord = std::array<std::uint32_t, 3>;

struct OctreeOptions {
  /// Root cube; defaults to the mesh bounds cubified to their largest
  /// extent around the same center.
  std::optional<Box3> root;
  /// Cap on the structure plus build scratch, in bytes; 0 = unlimited.
  std::uint64_t memory_budget = 0;
};

struct OctreeStats {
  std::uint64_t node_count = 0;  // all levels, root included
  std::uint64_t leaf_count = 0;
  std::uint64_t triangle_refs = 0;
  double build_ms = 0.0;
  std::uint64_t structure_bytes = 0;
  std::uint64_t peak_bytes = 0;  // largest projected footprint during build
};

/// Surface-crossing octree: only cells intersected by at least one
/// triangle exist. Every level is stored breadth-first with the children
/// of a node contiguous in octant order (bit 0 = +x, bit 1 = +y,
/// bit 2 = +z), so leaves come out in depth-first octant order.
class SurfaceOctree {
 public:
  SurfaceOctree() = default;

  int depth() const { return depth_; }
  const Box3& root() const { return root_; }
  /// Edge length of a cell at the given level.
  double cell_size(int level) const;
  Box3 cell_box(int level, const CellCoord& cell) const;

  std::size_t leaf_count() const { return leaf_offsets_.empty() ? 0 : leaf_offsets_.size() - 1; }
  std::span<const std::uint32_t> leaf_triangles(std::size_t leaf) const;
  std::size_t level_size(int level) const;
  std::uint32_t first_child(int level, std::size_t node) const {
    return levels_[static_cast<std::size_t>(level)].first_child[node];
  }
  std::uint8_t child_mask(int level, std::size_t node) const {
    return levels_[static_cast<std::size_t>(level)].child_mask[node];
  }
  const OctreeStats& stats() const { return stats_; }

  /// Leaf index of the cell at the leaf level, if crossed.
  std::optional<std::uint32_t> find_leaf(const CellCoord& cell) const;
  /// Depth-first walk over leaves with their cell coordinates.
  template <class Visit>
  void for_each_leaf(Visit&& visit) const;

 private:
  friend SurfaceOctree build_octree(const TriangleMesh&, int, const OctreeOptions&);
  friend struct OctreeSerializer;

  struct Level {
    std::vector<std::uint32_t> first_child;
    std::vector<std::uint8_t> child_mask;
  };

  int depth_ = 0;
  Box3 root_;
  std::vector<Level> levels_;  // internal levels 0 .. depth-1
  std::vector<std::uint32_t> leaf_offsets_;
  std::vector<std::uint32_t> leaf_triangles_;
  OctreeStats stats_;
};

/// Throws EmptyMesh for meshes without triangles, InvalidArgument for a
/// depth outside [0, 16] and MemoryBudgetExceeded when the next level
/// would push the footprint past options.memory_budget.
SurfaceOctree build_octree(const TriangleMesh& mesh, int depth, const OctreeOptions& options = {});

Box3 cubify(const Box3& box);

/// Separating-axis triangle/box test on a closed box: touching counts.
bool triangle_box_overlap(const Vec3& center, const Vec3& half, const Vec3& a, const Vec3& b,
                          const Vec3& c);

/// Per-leaf layer values with validity flags, indexed like the leaves.
class OctreeLayer {
 public:
  OctreeLayer(const SurfaceOctree& octree, ElementKind element,
              Palette palette = Palette::grayscale(), DisplayLimits limits = {});
  OctreeLayer(std::size_t leaf_count, ElementKind element, Palette palette, DisplayLimits limits);

  std::size_t size() const { return valid_.size(); }
  ElementKind element() const { return values_.kind(); }
  const Palette& palette() const { return palette_; }
  const DisplayLimits& limits() const { return limits_; }
  double value(std::size_t leaf) const { return values_.value(leaf); }
  bool valid(std::size_t leaf) const { return valid_[leaf] != 0; }
  void set(std::size_t leaf, double value);
  const TexturePlane& values() const { return values_; }
  TexturePlane& values() { return values_; }
  const std::vector<std::uint8_t>& validity() const { return valid_; }
  std::vector<std::uint8_t>& validity() { return valid_; }
  std::size_t valid_count() const;

  bool operator==(const OctreeLayer&) const = default;

 private:
  TexturePlane values_;
  std::vector<std::uint8_t> valid_;
  Palette palette_;
  DisplayLimits limits_;
};

struct RayHit {
  double t = 0.0;
  std::uint32_t triangle = 0;
  std::uint32_t leaf = 0;
};

/// Nearest hit of the segment origin + t * direction, t in [0, 1], found
/// by front-to-back traversal; the leaf is the first one along the ray
/// that holds the hit triangle at the hit distance.
std::optional<RayHit> octree_raycast(const SurfaceOctree& octree, const TriangleMesh& mesh,
                                     const Ray& ray);

struct OctreeEditResult {
  std::vector<std::uint32_t> edited;  // sorted leaf indices
  std::uint64_t rays = 0;
  double duration_ms = 0.0;
  std::uint64_t transfer_bytes = 0;
};

/// One camera ray per window pixel inside the tool shape; the leaf of each
/// nearest hit gets value. The layer colors are then rebuilt for upload
/// (all leaves), which is what transfer_bytes accounts for.
OctreeEditResult octree_edit(const SurfaceOctree& octree, OctreeLayer& layer,
                             const TriangleMesh& mesh, const Camera& camera,
                             const EditingTool& tool, double value);

/// Window pixels covered by the tool shape, clipped to the viewport. Cell
/// (i, j) of the shape covers the pixel whose center maps into it.
std::vector<std::array<int, 2>> tool_pixels(const Camera& camera, const EditingTool& tool);

/// Crossed-leaf count x 4 (one RGBA8 color per leaf).
std::uint64_t octree_upload_size(const OctreeLayer& layer);
/// The simulated upload: color per leaf, transparent where invalid.
std::vector<Rgba8> octree_layer_colors(const OctreeLayer& layer);

/// Surface area per crossed leaf, in square centimetres.
double octree_precision(const SurfaceOctree& octree, const TriangleMesh& mesh);

template <class Visit>
void SurfaceOctree::for_each_leaf(Visit&& visit) const {
  if (leaf_count() == 0) return;
  struct Item {
    int level;
    std::uint32_t node;
    CellCoord cell;
  };
  std::vector<Item> stack{{0, 0, {0, 0, 0}}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    if (it.level == depth_) {
      visit(static_cast<std::size_t>(it.node), it.cell);
      continue;
    }
    const std::uint8_t mask = child_mask(it.level, it.node);
    std::uint32_t child = first_child(it.level, it.node) +
                          static_cast<std::uint32_t>(std::popcount(mask));
    for (int oct = 7; oct >= 0; --oct) {
      if ((mask & (1u << oct)) == 0) continue;
      --child;
      stack.push_back({it.level + 1, child,
                       {it.cell[0] * 2 + (oct & 1), it.cell[1] * 2 + ((oct >> 1) & 1),
                        it.cell[2] * 2 + ((oct >> 2) & 1)}});
    }
  }
}

}  // namespace texlayer
