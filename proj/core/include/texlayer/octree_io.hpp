#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "texlayer/octree.hpp"

namespace texlayer {

inline constexpr std::uint16_t kOctreeFileVersion = 1;

/// Little-endian: "OCTB" | u16 version | u8 depth | u64 leaf count |
/// 6 x f64 root | per internal level: u64 nodes, u32 first child[],
/// u8 child mask[] | u64 leaf offsets count, u32[] | u64 refs, u32[] |
/// u8 has layer [, u8 element, u16 points, points, f64 lower, f64 upper,
/// raw values, validity bytes] | u32 CRC-32.
struct OctreeBundle {
  SurfaceOctree octree;
  std::optional<OctreeLayer> layer;
};

std::string save_octree(const SurfaceOctree& octree, const OctreeLayer* layer = nullptr);
/// Throws BadMagic, UnsupportedVersion, TruncatedStream, ChecksumMismatch.
OctreeBundle load_octree(const std::string& bytes);

void save_octree_file(const std::filesystem::path& path, const SurfaceOctree& octree,
                      const OctreeLayer* layer = nullptr);
OctreeBundle load_octree_file(const std::filesystem::path& path);

}  // namespace texlayer
