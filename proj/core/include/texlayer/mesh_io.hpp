#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include "texlayer/mesh.hpp"

namespace texlayer {

enum class MeshFormat { kObj, kPly };

/// Parses OBJ (v, vt, vn, triangular f) or ASCII/binary PLY with s,t or
/// u,v vertex properties. Throws ParseError, MissingUVs or EmptyMesh.
TriangleMesh load_mesh(std::span<const std::byte> source, MeshFormat format,
                       LengthUnit units = LengthUnit::kMeters);
TriangleMesh load_mesh(const std::string& text, MeshFormat format,
                       LengthUnit units = LengthUnit::kMeters);
/// Format chosen by extension (.obj, .ply).
TriangleMesh load_mesh_file(const std::filesystem::path& path,
                            LengthUnit units = LengthUnit::kMeters);

/// Binary little-endian PLY with float64 positions, normals and uvs, so a
/// reload reproduces every array bit for bit.
std::string save_mesh_ply(const TriangleMesh& mesh);
void save_mesh_ply_file(const TriangleMesh& mesh, const std::filesystem::path& path);

}  // namespace texlayer
