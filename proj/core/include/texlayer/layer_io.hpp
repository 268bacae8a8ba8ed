#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include "texlayer/layer.hpp"

namespace texlayer {

inline constexpr std::uint16_t kLayerFileVersion = 1;

/// Little-endian layer file:
///   "L3DI" | u16 version | u8 layer kind | u8 element kind | u32 width |
///   u32 height | f64 lower | f64 upper | u16 point count |
///   points (f32 position, 4 x f32 rgba) | u16 + UTF-8 name |
///   u16 + UTF-8 table name (empty for numeric) | data plane (row-major) |
///   mask (packed bits, row-major, LSB first) | u32 CRC-32 of all
///   preceding bytes.
std::string save_layer(const InformationLayer& layer);

/// Throws BadMagic, UnsupportedVersion, TruncatedStream or ChecksumMismatch.
InformationLayer load_layer(std::span<const std::byte> bytes, TexturePool& pool);
InformationLayer load_layer(const std::string& bytes, TexturePool& pool);

void save_layer_file(const InformationLayer& layer, const std::filesystem::path& path);
InformationLayer load_layer_file(const std::filesystem::path& path, TexturePool& pool);

}  // namespace texlayer
