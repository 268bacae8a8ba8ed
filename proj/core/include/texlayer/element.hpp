#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace texlayer {

/// Texel element kinds. The numeric values are written to layer files.
enum class ElementKind : std::uint8_t {
  kInt8 = 0,
  kInt16 = 1,
  kInt32 = 2,
  kUInt8 = 3,
  kUInt32 = 4,
  kFloat16 = 5,
  kFloat32 = 6,
  kBool = 7,
  kRgba8 = 8,
};

struct Rgba8 {
  std::uint8_t r = 0, g = 0, b = 0, a = 0;
  bool operator==(const Rgba8&) const = default;
};

std::size_t element_size(ElementKind kind);
std::string_view element_kind_name(ElementKind kind);
std::optional<ElementKind> parse_element_kind(std::string_view name);
std::optional<ElementKind> element_kind_from_code(std::uint8_t code);

bool is_integer_kind(ElementKind kind);

/// IEEE binary16 conversion, round-to-nearest-even.
std::uint16_t float_to_half_bits(float value);
float half_bits_to_float(std::uint16_t bits);

}  // namespace texlayer
