#include "texlayer/element.hpp"

#include <Eigen/Core>
#include <array>
#include <bit>

namespace texlayer {

namespace {

constexpr std::array<std::string_view, 9> kNames = {
    "int8", "int16", "int32", "uint8", "uint32", "float16", "float32", "bool", "rgba8"};

}  // namespace

std::size_t element_size(ElementKind kind) {
  switch (kind) {
    case ElementKind::kInt8:
    case ElementKind::kUInt8:
    case ElementKind::kBool:
      return 1;
    case ElementKind::kInt16:
    case ElementKind::kFloat16:
      return 2;
    case ElementKind::kInt32:
    case ElementKind::kUInt32:
    case ElementKind::kFloat32:
    case ElementKind::kRgba8:
      return 4;
  }
  return 0;
}

std::string_view element_kind_name(ElementKind kind) {
  return kNames[static_cast<std::size_t>(kind)];
}

std::optional<ElementKind> parse_element_kind(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<ElementKind>(i);
  }
  return std::nullopt;
}

std::optional<ElementKind> element_kind_from_code(std::uint8_t code) {
  if (code < kNames.size()) return static_cast<ElementKind>(code);
  return std::nullopt;
}

bool is_integer_kind(ElementKind kind) {
  switch (kind) {
    case ElementKind::kInt8:
    case ElementKind::kInt16:
    case ElementKind::kInt32:
    case ElementKind::kUInt8:
    case ElementKind::kUInt32:
      return true;
    default:
      return false;
  }
}

std::uint16_t float_to_half_bits(float value) {
  return std::bit_cast<std::uint16_t>(Eigen::half(value));
}

float half_bits_to_float(std::uint16_t bits) {
  return static_cast<float>(std::bit_cast<Eigen::half>(bits));
}

}  // namespace texlayer
