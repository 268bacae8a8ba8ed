#include "texlayer/layer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "texlayer/error.hpp"

namespace texlayer {

namespace {

bool numeric_element(ElementKind k) {
  switch (k) {
    case ElementKind::kInt8:
    case ElementKind::kInt16:
    case ElementKind::kInt32:
    case ElementKind::kFloat16:
    case ElementKind::kFloat32:
      return true;
    default:
      return false;
  }
}

template <class T>
bool fits(double v) {
  return v >= static_cast<double>(std::numeric_limits<T>::lowest()) &&
         v <= static_cast<double>(std::numeric_limits<T>::max());
}

}  // namespace

std::string_view layer_kind_name(LayerKind kind) {
  return kind == LayerKind::kDatabase ? "database" : "numeric";
}

InformationLayer::InformationLayer(TexturePool& pool, LayerSpec spec)
    : spec_(std::move(spec)),
      data_(pool, spec_.width, spec_.height, spec_.element),
      mask_(pool, spec_.width, spec_.height, ElementKind::kBool) {}

void InformationLayer::set_limits(DisplayLimits limits) {
  if (!(limits.lower < limits.upper)) {
    fail(ErrorCode::kInvalidArgument, "display limits need lower < upper");
  }
  spec_.limits = limits;
}

std::size_t InformationLayer::valid_texels() const {
  const auto m = mask_->as<std::uint8_t>();
  std::size_t n = 0;
  for (std::uint8_t v : m) n += v != 0;
  return n;
}

InformationLayer create_layer(TexturePool& pool, LayerSpec spec, const TableExists& table_exists) {
  if (spec.width < 1 || spec.height < 1) {
    fail(ErrorCode::kInvalidArgument, "layer dimensions must be >= 1");
  }
  if (!(spec.limits.lower < spec.limits.upper) || !std::isfinite(spec.limits.lower) ||
      !std::isfinite(spec.limits.upper)) {
    fail(ErrorCode::kInvalidArgument, "display limits need finite lower < upper");
  }
  if (spec.kind == LayerKind::kDatabase) {
    spec.element = ElementKind::kUInt32;
    if (spec.table.empty() || !table_exists || !table_exists(spec.table)) {
      fail(ErrorCode::kUnknownTable, "unknown table '" + spec.table + "'");
    }
  } else {
    if (!numeric_element(spec.element)) {
      fail(ErrorCode::kInvalidArgument, "numeric layers use int8, int16, int32, float16 or float32");
    }
    spec.table.clear();
  }
  return InformationLayer(pool, std::move(spec));
}

Color map_value_to_color(const Palette& palette, const DisplayLimits& limits, double value) {
  const double u = std::clamp((value - limits.lower) / (limits.upper - limits.lower), 0.0, 1.0);
  return palette.sample(u);
}

Color map_value_to_color(const InformationLayer& layer, double value) {
  return map_value_to_color(layer.palette(), layer.limits(), value);
}

TexturePlane resolve_display(const InformationLayer& layer) {
  TexturePlane out(layer.width(), layer.height(), ElementKind::kRgba8);
  const auto rgba = resolve_display_rect(layer, {0, 0, layer.width(), layer.height()});
  std::copy(rgba.begin(), rgba.end(), out.as<Rgba8>().begin());
  return out;
}

std::vector<Rgba8> resolve_display_rect(const InformationLayer& layer, const TexelRect& rect) {
  if (rect.x < 0 || rect.y < 0 || rect.x + rect.width > layer.width() ||
      rect.y + rect.height > layer.height() || rect.width < 0 || rect.height < 0) {
    fail(ErrorCode::kInvalidArgument, "display rect lies outside the layer");
  }
  std::vector<Rgba8> out(static_cast<std::size_t>(rect.width) * rect.height);
  const auto mask = layer.mask().as<std::uint8_t>();
  const TexturePlane& data = layer.data();
  std::size_t o = 0;
  for (int y = rect.y; y < rect.y + rect.height; ++y) {
    for (int x = rect.x; x < rect.x + rect.width; ++x, ++o) {
      const std::size_t i = data.index(x, y);
      if (mask[i] != 0) out[o] = to_rgba8(map_value_to_color(layer, data.value(i)));
    }
  }
  return out;
}

double checked_layer_value(const InformationLayer& layer, double value) {
  if (!std::isfinite(value)) fail(ErrorCode::kInvalidArgument, "layer values must be finite");
  const ElementKind k = layer.element();
  if (is_integer_kind(k)) {
    if (value != std::trunc(value)) {
      fail(ErrorCode::kInvalidArgument, "integer layer needs an integral value");
    }
    bool ok = true;
    switch (k) {
      case ElementKind::kInt8: ok = fits<std::int8_t>(value); break;
      case ElementKind::kInt16: ok = fits<std::int16_t>(value); break;
      case ElementKind::kInt32: ok = fits<std::int32_t>(value); break;
      case ElementKind::kUInt8: ok = fits<std::uint8_t>(value); break;
      case ElementKind::kUInt32: ok = fits<std::uint32_t>(value); break;
      default: break;
    }
    if (!ok) fail(ErrorCode::kInvalidArgument, "value out of range for the layer element kind");
    if (layer.kind() == LayerKind::kDatabase && value == 0.0) {
      fail(ErrorCode::kReservedKey, "key 0 is reserved for 'no record'");
    }
    return value;
  }
  if (k == ElementKind::kFloat16) return half_bits_to_float(float_to_half_bits(static_cast<float>(value)));
  return static_cast<float>(value);
}

}  // namespace texlayer
