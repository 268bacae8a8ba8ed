#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "texlayer/math.hpp"
#include "texlayer/palette.hpp"
#include "texlayer/texture.hpp"

namespace texlayer {

enum class LayerKind : std::uint8_t { kNumeric = 0, kDatabase = 1 };

std::string_view layer_kind_name(LayerKind kind);

struct DisplayLimits {
  double lower = 0.0;
  double upper = 1.0;
  bool operator==(const DisplayLimits&) const = default;
};

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::kNumeric;
  ElementKind element = ElementKind::kFloat32;  // forced to uint32 for database layers
  int width = 1;
  int height = 1;
  Palette palette = Palette::grayscale();
  DisplayLimits limits;
  std::string table;  // database layers only
};

/// A surface attribute stored in texture space: a data plane, a boolean
/// mask plane marking texels that hold valid information, a palette and
/// display limits. Planes are leased from a TexturePool, which must outlive
/// the layer.
class InformationLayer {
 public:
  InformationLayer(TexturePool& pool, LayerSpec spec);

  const std::string& name() const { return spec_.name; }
  LayerKind kind() const { return spec_.kind; }
  ElementKind element() const { return spec_.element; }
  int width() const { return spec_.width; }
  int height() const { return spec_.height; }
  const Palette& palette() const { return spec_.palette; }
  const DisplayLimits& limits() const { return spec_.limits; }
  const std::string& table() const { return spec_.table; }
  const LayerSpec& spec() const { return spec_; }

  TexturePlane& data() { return *data_; }
  const TexturePlane& data() const { return *data_; }
  TexturePlane& mask() { return *mask_; }
  const TexturePlane& mask() const { return *mask_; }

  void set_palette(Palette palette) { spec_.palette = std::move(palette); }
  void set_limits(DisplayLimits limits);
  void rename(std::string name) { spec_.name = std::move(name); }

  std::size_t valid_texels() const;

 private:
  LayerSpec spec_;
  PlaneLease data_;
  PlaneLease mask_;
};

using TableExists = std::function<bool(std::string_view)>;

/// New layer with a zeroed data plane and an all-false mask. Throws
/// UnknownTable when a database layer names a table that table_exists
/// rejects, CapacityExceeded from the pool, InvalidArgument on bad specs.
InformationLayer create_layer(TexturePool& pool, LayerSpec spec,
                              const TableExists& table_exists = {});

/// Palette lookup: u = clamp((value - lower) / (upper - lower), 0, 1).
Color map_value_to_color(const InformationLayer& layer, double value);
Color map_value_to_color(const Palette& palette, const DisplayLimits& limits, double value);

/// RGBA8 rendering of the layer; texels with mask = false are (0,0,0,0).
TexturePlane resolve_display(const InformationLayer& layer);
/// Row-major RGBA8 bytes of resolve_display restricted to rect.
std::vector<Rgba8> resolve_display_rect(const InformationLayer& layer, const TexelRect& rect);

/// Checks that value is storable in the layer's element kind and returns
/// it as stored (float16 rounding applied). Throws InvalidArgument for
/// non-integral or out-of-range integers, ReservedKey for database key 0.
double checked_layer_value(const InformationLayer& layer, double value);

}  // namespace texlayer
