#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "texlayer/error.hpp"
#include "texlayer/layer.hpp"
#include "texlayer/palette.hpp"

using namespace texlayer;

namespace {

LayerSpec numeric_spec(int side, ElementKind element, DisplayLimits limits = {}) {
  LayerSpec s;
  s.name = "test";
  s.element = element;
  s.width = side;
  s.height = side;
  s.limits = limits;
  return s;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIoError;
}

Palette random_palette(gen::Rng& rng) {
  const int n = gen::uniform_int(rng, 2, 6);
  std::vector<float> pos{0.0f, 1.0f};
  while (static_cast<int>(pos.size()) < n) pos.push_back(static_cast<float>(gen::uniform(rng, 0.01, 0.99)));
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  std::vector<ControlPoint> pts;
  for (float p : pos) {
    pts.push_back({p,
                   {static_cast<float>(gen::uniform(rng, 0, 1)), static_cast<float>(gen::uniform(rng, 0, 1)),
                    static_cast<float>(gen::uniform(rng, 0, 1)), static_cast<float>(gen::uniform(rng, 0, 1))}});
  }
  return Palette::create(std::move(pts));
}

}  // namespace

TEST(CreateLayer, FreshLayerHasNoValidTexels) {
  TexturePool pool;
  const InformationLayer layer = create_layer(pool, numeric_spec(256, ElementKind::kFloat32));
  EXPECT_EQ(layer.valid_texels(), 0u);
  EXPECT_EQ(layer.mask().kind(), ElementKind::kBool);
  EXPECT_EQ(layer.data().width(), layer.mask().width());
  for (std::size_t i = 0; i < layer.data().texel_count(); i += 997) EXPECT_EQ(layer.data().value(i), 0);
}

TEST(CreateLayer, DatabaseLayerNeedsTable) {
  TexturePool pool;
  LayerSpec s = numeric_spec(16, ElementKind::kUInt32);
  s.kind = LayerKind::kDatabase;
  s.table = "sites";
  EXPECT_EQ(code_of([&] { create_layer(pool, s, [](std::string_view) { return false; }); }),
            ErrorCode::kUnknownTable);
  const InformationLayer ok =
      create_layer(pool, s, [](std::string_view name) { return name == "sites"; });
  EXPECT_EQ(ok.element(), ElementKind::kUInt32);
  EXPECT_EQ(ok.table(), "sites");
}

TEST(CreateLayer, DatabaseLayersAreForcedToUInt32) {
  TexturePool pool;
  LayerSpec s = numeric_spec(4, ElementKind::kInt8);
  s.kind = LayerKind::kDatabase;
  s.table = "t";
  EXPECT_EQ(create_layer(pool, s, [](std::string_view) { return true; }).element(),
            ElementKind::kUInt32);
}

TEST(CreateLayer, PoolGainsKey) {
  TexturePool pool;
  const InformationLayer layer = create_layer(pool, numeric_spec(2048, ElementKind::kInt8));
  EXPECT_EQ(pool.array_size({2048, 2048, ElementKind::kInt8}), 1u);
  EXPECT_EQ(pool.array_size({2048, 2048, ElementKind::kBool}), 1u);
}

TEST(CreateLayer, RejectsBadSpecs) {
  TexturePool pool;
  EXPECT_EQ(code_of([&] { create_layer(pool, numeric_spec(0, ElementKind::kInt8)); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { create_layer(pool, numeric_spec(4, ElementKind::kInt8, {1, 1})); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { create_layer(pool, numeric_spec(4, ElementKind::kRgba8)); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { create_layer(pool, numeric_spec(4, ElementKind::kUInt32)); }),
            ErrorCode::kInvalidArgument);
}

TEST(CreateLayer, ReleasesPlanesOnDestruction) {
  TexturePool pool;
  {
    const InformationLayer layer = create_layer(pool, numeric_spec(8, ElementKind::kInt16));
    EXPECT_EQ(pool.live_planes(), 2u);
  }
  EXPECT_EQ(pool.live_planes(), 0u);
}

TEST(Palette, Validation) {
  EXPECT_THROW(Palette::create({{0.0f, {}}}), Error);
  EXPECT_THROW(Palette::create({{0.1f, {}}, {1.0f, {}}}), Error);
  EXPECT_THROW(Palette::create({{0.0f, {}}, {0.5f, {}}, {0.5f, {}}, {1.0f, {}}}), Error);
  EXPECT_THROW(Palette::create({{0.0f, {NAN, 0, 0, 1}}, {1.0f, {}}}), Error);
}

TEST(Palette, JsonRoundTrip) {
  gen::Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const Palette p = random_palette(rng);
    EXPECT_EQ(palette_from_json(palette_to_json(p)), p);
  }
  EXPECT_THROW(palette_from_json("{}"), Error);
  EXPECT_THROW(palette_from_json("[{\"position\":0}]"), Error);
}

TEST(MapValueToColor, Examples) {
  const Palette bw = Palette::create({{0.0f, {0, 0, 0, 1}}, {1.0f, {1, 1, 1, 1}}});
  const DisplayLimits lim{0, 10};
  EXPECT_EQ(map_value_to_color(bw, lim, 0), (Color{0, 0, 0, 1}));
  EXPECT_EQ(map_value_to_color(bw, lim, 5), (Color{0.5f, 0.5f, 0.5f, 1}));
  EXPECT_EQ(map_value_to_color(bw, lim, 25), (Color{1, 1, 1, 1}));
  EXPECT_EQ(map_value_to_color(bw, lim, -3), (Color{0, 0, 0, 1}));
}

TEST(MapValueToColor, ExactAtControlPointsAndMonotoneBetween) {
  gen::Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    const Palette p = random_palette(rng);
    const auto pts = p.points();
    for (const ControlPoint& cp : pts) EXPECT_EQ(p.sample(cp.position), cp.color);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      Color prev = pts[k].color;
      for (int s = 1; s <= 20; ++s) {
        const double u = pts[k].position + (pts[k + 1].position - pts[k].position) * s / 20.0;
        const Color c = p.sample(u);
        const float lo[] = {pts[k].color.r, pts[k].color.g, pts[k].color.b, pts[k].color.a};
        const float hi[] = {pts[k + 1].color.r, pts[k + 1].color.g, pts[k + 1].color.b,
                            pts[k + 1].color.a};
        const float now[] = {c.r, c.g, c.b, c.a};
        const float before[] = {prev.r, prev.g, prev.b, prev.a};
        for (int ch = 0; ch < 4; ++ch) {
          if (hi[ch] >= lo[ch]) {
            EXPECT_GE(now[ch], before[ch]);
          } else {
            EXPECT_LE(now[ch], before[ch]);
          }
        }
        prev = c;
      }
    }
  }
}

TEST(ResolveDisplay, MaskedOutTexelsAreTransparent) {
  TexturePool pool;
  InformationLayer layer = create_layer(pool, numeric_spec(8, ElementKind::kInt16, {0, 100}));
  layer.data().set_value(5, 40);  // data without mask must not show
  const TexturePlane rgba = resolve_display(layer);
  for (const Rgba8& c : rgba.as<Rgba8>()) EXPECT_EQ(c, Rgba8{});
}

TEST(ResolveDisplay, SingleOpaqueTexel) {
  TexturePool pool;
  InformationLayer layer = create_layer(pool, numeric_spec(8, ElementKind::kFloat32, {0, 1}));
  const std::size_t i = layer.data().index(3, 3);
  layer.data().set_value(i, 0.25);
  layer.mask().set_value(i, 1);
  const TexturePlane display = resolve_display(layer);
  const auto rgba = display.as<Rgba8>();
  std::size_t opaque = 0;
  for (const Rgba8& c : rgba) opaque += c.a != 0;
  EXPECT_EQ(opaque, 1u);
  EXPECT_EQ(rgba[i], (Rgba8{64, 64, 64, 255}));
}

TEST(ResolveDisplay, EqualsPointwiseMapOverMaskedTexels) {
  TexturePool pool;
  gen::Rng rng(21);
  for (ElementKind k : {ElementKind::kInt8, ElementKind::kInt16, ElementKind::kInt32,
                        ElementKind::kFloat16, ElementKind::kFloat32}) {
    LayerSpec s = numeric_spec(64, k, {-50, 80});
    s.palette = random_palette(rng);
    InformationLayer layer = create_layer(pool, s);
    const BoolGrid mask = gen::random_grid(rng, 64, 64, 0.5);
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        const std::size_t i = layer.data().index(x, y);
        layer.data().set_value(i, std::round(gen::uniform(rng, -100, 100)));
        layer.mask().set_value(i, ((x + y) % 2 == 0) == mask.at(x, y));
      }
    const TexturePlane display = resolve_display(layer);
    const auto rgba = display.as<Rgba8>();
    for (std::size_t i = 0; i < rgba.size(); ++i) {
      const Rgba8 expected = layer.mask().value(i) != 0
                                 ? to_rgba8(map_value_to_color(layer, layer.data().value(i)))
                                 : Rgba8{};
      ASSERT_EQ(rgba[i], expected) << i;
    }
  }
}

TEST(ResolveDisplay, CheckerboardMatchesMask) {
  TexturePool pool;
  InformationLayer layer = create_layer(pool, numeric_spec(16, ElementKind::kInt8, {0, 1}));
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) layer.mask().set_value(layer.mask().index(x, y), (x + y) % 2);
  const TexturePlane display = resolve_display(layer);
  const auto rgba = display.as<Rgba8>();
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      EXPECT_EQ(rgba[layer.mask().index(x, y)].a, (x + y) % 2 ? 255 : 0);
}

TEST(ResolveDisplay, RectMatchesFullPlane) {
  TexturePool pool;
  InformationLayer layer = create_layer(pool, numeric_spec(20, ElementKind::kInt8, {0, 19}));
  for (std::size_t i = 0; i < 400; i += 3) {
    layer.data().set_value(i, static_cast<double>(i % 20));
    layer.mask().set_value(i, 1);
  }
  const TexturePlane display = resolve_display(layer);
  const auto full = display.as<Rgba8>();
  const TexelRect r{3, 5, 9, 7};
  const auto part = resolve_display_rect(layer, r);
  for (int y = 0; y < r.height; ++y)
    for (int x = 0; x < r.width; ++x)
      EXPECT_EQ(part[static_cast<std::size_t>(y * r.width + x)],
                full[layer.data().index(r.x + x, r.y + y)]);
  EXPECT_THROW(resolve_display_rect(layer, {15, 0, 6, 1}), Error);
}

TEST(CheckedLayerValue, Rules) {
  TexturePool pool;
  const InformationLayer i8 = create_layer(pool, numeric_spec(2, ElementKind::kInt8));
  EXPECT_EQ(checked_layer_value(i8, -128), -128);
  EXPECT_EQ(code_of([&] { checked_layer_value(i8, 128); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { checked_layer_value(i8, 1.5); }), ErrorCode::kInvalidArgument);
  const InformationLayer f16 = create_layer(pool, numeric_spec(2, ElementKind::kFloat16));
  EXPECT_EQ(checked_layer_value(f16, 0.1), half_bits_to_float(float_to_half_bits(0.1f)));
  LayerSpec db = numeric_spec(2, ElementKind::kUInt32);
  db.kind = LayerKind::kDatabase;
  db.table = "t";
  const InformationLayer keys = create_layer(pool, db, [](std::string_view) { return true; });
  EXPECT_EQ(code_of([&] { checked_layer_value(keys, 0); }), ErrorCode::kReservedKey);
  EXPECT_EQ(checked_layer_value(keys, 4294967295.0), 4294967295.0);
}
