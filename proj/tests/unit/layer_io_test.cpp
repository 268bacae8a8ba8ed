#include <gtest/gtest.h>

#include <cstring>

#include "generators.hpp"
#include "replay.hpp"
#include "texlayer/error.hpp"
#include "texlayer/layer_io.hpp"

using namespace texlayer;

namespace {

ErrorCode load_error(const std::string& bytes) {
  TexturePool pool;
  try {
    load_layer(bytes, pool);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "load succeeded";
  return ErrorCode::kIoError;
}

InformationLayer random_layer(TexturePool& pool, gen::Rng& rng) {
  static constexpr ElementKind kinds[] = {ElementKind::kInt8, ElementKind::kInt16,
                                          ElementKind::kInt32, ElementKind::kFloat16,
                                          ElementKind::kFloat32};
  LayerSpec s;
  s.name = "layer-" + std::to_string(gen::uniform_int(rng, 0, 9999));
  s.width = gen::uniform_int(rng, 1, 70);
  s.height = gen::uniform_int(rng, 1, 70);
  const bool db = gen::uniform_int(rng, 0, 4) == 0;
  if (db) {
    s.kind = LayerKind::kDatabase;
    s.table = "table_" + std::to_string(gen::uniform_int(rng, 0, 99));
  } else {
    s.element = kinds[gen::uniform_int(rng, 0, 4)];
  }
  const double lo = gen::uniform(rng, -1000, 0);
  s.limits = {lo, lo + gen::uniform(rng, 0.5, 2000)};
  s.palette = Palette::create({{0.0f, {0.1f, 0.2f, 0.3f, 1.0f}},
                               {static_cast<float>(gen::uniform(rng, 0.1, 0.9)), {1, 0, 0, 0.5f}},
                               {1.0f, {0, 1, 0.25f, 1}}});
  InformationLayer layer = create_layer(pool, s, [](std::string_view) { return true; });
  auto bytes = layer.data().bytes();
  for (auto& b : bytes) b = static_cast<std::byte>(gen::uniform_int(rng, 0, 255));
  if (layer.element() == ElementKind::kFloat16 || layer.element() == ElementKind::kFloat32) {
    for (std::size_t i = 0; i < layer.data().texel_count(); ++i)
      layer.data().set_value(i, gen::uniform(rng, -1e4, 1e4));
  }
  for (std::size_t i = 0; i < layer.mask().texel_count(); ++i)
    layer.mask().set_value(i, gen::uniform_int(rng, 0, 2) == 0);
  return layer;
}

std::string sample_file() {
  TexturePool pool;
  gen::Rng rng(1);
  return save_layer(random_layer(pool, rng));
}

}  // namespace

TEST(LayerIo, RandomLayersRoundTripBitExact) {
  gen::Rng rng(55);
  TexturePool pool;
  for (int i = 0; i < 50; ++i) {
    const InformationLayer layer = random_layer(pool, rng);
    const std::string bytes = save_layer(layer);
    const InformationLayer back = load_layer(bytes, pool);
    EXPECT_EQ(back.name(), layer.name());
    EXPECT_EQ(back.kind(), layer.kind());
    EXPECT_EQ(back.element(), layer.element());
    EXPECT_EQ(back.table(), layer.table());
    EXPECT_EQ(back.limits(), layer.limits());
    EXPECT_EQ(back.palette(), layer.palette());
    EXPECT_EQ(back.data(), layer.data());
    EXPECT_EQ(back.mask(), layer.mask());
    EXPECT_EQ(save_layer(back), bytes);
  }
}

TEST(LayerIo, HeaderLayout) {
  TexturePool pool;
  LayerSpec s;
  s.name = "ab";
  s.element = ElementKind::kInt16;
  s.width = 3;
  s.height = 2;
  s.limits = {-1.0, 2.0};
  InformationLayer layer = create_layer(pool, s);
  layer.mask().set_value(0, 1);
  layer.mask().set_value(5, 1);
  const std::string b = save_layer(layer);
  ASSERT_EQ(b.substr(0, 4), "L3DI");
  EXPECT_EQ(static_cast<std::uint8_t>(b[4]), 1);  // version, little-endian
  EXPECT_EQ(static_cast<std::uint8_t>(b[5]), 0);
  EXPECT_EQ(static_cast<std::uint8_t>(b[6]), 0);  // numeric
  EXPECT_EQ(static_cast<std::uint8_t>(b[7]), static_cast<std::uint8_t>(ElementKind::kInt16));
  std::uint32_t w, h;
  double lo, hi;
  std::memcpy(&w, b.data() + 8, 4);
  std::memcpy(&h, b.data() + 12, 4);
  std::memcpy(&lo, b.data() + 16, 8);
  std::memcpy(&hi, b.data() + 24, 8);
  EXPECT_EQ(w, 3u);
  EXPECT_EQ(h, 2u);
  EXPECT_EQ(lo, -1.0);
  EXPECT_EQ(hi, 2.0);
  // 2 points x 20 bytes, name, empty table, 12 data bytes, 1 mask byte, crc.
  const std::size_t expected = 32 + 2 + 40 + 2 + 2 + 2 + 12 + 1 + 4;
  ASSERT_EQ(b.size(), expected);
  EXPECT_EQ(static_cast<std::uint8_t>(b[expected - 5]), 0b100001);
}

TEST(LayerIo, CorruptMagicIsBadMagic) {
  std::string b = sample_file();
  b[0] = 'X';
  EXPECT_EQ(load_error(b), ErrorCode::kBadMagic);
}

TEST(LayerIo, UnknownVersion) {
  std::string b = sample_file();
  b[4] = 9;
  EXPECT_EQ(load_error(b), ErrorCode::kUnsupportedVersion);
}

TEST(LayerIo, TruncationAnywhereIsTruncatedStream) {
  const std::string b = sample_file();
  for (std::size_t n : {std::size_t{0}, std::size_t{3}, std::size_t{10}, std::size_t{40},
                        b.size() / 2, b.size() - 5, b.size() - 1}) {
    EXPECT_EQ(load_error(b.substr(0, n)), ErrorCode::kTruncatedStream) << n;
  }
}

TEST(LayerIo, FlippedPayloadBitIsChecksumMismatch) {
  std::string b = sample_file();
  b[b.size() - 20] ^= 0x10;
  EXPECT_EQ(load_error(b), ErrorCode::kChecksumMismatch);
}

TEST(LayerIo, FileRoundTrip) {
  const auto dir = replay::temp_dir("layer-io");
  TexturePool pool;
  gen::Rng rng(4);
  const InformationLayer layer = random_layer(pool, rng);
  save_layer_file(layer, dir / "a.l3di");
  const InformationLayer back = load_layer_file(dir / "a.l3di", pool);
  EXPECT_EQ(back.data(), layer.data());
  EXPECT_EQ(back.mask(), layer.mask());
  std::filesystem::remove_all(dir);
}
