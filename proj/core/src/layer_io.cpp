#include "texlayer/layer_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "binary_io.hpp"
#include "texlayer/error.hpp"

namespace texlayer {

namespace {

using io_detail::crc32_of;
using io_detail::Reader;
using io_detail::Writer;

constexpr char kMagic[4] = {'L', '3', 'D', 'I'};

void append_plane_le(Writer& w, const TexturePlane& plane) {
  const std::size_t es = element_size(plane.kind());
  const auto bytes = plane.bytes();
  if (es == 1 || std::endian::native == std::endian::little || plane.kind() == ElementKind::kRgba8) {
    w.put_bytes(bytes.data(), bytes.size());
    return;
  }
  std::vector<unsigned char> tmp(bytes.size());
  std::memcpy(tmp.data(), bytes.data(), bytes.size());
  for (std::size_t i = 0; i < tmp.size(); i += es) std::reverse(tmp.begin() + i, tmp.begin() + i + es);
  w.put_bytes(tmp.data(), tmp.size());
}

}  // namespace

std::string save_layer(const InformationLayer& layer) {
  Writer w;
  w.put_bytes(kMagic, 4);
  w.put(kLayerFileVersion);
  w.put(static_cast<std::uint8_t>(layer.kind()));
  w.put(static_cast<std::uint8_t>(layer.element()));
  w.put(static_cast<std::uint32_t>(layer.width()));
  w.put(static_cast<std::uint32_t>(layer.height()));
  w.put(layer.limits().lower);
  w.put(layer.limits().upper);
  const auto points = layer.palette().points();
  w.put(static_cast<std::uint16_t>(points.size()));
  for (const ControlPoint& p : points) {
    w.put(p.position);
    w.put(p.color.r);
    w.put(p.color.g);
    w.put(p.color.b);
    w.put(p.color.a);
  }
  w.put_string(layer.name());
  w.put_string(layer.table());
  append_plane_le(w, layer.data());

  const auto mask = layer.mask().as<std::uint8_t>();
  std::vector<std::uint8_t> packed((mask.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] != 0) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  w.put_bytes(packed.data(), packed.size());
  w.put(crc32_of(w.str().data(), w.str().size()));
  return std::move(w.str());
}

InformationLayer load_layer(std::span<const std::byte> bytes, TexturePool& pool) {
  Reader r(bytes);
  const auto magic = r.take(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) fail(ErrorCode::kBadMagic, "not a layer file");
  const auto version = r.get<std::uint16_t>();
  if (version != kLayerFileVersion) {
    fail(ErrorCode::kUnsupportedVersion, "unsupported layer file version " + std::to_string(version));
  }
  const auto kind_code = r.get<std::uint8_t>();
  const auto element_code = r.get<std::uint8_t>();
  const auto width = r.get<std::uint32_t>();
  const auto height = r.get<std::uint32_t>();
  const auto lower = r.get<double>();
  const auto upper = r.get<double>();
  const auto point_count = r.get<std::uint16_t>();
  std::vector<ControlPoint> points(point_count);
  for (ControlPoint& p : points) {
    p.position = r.get<float>();
    p.color.r = r.get<float>();
    p.color.g = r.get<float>();
    p.color.b = r.get<float>();
    p.color.a = r.get<float>();
  }
  std::string name = r.get_string();
  std::string table = r.get_string();

  const auto element = element_kind_from_code(element_code);
  if (!element || kind_code > 1 || width == 0 || height == 0 || width > (1u << 20) ||
      height > (1u << 20)) {
    // header fields are covered by the checksum; report corruption when the
    // trailer disagrees, otherwise a semantic error
    const std::size_t header_end = r.position();
    if (bytes.size() >= header_end + 4) {
      const std::uint32_t stored = [&] {
        std::uint32_t v;
        std::memcpy(&v, bytes.data() + bytes.size() - 4, 4);
        return v;
      }();
      if (stored != crc32_of(bytes.data(), bytes.size() - 4)) {
        fail(ErrorCode::kChecksumMismatch, "layer checksum mismatch");
      }
    }
    fail(ErrorCode::kInvalidArgument, "layer header holds invalid values");
  }
  const std::size_t texels = static_cast<std::size_t>(width) * height;
  const auto data_bytes = r.take(texels * element_size(*element));
  const auto mask_bytes = r.take((texels + 7) / 8);
  const std::size_t payload_end = r.position();
  const auto stored_crc = r.get<std::uint32_t>();
  if (stored_crc != crc32_of(bytes.data(), payload_end)) {
    fail(ErrorCode::kChecksumMismatch, "layer checksum mismatch");
  }

  LayerSpec spec;
  spec.name = std::move(name);
  spec.kind = static_cast<LayerKind>(kind_code);
  spec.element = *element;
  spec.width = static_cast<int>(width);
  spec.height = static_cast<int>(height);
  spec.palette = Palette::create(std::move(points));
  spec.limits = {lower, upper};
  spec.table = std::move(table);
  if (!(lower < upper)) fail(ErrorCode::kInvalidArgument, "layer limits need lower < upper");

  InformationLayer layer(pool, std::move(spec));
  auto dst = layer.data().bytes();
  std::memcpy(dst.data(), data_bytes.data(), dst.size());
  const std::size_t es = element_size(*element);
  if constexpr (std::endian::native == std::endian::big) {
    if (es > 1 && *element != ElementKind::kRgba8) {
      for (std::size_t i = 0; i < dst.size(); i += es) std::reverse(dst.begin() + i, dst.begin() + i + es);
    }
  }
  auto mask = layer.mask().as<std::uint8_t>();
  for (std::size_t i = 0; i < texels; ++i) {
    mask[i] = (static_cast<std::uint8_t>(mask_bytes[i / 8]) >> (i % 8)) & 1u;
  }
  return layer;
}

InformationLayer load_layer(const std::string& bytes, TexturePool& pool) {
  return load_layer(std::as_bytes(std::span(bytes.data(), bytes.size())), pool);
}

void save_layer_file(const InformationLayer& layer, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  const std::string bytes = save_layer(layer);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIoError, "write failed for " + path.string());
}

InformationLayer load_layer_file(const std::filesystem::path& path, TexturePool& pool) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_layer(ss.str(), pool);
}

}  // namespace texlayer
