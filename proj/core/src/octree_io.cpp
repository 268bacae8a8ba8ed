#include "texlayer/octree_io.hpp"

#include <fstream>
#include <sstream>

#include "binary_io.hpp"
#include "texlayer/error.hpp"

namespace texlayer {

namespace {

using io_detail::crc32_of;
using io_detail::Reader;
using io_detail::Writer;

constexpr char kMagic[4] = {'O', 'C', 'T', 'B'};

}  // namespace

struct OctreeSerializer {
  static void write(Writer& w, const SurfaceOctree& t) {
    w.put(static_cast<std::uint8_t>(t.depth_));
    w.put(static_cast<std::uint64_t>(t.leaf_count()));
    for (int k = 0; k < 3; ++k) w.put(t.root_.min[k]);
    for (int k = 0; k < 3; ++k) w.put(t.root_.max[k]);
    for (const auto& level : t.levels_) {
      w.put(static_cast<std::uint64_t>(level.first_child.size()));
      w.put_array(std::span<const std::uint32_t>(level.first_child));
      w.put_array(std::span<const std::uint8_t>(level.child_mask));
    }
    w.put(static_cast<std::uint64_t>(t.leaf_offsets_.size()));
    w.put_array(std::span<const std::uint32_t>(t.leaf_offsets_));
    w.put(static_cast<std::uint64_t>(t.leaf_triangles_.size()));
    w.put_array(std::span<const std::uint32_t>(t.leaf_triangles_));
    w.put(t.stats_.node_count);
    w.put(t.stats_.build_ms);
    w.put(t.stats_.peak_bytes);
  }

  static SurfaceOctree read(Reader& r) {
    SurfaceOctree t;
    t.depth_ = r.get<std::uint8_t>();
    if (t.depth_ > kMaxOctreeDepth) fail(ErrorCode::kInvalidArgument, "octree depth out of range");
    const auto leaves = r.get<std::uint64_t>();
    for (int k = 0; k < 3; ++k) t.root_.min[k] = r.get<double>();
    for (int k = 0; k < 3; ++k) t.root_.max[k] = r.get<double>();
    std::uint64_t expected = 1;
    for (int level = 0; level < t.depth_; ++level) {
      SurfaceOctree::Level lv;
      const auto n = r.get<std::uint64_t>();
      if (n != expected) fail(ErrorCode::kInvalidArgument, "octree level size is inconsistent");
      lv.first_child = r.get_array<std::uint32_t>(n);
      lv.child_mask = r.get_array<std::uint8_t>(n);
      expected = 0;
      for (std::uint8_t m : lv.child_mask) expected += static_cast<std::uint64_t>(std::popcount(m));
      t.levels_.push_back(std::move(lv));
    }
    const auto offsets = r.get<std::uint64_t>();
    if (offsets != leaves + 1 || leaves != expected) {
      fail(ErrorCode::kInvalidArgument, "octree leaf count is inconsistent");
    }
    t.leaf_offsets_ = r.get_array<std::uint32_t>(offsets);
    t.leaf_triangles_ = r.get_array<std::uint32_t>(r.get<std::uint64_t>());
    if (t.leaf_offsets_.back() != t.leaf_triangles_.size()) {
      fail(ErrorCode::kInvalidArgument, "octree triangle references are inconsistent");
    }
    t.stats_.node_count = r.get<std::uint64_t>();
    t.stats_.build_ms = r.get<double>();
    t.stats_.peak_bytes = r.get<std::uint64_t>();
    t.stats_.leaf_count = t.leaf_count();
    t.stats_.triangle_refs = t.leaf_triangles_.size();
    std::uint64_t internal = 0;
    for (const auto& lv : t.levels_) internal += lv.first_child.size() * 5;
    t.stats_.structure_bytes =
        internal + (t.leaf_offsets_.size() + t.leaf_triangles_.size()) * sizeof(std::uint32_t);
    return t;
  }
};

std::string save_octree(const SurfaceOctree& octree, const OctreeLayer* layer) {
  Writer w;
  w.put_bytes(kMagic, 4);
  w.put(kOctreeFileVersion);
  OctreeSerializer::write(w, octree);
  w.put(static_cast<std::uint8_t>(layer != nullptr ? 1 : 0));
  if (layer != nullptr) {
    if (layer->size() != octree.leaf_count()) {
      fail(ErrorCode::kLayerMeshMismatch, "octree layer does not match the octree");
    }
    w.put(static_cast<std::uint8_t>(layer->element()));
    const auto points = layer->palette().points();
    w.put(static_cast<std::uint16_t>(points.size()));
    for (const ControlPoint& p : points) {
      w.put(p.position);
      w.put(p.color.r);
      w.put(p.color.g);
      w.put(p.color.b);
      w.put(p.color.a);
    }
    w.put(layer->limits().lower);
    w.put(layer->limits().upper);
    const auto raw = layer->values().bytes();
    w.put_bytes(raw.data(), raw.size());
    w.put_array(std::span<const std::uint8_t>(layer->validity()));
  }
  w.put(crc32_of(w.str().data(), w.str().size()));
  return std::move(w.str());
}

OctreeBundle load_octree(const std::string& bytes) {
  const auto span = std::as_bytes(std::span(bytes.data(), bytes.size()));
  Reader r(span);
  const auto magic = r.take(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) fail(ErrorCode::kBadMagic, "not an octree file");
  const auto version = r.get<std::uint16_t>();
  if (version != kOctreeFileVersion) {
    fail(ErrorCode::kUnsupportedVersion, "unsupported octree file version " + std::to_string(version));
  }
  if (bytes.size() < 10) fail(ErrorCode::kTruncatedStream, "stream is truncated");
  const std::uint32_t stored = Reader(span.last(4)).get<std::uint32_t>();
  const bool crc_ok = stored == crc32_of(bytes.data(), bytes.size() - 4);

  try {
    OctreeBundle out{OctreeSerializer::read(r), std::nullopt};
    if (r.get<std::uint8_t>() != 0) {
      const auto element = element_kind_from_code(r.get<std::uint8_t>());
      if (!element) fail(ErrorCode::kInvalidArgument, "bad element kind");
      std::vector<ControlPoint> points(r.get<std::uint16_t>());
      for (ControlPoint& p : points) {
        p.position = r.get<float>();
        p.color.r = r.get<float>();
        p.color.g = r.get<float>();
        p.color.b = r.get<float>();
        p.color.a = r.get<float>();
      }
      const double lower = r.get<double>();
      const double upper = r.get<double>();
      if (!crc_ok) fail(ErrorCode::kChecksumMismatch, "octree checksum mismatch");
      OctreeLayer layer(out.octree.leaf_count(), *element, Palette::create(std::move(points)),
                        {lower, upper});
      const auto raw = r.take(layer.values().bytes().size());
      std::memcpy(layer.values().bytes().data(), raw.data(), raw.size());
      layer.validity() = r.get_array<std::uint8_t>(layer.size());
      out.layer = std::move(layer);
    }
    if (r.remaining() != 4) fail(ErrorCode::kTruncatedStream, "octree stream has trailing data");
    if (!crc_ok) fail(ErrorCode::kChecksumMismatch, "octree checksum mismatch");
    return out;
  } catch (const Error& e) {
    // corrupted structure fields surface as a checksum failure
    if (!crc_ok && e.code() != ErrorCode::kTruncatedStream) {
      fail(ErrorCode::kChecksumMismatch, "octree checksum mismatch");
    }
    throw;
  }
}

void save_octree_file(const std::filesystem::path& path, const SurfaceOctree& octree,
                      const OctreeLayer* layer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
  const std::string bytes = save_octree(octree, layer);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIoError, "write failed for " + path.string());
}

OctreeBundle load_octree_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_octree(ss.str());
}

}  // namespace texlayer
