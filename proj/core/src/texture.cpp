#include "texlayer/texture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>

namespace texlayer {

namespace {

template <class T>
T saturate(double v) {
  if (std::isnan(v)) return T{0};
  const double r = std::nearbyint(v);
  if (r <= static_cast<double>(std::numeric_limits<T>::lowest())) {
    return std::numeric_limits<T>::lowest();
  }
  if (r >= static_cast<double>(std::numeric_limits<T>::max())) {
    return std::numeric_limits<T>::max();
  }
  return static_cast<T>(r);
}

template <class T>
T load(const std::byte* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <class T>
void store(std::byte* p, T v) {
  std::memcpy(p, &v, sizeof(T));
}

}  // namespace

TexturePlane::TexturePlane(int width, int height, ElementKind kind)
    : width_(width), height_(height), kind_(kind) {
  if (width < 0 || height < 0) {
    fail(ErrorCode::kInvalidArgument, "texture plane dimensions must be >= 0");
  }
  storage_.resize(texel_count() * element_size(kind));
}

void TexturePlane::check_view(std::size_t element_bytes) const {
  if (element_bytes != element_size(kind_)) {
    fail(ErrorCode::kInvalidArgument, "typed view does not match element kind");
  }
}

double TexturePlane::value(std::size_t i) const {
  const std::byte* p = storage_.data() + i * element_size(kind_);
  switch (kind_) {
    case ElementKind::kInt8: return load<std::int8_t>(p);
    case ElementKind::kInt16: return load<std::int16_t>(p);
    case ElementKind::kInt32: return load<std::int32_t>(p);
    case ElementKind::kUInt8: return load<std::uint8_t>(p);
    case ElementKind::kUInt32: return load<std::uint32_t>(p);
    case ElementKind::kFloat16: return half_bits_to_float(load<std::uint16_t>(p));
    case ElementKind::kFloat32: return load<float>(p);
    case ElementKind::kBool: return load<std::uint8_t>(p) != 0 ? 1.0 : 0.0;
    case ElementKind::kRgba8: return load<std::uint32_t>(p);
  }
  return 0.0;
}

void TexturePlane::set_value(std::size_t i, double v) {
  std::byte* p = storage_.data() + i * element_size(kind_);
  switch (kind_) {
    case ElementKind::kInt8: store(p, saturate<std::int8_t>(v)); break;
    case ElementKind::kInt16: store(p, saturate<std::int16_t>(v)); break;
    case ElementKind::kInt32: store(p, saturate<std::int32_t>(v)); break;
    case ElementKind::kUInt8: store(p, saturate<std::uint8_t>(v)); break;
    case ElementKind::kUInt32: store(p, saturate<std::uint32_t>(v)); break;
    case ElementKind::kFloat16:
      store(p, float_to_half_bits(static_cast<float>(v)));
      break;
    case ElementKind::kFloat32: store(p, static_cast<float>(v)); break;
    case ElementKind::kBool: store(p, static_cast<std::uint8_t>(v != 0.0 ? 1 : 0)); break;
    case ElementKind::kRgba8: store(p, saturate<std::uint32_t>(v)); break;
  }
}

void TexturePlane::fill_zero() { std::fill(storage_.begin(), storage_.end(), std::byte{0}); }

bool TexturePlane::operator==(const TexturePlane& other) const {
  return width_ == other.width_ && height_ == other.height_ && kind_ == other.kind_ &&
         storage_ == other.storage_;
}

std::size_t PoolKeyHash::operator()(const PoolKey& k) const noexcept {
  // width, height and kind joined into one 64-bit field
  const std::uint64_t joined = (static_cast<std::uint64_t>(k.width) << 36) ^
                               (static_cast<std::uint64_t>(k.height) << 8) ^
                               static_cast<std::uint64_t>(k.kind);
  return std::hash<std::uint64_t>{}(joined);
}

TexturePool::TexturePool(std::uint64_t texel_budget) : texel_budget_(texel_budget) {}

std::uint64_t TexturePool::default_texel_budget() {
  if (const char* env = std::getenv("TEXLAYER_TEXEL_BUDGET")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return kDefaultTexelBudget;
}

PlaneHandle TexturePool::acquire(int width, int height, ElementKind kind) {
  if (width < 1 || height < 1) {
    fail(ErrorCode::kInvalidArgument, "texture dimensions must be >= 1");
  }
  const PoolKey key{width, height, kind};
  auto it = arrays_.find(key);
  if (it != arrays_.end() && !it->second.free_slots.empty()) {
    TextureArray& array = it->second;
    const std::uint32_t slot = array.free_slots.back();
    array.free_slots.pop_back();
    array.in_use[slot] = true;
    array.slots[slot]->fill_zero();
    return {key, slot};
  }
  const std::uint64_t texels = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
  if (committed_texels_ + texels > texel_budget_) {
    fail(ErrorCode::kCapacityExceeded,
         "texel budget of " + std::to_string(texel_budget_) + " exceeded");
  }
  TextureArray& array = arrays_[key];
  array.slots.push_back(std::make_unique<TexturePlane>(width, height, kind));
  array.in_use.push_back(true);
  committed_texels_ += texels;
  return {key, static_cast<std::uint32_t>(array.slots.size() - 1)};
}

void TexturePool::release(const PlaneHandle& handle) {
  auto it = arrays_.find(handle.key);
  if (it == arrays_.end() || handle.slot >= it->second.slots.size() ||
      !it->second.in_use[handle.slot]) {
    fail(ErrorCode::kInvalidArgument, "release of an invalid plane handle");
  }
  it->second.in_use[handle.slot] = false;
  it->second.free_slots.push_back(handle.slot);
}

const TexturePool::TextureArray& TexturePool::array_for(const PlaneHandle& handle) const {
  auto it = arrays_.find(handle.key);
  if (it == arrays_.end() || handle.slot >= it->second.slots.size() ||
      !it->second.in_use[handle.slot]) {
    fail(ErrorCode::kInvalidArgument, "invalid plane handle");
  }
  return it->second;
}

TexturePlane& TexturePool::plane(const PlaneHandle& handle) {
  return *array_for(handle).slots[handle.slot];
}

const TexturePlane& TexturePool::plane(const PlaneHandle& handle) const {
  return *array_for(handle).slots[handle.slot];
}

std::size_t TexturePool::array_size(const PoolKey& key) const {
  auto it = arrays_.find(key);
  return it == arrays_.end() ? 0 : it->second.slots.size();
}

std::size_t TexturePool::live_planes() const {
  std::size_t n = 0;
  for (const auto& [key, array] : arrays_) {
    n += array.slots.size() - array.free_slots.size();
  }
  return n;
}

}  // namespace texlayer
