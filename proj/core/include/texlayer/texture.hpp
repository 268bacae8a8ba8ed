#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "texlayer/element.hpp"
#include "texlayer/error.hpp"

namespace texlayer {

/// A 2D grid of texels of one element kind, stored row-major with row 0 at
/// the bottom of texture space (v = 0).
class TexturePlane {
 public:
  TexturePlane(int width, int height, ElementKind kind);

  int width() const { return width_; }
  int height() const { return height_; }
  ElementKind kind() const { return kind_; }
  std::size_t texel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  std::span<std::byte> bytes() { return storage_; }
  std::span<const std::byte> bytes() const { return storage_; }

  /// Typed view. T must match the storage type of the element kind
  /// (uint16_t for float16, uint8_t for bool, Rgba8 for rgba8).
  template <class T>
  std::span<T> as() {
    check_view(sizeof(T));
    return {reinterpret_cast<T*>(storage_.data()), texel_count()};
  }
  template <class T>
  std::span<const T> as() const {
    check_view(sizeof(T));
    return {reinterpret_cast<const T*>(storage_.data()), texel_count()};
  }

  /// Numeric read of any non-rgba kind.
  double value(std::size_t index) const;
  /// Numeric write with the kind's conversion (rounding and saturation for
  /// integers, binary16 rounding for float16). rgba8 takes a packed
  /// 0xAABBGGRR integer.
  void set_value(std::size_t index, double v);

  void fill_zero();

  bool operator==(const TexturePlane& other) const;

 private:
  void check_view(std::size_t element_bytes) const;

  int width_;
  int height_;
  ElementKind kind_;
  std::vector<std::byte> storage_;
};

struct PoolKey {
  int width = 0;
  int height = 0;
  ElementKind kind = ElementKind::kUInt8;
  bool operator==(const PoolKey&) const = default;
};

struct PoolKeyHash {
  std::size_t operator()(const PoolKey& k) const noexcept;
};

struct PlaneHandle {
  PoolKey key;
  std::uint32_t slot = 0;
  bool operator==(const PlaneHandle&) const = default;
};

/// Texture arrays keyed by (width, height, kind). Storage for a key is only
/// committed on its first acquire; released slots are recycled.
class TexturePool {
 public:
  static constexpr std::uint64_t kDefaultTexelBudget = 512ull * 1024 * 1024;

  explicit TexturePool(std::uint64_t texel_budget = default_texel_budget());
  TexturePool(const TexturePool&) = delete;
  TexturePool& operator=(const TexturePool&) = delete;

  /// Reads TEXLAYER_TEXEL_BUDGET (texels) when set, else kDefaultTexelBudget.
  static std::uint64_t default_texel_budget();

  PlaneHandle acquire(int width, int height, ElementKind kind);
  void release(const PlaneHandle& handle);

  TexturePlane& plane(const PlaneHandle& handle);
  const TexturePlane& plane(const PlaneHandle& handle) const;

  std::size_t key_count() const { return arrays_.size(); }
  /// Slots (live plus free) in the array for a key; 0 when the key is unknown.
  std::size_t array_size(const PoolKey& key) const;
  std::size_t live_planes() const;
  std::uint64_t committed_texels() const { return committed_texels_; }
  std::uint64_t texel_budget() const { return texel_budget_; }

 private:
  struct TextureArray {
    std::vector<std::unique_ptr<TexturePlane>> slots;
    std::vector<bool> in_use;
    std::vector<std::uint32_t> free_slots;
  };

  const TextureArray& array_for(const PlaneHandle& handle) const;

  std::unordered_map<PoolKey, TextureArray, PoolKeyHash> arrays_;
  std::uint64_t texel_budget_;
  std::uint64_t committed_texels_ = 0;
};

/// Owning reference to a pooled plane; releases the slot on destruction.
class PlaneLease {
 public:
  PlaneLease() = default;
  PlaneLease(TexturePool& pool, int width, int height, ElementKind kind)
      : pool_(&pool), handle_(pool.acquire(width, height, kind)) {}
  PlaneLease(PlaneLease&& other) noexcept { swap(other); }
  PlaneLease& operator=(PlaneLease&& other) noexcept {
    PlaneLease tmp(std::move(other));
    swap(tmp);
    return *this;
  }
  PlaneLease(const PlaneLease&) = delete;
  PlaneLease& operator=(const PlaneLease&) = delete;
  ~PlaneLease() {
    if (pool_ != nullptr) pool_->release(handle_);
  }

  bool valid() const { return pool_ != nullptr; }
  const PlaneHandle& handle() const { return handle_; }
  TexturePlane& operator*() const { return pool_->plane(handle_); }
  TexturePlane* operator->() const { return &pool_->plane(handle_); }

 private:
  void swap(PlaneLease& other) noexcept {
    std::swap(pool_, other.pool_);
    std::swap(handle_, other.handle_);
  }

  TexturePool* pool_ = nullptr;
  PlaneHandle handle_;
};

}  // namespace texlayer
