#pragma once

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "texlayer/error.hpp"

namespace texlayer::io_detail {

class Writer {
 public:
  template <class T>
  void put(T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    out_.append(reinterpret_cast<const char*>(buf), sizeof(T));
  }
  void put_bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  template <class T>
  void put_array(std::span<const T> values) {
    if constexpr (std::endian::native == std::endian::little || sizeof(T) == 1) {
      put_bytes(values.data(), values.size_bytes());
    } else {
      for (const T& v : values) put(v);
    }
  }
  void put_string(const std::string& s) {
    if (s.size() > 0xFFFF) fail(ErrorCode::kInvalidArgument, "string longer than 65535 bytes");
    put(static_cast<std::uint16_t>(s.size()));
    put_bytes(s.data(), s.size());
  }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    need(sizeof(T));
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
  }
  std::span<const std::byte> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  template <class T>
  std::vector<T> get_array(std::uint64_t count) {
    if (count > (bytes_.size() - pos_) / sizeof(T)) {
      fail(ErrorCode::kTruncatedStream, "stream is truncated");
    }
    std::vector<T> out(static_cast<std::size_t>(count));
    if constexpr (std::endian::native == std::endian::little || sizeof(T) == 1) {
      const auto raw = take(out.size() * sizeof(T));
      std::memcpy(out.data(), raw.data(), raw.size());
    } else {
      for (T& v : out) v = get<T>();
    }
    return out;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::string get_string() {
    const auto n = get<std::uint16_t>();
    const auto s = take(n);
    return {reinterpret_cast<const char*>(s.data()), s.size()};
  }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) fail(ErrorCode::kTruncatedStream, "stream is truncated");
  }

  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

inline std::uint32_t crc32_of(const void* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  const auto* p = static_cast<const Bytef*>(data);
  while (n > 0) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, p, chunk);
    p += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace texlayer::io_detail
