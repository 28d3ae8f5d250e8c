#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace edap {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

template <std::size_t N>
using ByteArray = std::array<std::uint8_t, N>;

inline void store_be64(std::uint8_t* out, std::uint64_t v) noexcept {
  for (int i = 7; i >= 0; --i) {
    out[i] = static_cast<std::uint8_t>(v);
    v >>= 8;
  }
}

inline std::uint64_t load_be64(const std::uint8_t* in) noexcept {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in[i];
  return v;
}

inline void store_le64(std::uint8_t* out, std::uint64_t v) noexcept {
  for (int i = 0; i < 8; ++i) {
    out[i] = static_cast<std::uint8_t>(v);
    v >>= 8;
  }
}

inline std::uint64_t load_le64(const std::uint8_t* in) noexcept {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | in[i];
  return v;
}

/// Append-only big-endian writer used by every binary format in the project.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
    buf_.push_back(static_cast<std::uint8_t>(v));
  }
  void u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void u64(std::uint64_t v) {
    std::uint8_t tmp[8];
    store_be64(tmp, v);
    buf_.insert(buf_.end(), tmp, tmp + 8);
  }
  void raw(ByteView b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

  const Bytes& bytes() const& noexcept { return buf_; }
  Bytes take() && noexcept { return std::move(buf_); }

 private:
  Bytes buf_;
};

/// Bounds-checked big-endian reader; throws ParseError on truncation.
class ByteReader {
 public:
  explicit ByteReader(ByteView in) : in_(in) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  ByteView raw(std::size_t n);

  std::size_t remaining() const noexcept { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const;

  ByteView in_;
  std::size_t pos_ = 0;
};

std::string to_hex(ByteView b);
Bytes from_hex(std::string_view hex);

/// True if `needle` occurs as a contiguous substring of `haystack`.
bool contains_subsequence(ByteView haystack, ByteView needle);

Bytes read_file(const std::string& path);
void write_file(const std::string& path, ByteView data);

}  // namespace edap
