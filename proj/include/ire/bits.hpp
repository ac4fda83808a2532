#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

#include "ire/common.hpp"

namespace ire {

/// Packed bit sequence. Bit 0 is the most significant bit of byte 0, so the
/// textual form "1011..." reads left to right in buffer order.
class BitBuffer {
 public:
  BitBuffer() = default;
  explicit BitBuffer(std::size_t bit_count) : bytes_((bit_count + 7) / 8, 0), size_(bit_count) {}

  /// Wraps whole bytes; bit count is 8 * bytes.size().
  static BitBuffer from_bytes(Bytes bytes) {
    BitBuffer b;
    b.size_ = bytes.size() * 8;
    b.bytes_ = std::move(bytes);
    return b;
  }

  /// Parses a string of '0'/'1' characters; anything else is an error.
  static BitBuffer from_string(std::string_view s) {
    BitBuffer b(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '0' && s[i] != '1') throw Error(ErrorCode::invalid_argument, "bit string");
      b.set(i, s[i] == '1');
    }
    return b;
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool operator[](std::size_t i) const noexcept { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1U; }

  void set(std::size_t i, bool v) noexcept {
    const auto mask = static_cast<std::uint8_t>(0x80U >> (i & 7));
    if (v)
      bytes_[i >> 3] |= mask;
    else
      bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
  }

  void push_back(bool v) {
    if ((size_ & 7) == 0) bytes_.push_back(0);
    ++size_;
    set(size_ - 1, v);
  }

  void append(const BitBuffer& other) {
    for (std::size_t i = 0; i < other.size(); ++i) push_back(other[i]);
  }

  std::size_t popcount() const noexcept {
    std::size_t n = 0;
    for (auto b : bytes_) n += static_cast<std::size_t>(std::popcount(b));
    return n;
  }

  const Bytes& bytes() const noexcept { return bytes_; }
  Bytes& bytes() noexcept { return bytes_; }

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
      if ((*this)[i]) s[i] = '1';
    return s;
  }

  friend bool operator==(const BitBuffer& a, const BitBuffer& b) {
    if (a.size_ != b.size_) return false;
    for (std::size_t i = 0; i < a.size_; ++i)
      if (a[i] != b[i]) return false;
    return true;
  }

 private:
  Bytes bytes_;
  std::size_t size_ = 0;
};

}  // namespace ire
