#pragma once

#include <cstdint>
#include <span>

#include "ire/bits.hpp"
#include "ire/common.hpp"
#include "ire/entropy.hpp"
#include "ire/randomness.hpp"

namespace ire {

inline constexpr std::uint64_t kMinRbsBits = 80;
inline constexpr std::uint64_t kDefaultRbsBits = std::uint64_t{1} << 23;

/// A finite random bit sequence read as a closed loop: the bit after the last
/// one is bit 0 again. Immutable once built.
class RbsLoop {
 public:
  /// Takes ceil(bit_length/8) MSB-first packed bytes; unused trailing bits of
  /// the last byte must be zero.
  RbsLoop(Bytes packed, std::uint64_t bit_length) : bytes_(std::move(packed)), length_(bit_length) {
    if (length_ < kMinRbsBits) throw Error(ErrorCode::rbs_too_short, std::to_string(length_) + " bits");
    if (bytes_.size() != packed_size(length_))
      throw Error(ErrorCode::length_mismatch, "packed RBS size does not match bit length");
    if ((bytes_.back() & static_cast<std::uint8_t>(~detail::last_byte_mask(length_))) != 0)
      throw Error(ErrorCode::nonzero_padding_bits, "RBS trailing bits");
  }

  static RbsLoop from_bits(const BitBuffer& bits) {
    Bytes b = bits.bytes();
    return RbsLoop(std::move(b), bits.size());
  }

  static constexpr std::uint64_t packed_size(std::uint64_t bit_length) noexcept {
    return bit_length / 8 + (bit_length % 8 != 0 ? 1 : 0);
  }

  std::uint64_t length() const noexcept { return length_; }
  const Bytes& packed() const noexcept { return bytes_; }

  bool bit_at(std::uint64_t i) const noexcept { return raw_bit(i % length_); }

  /// Bits offset, offset+1, ..., offset+n-1, wrapping; n may exceed length().
  BitBuffer fragment(std::uint64_t offset, std::size_t n) const {
    check_offset(offset);
    BitBuffer out(n);
    std::uint64_t p = offset;
    for (std::size_t i = 0; i < n; ++i) {
      out.set(i, raw_bit(p));
      if (++p == length_) p = 0;
    }
    return out;
  }

  /// XORs the loop starting at `offset` into `data`, byte by byte, and returns
  /// the loop position following the last bit consumed.
  std::uint64_t xor_into(std::span<std::uint8_t> data, std::uint64_t offset) const {
    check_offset(offset);
    std::uint64_t p = offset;
    for (auto& d : data) {
      d ^= byte_at(p);
      p += 8;
      if (p >= length_) p -= length_;
      // Loops shorter than 8 bits are rejected at construction.
    }
    return p;
  }

  void check_offset(std::uint64_t offset) const {
    if (offset >= length_)
      throw Error(ErrorCode::offset_out_of_range,
                  "offset " + std::to_string(offset) + " >= RBS length " + std::to_string(length_));
  }

  friend bool operator==(const RbsLoop&, const RbsLoop&) = default;

 private:
  bool raw_bit(std::uint64_t i) const noexcept { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1U; }

  // Eight bits starting at loop position p (p < length_), MSB first.
  std::uint8_t byte_at(std::uint64_t p) const noexcept {
    if (p + 8 <= length_) {
      const auto idx = static_cast<std::size_t>(p >> 3);
      const unsigned sh = static_cast<unsigned>(p & 7);
      if (sh == 0) return bytes_[idx];
      return static_cast<std::uint8_t>((bytes_[idx] << sh) | (bytes_[idx + 1] >> (8 - sh)));
    }
    std::uint8_t v = 0;
    for (int k = 0; k < 8; ++k) {
      v = static_cast<std::uint8_t>((v << 1) | static_cast<std::uint8_t>(raw_bit(p)));
      if (++p == length_) p = 0;
    }
    return v;
  }

  Bytes bytes_;
  std::uint64_t length_;
};

inline bool rbs_bit_at(const RbsLoop& r, std::uint64_t i) noexcept { return r.bit_at(i); }

inline BitBuffer rbs_fragment(const RbsLoop& r, std::uint64_t offset, std::size_t n) { return r.fragment(offset, n); }

/// Start position for one encryption, uniform over the loop.
template <EntropySource E>
std::uint64_t choose_offset(E& entropy, std::uint64_t loop_bits) {
  if (loop_bits == 0) throw Error(ErrorCode::invalid_argument, "loop length 0");
  return uniform_below(entropy, loop_bits);
}

/// Draws `bits` random bits. Loops of at least 100 bits must pass the monobit
/// test; a failing draw is retried up to `attempts` times before giving up.
template <EntropySource E>
RbsLoop generate_rbs(E& entropy, std::uint64_t bits, int attempts = 4) {
  if (bits < kMinRbsBits) throw Error(ErrorCode::invalid_argument, "RBS must be at least 80 bits");
  double last_p = 0.0;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    Bytes packed(static_cast<std::size_t>(RbsLoop::packed_size(bits)));
    entropy.fill(packed);
    packed.back() &= detail::last_byte_mask(bits);
    RbsLoop loop(std::move(packed), bits);
    if (bits < kMinTestBits) return loop;
    BitBuffer view = BitBuffer::from_bytes(loop.packed());
    // Trailing pad bits are zero; test only the real ones.
    if (bits % 8 != 0) view = loop.fragment(0, static_cast<std::size_t>(bits));
    const auto verdict = monobit_test(view);
    if (verdict.pass) return loop;
    last_p = verdict.p_value;
  }
  throw Error(ErrorCode::randomness_gate, "last p-value " + std::to_string(last_p));
}

/// Reads an externally generated MSB-first packed bit file. `bits` defaults
/// to every bit in the file.
inline RbsLoop import_raw_rbs(ByteView file, std::uint64_t bits = 0) {
  if (bits == 0) bits = static_cast<std::uint64_t>(file.size()) * 8;
  if (RbsLoop::packed_size(bits) > file.size()) throw Error(ErrorCode::truncated, "raw RBS file too short");
  Bytes packed(file.begin(), file.begin() + static_cast<std::ptrdiff_t>(RbsLoop::packed_size(bits)));
  if (!packed.empty()) packed.back() &= detail::last_byte_mask(bits);
  return RbsLoop(std::move(packed), bits);
}

}  // namespace ire
