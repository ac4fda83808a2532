#pragma once

#include <algorithm>
#include <cstdint>
#include <span>

#include "ire/bits.hpp"
#include "ire/common.hpp"
#include "ire/entropy.hpp"
#include "ire/envelope.hpp"
#include "ire/keymat.hpp"
#include "ire/keystream.hpp"
#include "ire/window_kernels.hpp"

namespace ire {

inline constexpr std::uint8_t kPadByte = 0x20;

/// A message of at least 10 bytes and the number of 0x20 bytes that were
/// appended to reach that length.
struct PaddedMessage {
  Bytes bytes;
  std::uint8_t pad_count = 0;

  friend bool operator==(const PaddedMessage&, const PaddedMessage&) = default;
};

inline PaddedMessage pad(ByteView m) {
  PaddedMessage p{Bytes(m.begin(), m.end()), 0};
  if (p.bytes.size() < kMinPayload) {
    p.pad_count = static_cast<std::uint8_t>(kMinPayload - p.bytes.size());
    p.bytes.resize(kMinPayload, kPadByte);
  }
  return p;
}

/// Strips exactly pad_count bytes. The count travels with the ciphertext, so
/// a short message that really ends in spaces comes back intact.
inline Bytes unpad(const PaddedMessage& p) {
  if (p.bytes.size() < kMinPayload) throw Error(ErrorCode::payload_too_short, std::to_string(p.bytes.size()) + " bytes");
  if (p.pad_count > kMaxPadCount) throw Error(ErrorCode::invalid_pad_count, std::to_string(p.pad_count) + " > 10");
  if (p.pad_count == 0) return p.bytes;
  if (p.bytes.size() != kMinPayload) throw Error(ErrorCode::invalid_pad_count, "padding only applies to 10-byte messages");
  const auto keep = p.bytes.end() - p.pad_count;
  if (!std::all_of(keep, p.bytes.end(), [](std::uint8_t b) { return b == kPadByte; }))
    throw Error(ErrorCode::invalid_pad_count, "pad bytes are not 0x20");
  return Bytes(p.bytes.begin(), keep);
}

inline Bytes substitute(ByteView in, const SubstitutionTable& t) {
  Bytes out(in.size());
  const auto& f = t.forward_table();
  std::transform(in.begin(), in.end(), out.begin(), [&](std::uint8_t b) { return f[b]; });
  return out;
}

inline Bytes unsubstitute(ByteView in, const SubstitutionTable& t) {
  Bytes out(in.size());
  const auto& r = t.inverse_table();
  std::transform(in.begin(), in.end(), out.begin(), [&](std::uint8_t b) { return r[b]; });
  return out;
}

inline Bytes sliding_byte_permute(ByteView in, const WindowPermutation& p, WindowStats* stats = nullptr) {
  Bytes out(in.begin(), in.end());
  ByteWindowKernel(p, Direction::forward).apply(out, stats);
  return out;
}

inline Bytes sliding_byte_unpermute(ByteView in, const WindowPermutation& p, WindowStats* stats = nullptr) {
  Bytes out(in.begin(), in.end());
  ByteWindowKernel(p, Direction::backward).apply(out, stats);
  return out;
}

namespace detail {
inline void check_bit_buffer(const BitBuffer& b) {
  if (b.size() < kBitWindow) throw Error(ErrorCode::invalid_argument, "sliding bit permutation needs >= 80 bits");
  if (b.size() % 8 != 0) throw Error(ErrorCode::invalid_argument, "bit buffer must hold whole bytes");
}
}  // namespace detail

inline BitBuffer sliding_bit_permute(const BitBuffer& in, const WindowPermutation& p, WindowStats* stats = nullptr) {
  detail::check_bit_buffer(in);
  Bytes out = in.bytes();
  BitWindowKernel(p, Direction::forward).apply(out, stats);
  return BitBuffer::from_bytes(std::move(out));
}

inline BitBuffer sliding_bit_unpermute(const BitBuffer& in, const WindowPermutation& p, WindowStats* stats = nullptr) {
  detail::check_bit_buffer(in);
  Bytes out = in.bytes();
  BitWindowKernel(p, Direction::backward).apply(out, stats);
  return BitBuffer::from_bytes(std::move(out));
}

/// Combines whole bytes with the loop in place. Its own inverse.
inline void combine_in_place(std::span<std::uint8_t> data, const RbsLoop& rbs, std::uint64_t offset, CombineRule rule) {
  rbs.xor_into(data, offset);
  if (rule == CombineRule::A)
    for (auto& b : data) b = static_cast<std::uint8_t>(~b);
}

/// Bit i of the result is b[i] XOR rbs[offset+i] under rule B, and the
/// complement of that under rule A.
inline BitBuffer keystream_combine(const BitBuffer& b, const RbsLoop& rbs, std::uint64_t offset, CombineRule rule) {
  rbs.check_offset(offset);
  if (b.size() % 8 == 0) {
    Bytes out = b.bytes();
    combine_in_place(out, rbs, offset, rule);
    return BitBuffer::from_bytes(std::move(out));
  }
  BitBuffer out(b.size());
  const bool flip = rule == CombineRule::A;
  std::uint64_t p = offset;
  for (std::size_t i = 0; i < b.size(); ++i) {
    out.set(i, (b[i] != rbs.bit_at(p)) != flip);
    if (++p == rbs.length()) p = 0;
  }
  return out;
}

/// Encrypts and decrypts with one key set, reusing the precomputed window
/// kernels. The key set must outlive the Cipher.
class Cipher {
 public:
  explicit Cipher(const KeySet& k)
      : key_(k),
        byte_fwd_(k.byte_permutation(), Direction::forward),
        byte_back_(k.byte_permutation(), Direction::backward),
        bit_fwd_(k.bit_permutation(), Direction::forward),
        bit_back_(k.bit_permutation(), Direction::backward) {}

  /// pad, substitute, slide bytes, slide bits, combine with the loop.
  CipherEnvelope encrypt(ByteView message, std::uint64_t offset, WindowStats* stats = nullptr) const {
    key_.rbs().check_offset(offset);
    PaddedMessage p = pad(message);
    CipherEnvelope e;
    e.rule = key_.rule();
    e.pad_count = p.pad_count;
    e.start_offset = offset;
    e.payload = substitute(p.bytes, key_.substitution());
    byte_fwd_.apply(e.payload, stats);
    bit_fwd_.apply(e.payload, stats);
    combine_in_place(e.payload, key_.rbs(), offset, key_.rule());
    return e;
  }

  template <EntropySource E>
  CipherEnvelope encrypt(ByteView message, E& entropy) const {
    return encrypt(message, choose_offset(entropy, key_.rbs().length()));
  }

  /// The same stages undone in reverse order.
  Bytes decrypt(const CipherEnvelope& e, WindowStats* stats = nullptr) const {
    validate_envelope(e);
    if (e.rule != key_.rule())
      throw Error(ErrorCode::rule_mismatch, std::string("envelope rule ") + rule_name(e.rule) + ", key set rule " + rule_name(key_.rule()));
    key_.rbs().check_offset(e.start_offset);
    Bytes work = e.payload;
    combine_in_place(work, key_.rbs(), e.start_offset, key_.rule());
    bit_back_.apply(work, stats);
    byte_back_.apply(work, stats);
    return unpad(PaddedMessage{unsubstitute(work, key_.substitution()), e.pad_count});
  }

  const KeySet& keyset() const noexcept { return key_; }

 private:
  const KeySet& key_;
  ByteWindowKernel byte_fwd_;
  ByteWindowKernel byte_back_;
  BitWindowKernel bit_fwd_;
  BitWindowKernel bit_back_;
};

inline CipherEnvelope encrypt(ByteView message, const KeySet& k, std::uint64_t offset) {
  return Cipher(k).encrypt(message, offset);
}

inline Bytes decrypt(const CipherEnvelope& e, const KeySet& k) { return Cipher(k).decrypt(e); }

}  // namespace ire
