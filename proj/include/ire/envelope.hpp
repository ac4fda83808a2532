#pragma once

#include <algorithm>
#include <array>
#include <cstdint>

#include "ire/common.hpp"

namespace ire {

inline constexpr std::size_t kMinPayload = 10;
inline constexpr std::uint8_t kMaxPadCount = 10;

/// One encrypted message with the cleartext parameters the receiver needs.
struct CipherEnvelope {
  std::uint8_t version = 1;
  CombineRule rule = CombineRule::B;
  std::uint8_t pad_count = 0;
  std::uint64_t start_offset = 0;  // 0-based bit index into the RBS loop
  Bytes payload;

  friend bool operator==(const CipherEnvelope&, const CipherEnvelope&) = default;
};

// IRE1 v1 wire format (little-endian):
//   0 "IRE1" | 4 version | 5 rule flag | 6 pad count | 7 start offset u64
//   15 payload length u64 | 23 payload
namespace ire1 {
inline constexpr std::array<std::uint8_t, 4> kMagic{'I', 'R', 'E', '1'};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 23;
}  // namespace ire1

inline void validate_envelope(const CipherEnvelope& e) {
  if (e.version != ire1::kVersion) throw Error(ErrorCode::unsupported_version, "envelope version " + std::to_string(e.version));
  if (e.pad_count > kMaxPadCount) throw Error(ErrorCode::invalid_pad_count, std::to_string(e.pad_count) + " > 10");
  if (e.payload.size() < kMinPayload) throw Error(ErrorCode::payload_too_short, std::to_string(e.payload.size()) + " bytes");
  if (e.pad_count > 0 && e.payload.size() != kMinPayload)
    throw Error(ErrorCode::invalid_pad_count, "padding only applies to 10-byte payloads");
}

inline Bytes encode_envelope(const CipherEnvelope& e) {
  validate_envelope(e);
  Bytes out(ire1::kHeaderSize + e.payload.size());
  std::copy(ire1::kMagic.begin(), ire1::kMagic.end(), out.begin());
  out[4] = e.version;
  out[5] = rule_flag(e.rule);
  out[6] = e.pad_count;
  for (int i = 0; i < 8; ++i) {
    out[7 + i] = static_cast<std::uint8_t>(e.start_offset >> (8 * i));
    out[15 + i] = static_cast<std::uint8_t>(static_cast<std::uint64_t>(e.payload.size()) >> (8 * i));
  }
  std::copy(e.payload.begin(), e.payload.end(), out.begin() + ire1::kHeaderSize);
  return out;
}

/// Parses untrusted bytes. Throws Error on any malformed input; the payload
/// is only allocated after its declared length matches what is present.
inline CipherEnvelope decode_envelope(ByteView data) {
  if (data.size() < ire1::kMagic.size() || !std::equal(ire1::kMagic.begin(), ire1::kMagic.end(), data.begin()))
    throw Error(ErrorCode::bad_magic, "not an IRE1 envelope");
  if (data.size() < ire1::kHeaderSize) throw Error(ErrorCode::truncated, "truncated envelope header");
  CipherEnvelope e;
  e.version = data[4];
  if (e.version != ire1::kVersion) throw Error(ErrorCode::unsupported_version, "envelope version " + std::to_string(e.version));
  e.rule = rule_from_flag(data[5]);
  e.pad_count = data[6];
  e.start_offset = detail::get_u64le(data.subspan(7, 8));
  const std::uint64_t declared = detail::get_u64le(data.subspan(15, 8));
  const std::uint64_t present = data.size() - ire1::kHeaderSize;
  if (declared > present) throw Error(ErrorCode::truncated, "payload declares " + std::to_string(declared) + " bytes, " + std::to_string(present) + " present");
  if (declared < present) throw Error(ErrorCode::length_mismatch, "trailing bytes after payload");
  if (e.pad_count > kMaxPadCount) throw Error(ErrorCode::invalid_pad_count, std::to_string(e.pad_count) + " > 10");
  if (declared < kMinPayload) throw Error(ErrorCode::payload_too_short, std::to_string(declared) + " bytes");
  if (e.pad_count > 0 && declared != kMinPayload)
    throw Error(ErrorCode::invalid_pad_count, "padding only applies to 10-byte payloads");
  e.payload.assign(data.begin() + ire1::kHeaderSize, data.end());
  return e;
}

}  // namespace ire
