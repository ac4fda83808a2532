#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ire {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

enum class ErrorCode {
  invalid_argument,
  entropy_failure,
  randomness_gate,
  bad_magic,
  unsupported_version,
  invalid_rule,
  invalid_substitution_table,
  invalid_window_permutation,
  truncated,
  length_mismatch,
  rbs_too_short,
  nonzero_padding_bits,
  invalid_pad_count,
  payload_too_short,
  rule_mismatch,
  offset_out_of_range,
  io_failure,
};

constexpr std::string_view to_string(ErrorCode c) noexcept {
  switch (c) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::entropy_failure: return "entropy source failure";
    case ErrorCode::randomness_gate: return "random sequence failed the monobit gate";
    case ErrorCode::bad_magic: return "bad magic";
    case ErrorCode::unsupported_version: return "unsupported version";
    case ErrorCode::invalid_rule: return "invalid combine rule flag";
    case ErrorCode::invalid_substitution_table: return "invalid substitution table";
    case ErrorCode::invalid_window_permutation: return "invalid window permutation";
    case ErrorCode::truncated: return "truncated input";
    case ErrorCode::length_mismatch: return "declared length does not match data";
    case ErrorCode::rbs_too_short: return "random bit sequence shorter than 80 bits";
    case ErrorCode::nonzero_padding_bits: return "nonzero padding bits";
    case ErrorCode::invalid_pad_count: return "invalid pad count";
    case ErrorCode::payload_too_short: return "payload shorter than 10 bytes";
    case ErrorCode::rule_mismatch: return "combine rule mismatch";
    case ErrorCode::offset_out_of_range: return "offset out of range";
    case ErrorCode::io_failure: return "I/O failure";
  }
  return "unknown error";
}

/// Every failure in the library is reported as an Error carrying a code, so
/// callers can branch on the class of failure and not the message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail)),
        code_(code) {}
  explicit Error(ErrorCode code) : Error(code, "") {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Per-bit combination of message and keystream.
/// Rule A: equal bits give 1 (XNOR). Rule B: equal bits give 0 (XOR).
enum class CombineRule : std::uint8_t { A = 0x00, B = 0x01 };

inline CombineRule rule_from_flag(std::uint8_t flag) {
  if (flag > 0x01) throw Error(ErrorCode::invalid_rule, "flag " + std::to_string(flag));
  return static_cast<CombineRule>(flag);
}

constexpr std::uint8_t rule_flag(CombineRule r) noexcept { return static_cast<std::uint8_t>(r); }

constexpr char rule_name(CombineRule r) noexcept { return r == CombineRule::A ? 'A' : 'B'; }

namespace detail {

inline void put_u64le(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t get_u64le(ByteView in) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | in[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace detail
}  // namespace ire
