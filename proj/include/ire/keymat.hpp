#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <vector>

#include "ire/common.hpp"
#include "ire/entropy.hpp"
#include "ire/keystream.hpp"

namespace ire {

inline constexpr std::size_t kByteWindow = 10;
inline constexpr std::size_t kBitWindow = 80;

/// Bijection on byte values, with its inverse kept alongside.
class SubstitutionTable {
 public:
  SubstitutionTable() {
    std::iota(forward_.begin(), forward_.end(), std::uint8_t{0});
    inverse_ = forward_;
  }

  /// Throws Error(invalid_substitution_table) unless `forward` is a bijection.
  explicit SubstitutionTable(const std::array<std::uint8_t, 256>& forward) : forward_(forward) {
    std::array<bool, 256> seen{};
    for (std::size_t b = 0; b < 256; ++b) {
      const auto v = forward_[b];
      if (seen[v]) throw Error(ErrorCode::invalid_substitution_table, "value " + std::to_string(v) + " repeated");
      seen[v] = true;
      inverse_[v] = static_cast<std::uint8_t>(b);
    }
  }

  std::uint8_t forward(std::uint8_t b) const noexcept { return forward_[b]; }
  std::uint8_t inverse(std::uint8_t b) const noexcept { return inverse_[b]; }
  const std::array<std::uint8_t, 256>& forward_table() const noexcept { return forward_; }
  const std::array<std::uint8_t, 256>& inverse_table() const noexcept { return inverse_; }

  friend bool operator==(const SubstitutionTable& a, const SubstitutionTable& b) { return a.forward_ == b.forward_; }

 private:
  std::array<std::uint8_t, 256> forward_{};
  std::array<std::uint8_t, 256> inverse_{};
};

/// Permutation of window positions: output[i] = input[map[i]].
class WindowPermutation {
 public:
  /// Identity of the given width.
  explicit WindowPermutation(std::size_t width) : map_(width) {
    if (width == 0) throw Error(ErrorCode::invalid_argument, "window width 0");
    std::iota(map_.begin(), map_.end(), std::uint8_t{0});
  }

  explicit WindowPermutation(std::vector<std::uint8_t> map) : map_(std::move(map)) {
    if (map_.empty() || map_.size() > 256) throw Error(ErrorCode::invalid_window_permutation, "width out of range");
    std::vector<bool> seen(map_.size(), false);
    for (auto v : map_) {
      if (v >= map_.size() || seen[v])
        throw Error(ErrorCode::invalid_window_permutation, "not a permutation of 0.." + std::to_string(map_.size() - 1));
      seen[v] = true;
    }
  }

  std::size_t width() const noexcept { return map_.size(); }
  std::uint8_t operator[](std::size_t i) const noexcept { return map_[i]; }
  const std::vector<std::uint8_t>& map() const noexcept { return map_; }

  bool is_identity() const noexcept {
    for (std::size_t i = 0; i < map_.size(); ++i)
      if (map_[i] != i) return false;
    return true;
  }

  friend bool operator==(const WindowPermutation&, const WindowPermutation&) = default;

 private:
  std::vector<std::uint8_t> map_;
};

/// q with q[p[i]] = i.
inline WindowPermutation invert_window_permutation(const WindowPermutation& p) {
  std::vector<std::uint8_t> q(p.width());
  for (std::size_t i = 0; i < p.width(); ++i) q[p[i]] = static_cast<std::uint8_t>(i);
  return WindowPermutation(std::move(q));
}

namespace detail {

// Fisher-Yates, forward form: position i swaps with a uniform pick from
// [i, n). A source that always yields zero performs no swaps.
template <class T, EntropySource E>
void shuffle(std::span<T> v, E& entropy) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(entropy, n - i));
    std::swap(v[i], v[j]);
  }
}

}  // namespace detail

template <EntropySource E>
SubstitutionTable generate_substitution_table(E& entropy) {
  std::array<std::uint8_t, 256> t{};
  std::iota(t.begin(), t.end(), std::uint8_t{0});
  detail::shuffle(std::span<std::uint8_t>(t), entropy);
  return SubstitutionTable(t);
}

template <EntropySource E>
WindowPermutation generate_window_permutation(E& entropy, std::size_t width) {
  if (width == 0 || width > 256) throw Error(ErrorCode::invalid_argument, "window width must be in 1..256");
  std::vector<std::uint8_t> m(width);
  std::iota(m.begin(), m.end(), std::uint8_t{0});
  detail::shuffle(std::span<std::uint8_t>(m), entropy);
  return WindowPermutation(std::move(m));
}

/// The shared secret of one user group: everything needed to encrypt and to
/// decrypt. Immutable after construction.
class KeySet {
 public:
  KeySet(SubstitutionTable sub, WindowPermutation byte_perm, WindowPermutation bit_perm, RbsLoop rbs,
         CombineRule rule)
      : sub_(std::move(sub)),
        byte_perm_(std::move(byte_perm)),
        bit_perm_(std::move(bit_perm)),
        rbs_(std::move(rbs)),
        rule_(rule) {
    if (byte_perm_.width() != kByteWindow)
      throw Error(ErrorCode::invalid_window_permutation, "byte window must have width 10");
    if (bit_perm_.width() != kBitWindow)
      throw Error(ErrorCode::invalid_window_permutation, "bit window must have width 80");
  }

  const SubstitutionTable& substitution() const noexcept { return sub_; }
  const WindowPermutation& byte_permutation() const noexcept { return byte_perm_; }
  const WindowPermutation& bit_permutation() const noexcept { return bit_perm_; }
  const RbsLoop& rbs() const noexcept { return rbs_; }
  CombineRule rule() const noexcept { return rule_; }

  friend bool operator==(const KeySet&, const KeySet&) = default;

 private:
  SubstitutionTable sub_;
  WindowPermutation byte_perm_;
  WindowPermutation bit_perm_;
  RbsLoop rbs_;
  CombineRule rule_;
};

template <EntropySource E>
KeySet generate_keyset(E& entropy, std::uint64_t rbs_bits = kDefaultRbsBits, CombineRule rule = CombineRule::B) {
  auto sub = generate_substitution_table(entropy);
  auto bytes = generate_window_permutation(entropy, kByteWindow);
  auto bits = generate_window_permutation(entropy, kBitWindow);
  auto rbs = generate_rbs(entropy, rbs_bits);
  return KeySet(std::move(sub), std::move(bytes), std::move(bits), std::move(rbs), rule);
}

// IREK v1 key file layout (little-endian):
//   0 "IREK" | 4 version | 5 rule flag | 6 substitution table [256]
//   262 byte window [10] | 272 bit window [80] | 352 RBS bit length u64
//   360 RBS bytes, MSB-first, zero-padded
namespace irek {
inline constexpr std::array<std::uint8_t, 4> kMagic{'I', 'R', 'E', 'K'};
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kSubOffset = 6;
inline constexpr std::size_t kByteWindowOffset = kSubOffset + 256;
inline constexpr std::size_t kBitWindowOffset = kByteWindowOffset + kByteWindow;
inline constexpr std::size_t kLengthOffset = kBitWindowOffset + kBitWindow;
inline constexpr std::size_t kHeaderSize = kLengthOffset + 8;
static_assert(kHeaderSize == 360);
}  // namespace irek

inline Bytes serialize_keyset(const KeySet& k) {
  Bytes out;
  out.reserve(irek::kHeaderSize + k.rbs().packed().size());
  out.insert(out.end(), irek::kMagic.begin(), irek::kMagic.end());
  out.push_back(irek::kVersion);
  out.push_back(rule_flag(k.rule()));
  const auto& fwd = k.substitution().forward_table();
  out.insert(out.end(), fwd.begin(), fwd.end());
  const auto& bm = k.byte_permutation().map();
  out.insert(out.end(), bm.begin(), bm.end());
  const auto& tm = k.bit_permutation().map();
  out.insert(out.end(), tm.begin(), tm.end());
  detail::put_u64le(out, k.rbs().length());
  out.insert(out.end(), k.rbs().packed().begin(), k.rbs().packed().end());
  return out;
}

/// Total on arbitrary input: returns a valid KeySet or throws Error. Nothing
/// is allocated from the declared RBS length until it has been checked
/// against the bytes actually present.
inline KeySet parse_keyset(ByteView data) {
  if (data.size() < irek::kMagic.size() || !std::equal(irek::kMagic.begin(), irek::kMagic.end(), data.begin()))
    throw Error(ErrorCode::bad_magic, "not an IREK key file");
  if (data.size() < irek::kHeaderSize) throw Error(ErrorCode::truncated, "truncated key file header");
  if (data[4] != irek::kVersion) throw Error(ErrorCode::unsupported_version, "key file version " + std::to_string(data[4]));
  const CombineRule rule = rule_from_flag(data[5]);

  std::array<std::uint8_t, 256> fwd{};
  std::copy_n(data.begin() + irek::kSubOffset, 256, fwd.begin());
  SubstitutionTable sub(fwd);

  auto window = [&](std::size_t off, std::size_t w) {
    return WindowPermutation(std::vector<std::uint8_t>(data.begin() + static_cast<std::ptrdiff_t>(off),
                                                       data.begin() + static_cast<std::ptrdiff_t>(off + w)));
  };
  WindowPermutation byte_perm = window(irek::kByteWindowOffset, kByteWindow);
  WindowPermutation bit_perm = window(irek::kBitWindowOffset, kBitWindow);

  const std::uint64_t bits = detail::get_u64le(data.subspan(irek::kLengthOffset, 8));
  if (bits < kMinRbsBits) throw Error(ErrorCode::rbs_too_short, std::to_string(bits) + " bits declared");
  const std::uint64_t need = RbsLoop::packed_size(bits);
  const std::uint64_t have = data.size() - irek::kHeaderSize;
  if (have < need) throw Error(ErrorCode::truncated, "truncated key file: RBS section");
  if (have > need) throw Error(ErrorCode::length_mismatch, "trailing bytes after RBS section");
  Bytes packed(data.begin() + irek::kHeaderSize, data.end());
  RbsLoop rbs(std::move(packed), bits);
  return KeySet(std::move(sub), std::move(byte_perm), std::move(bit_perm), std::move(rbs), rule);
}

}  // namespace ire
