#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>

#include "ire/common.hpp"
#include "ire/keymat.hpp"

namespace ire {

/// Optional instrumentation: number of window permutations applied.
struct WindowStats {
  std::uint64_t byte_windows = 0;
  std::uint64_t bit_windows = 0;
};

enum class Direction { forward, backward };

// Forward: windows start at 0, 1, ..., n-w and each gets p applied.
// Backward: windows start at n-w, ..., 0 and each gets p^-1 applied.
// Backward undoes forward.

/// Sliding permutation over whole bytes with window width 10.
class ByteWindowKernel {
 public:
  ByteWindowKernel(const WindowPermutation& p, Direction dir)
      : dir_(dir) {
    if (p.width() != kByteWindow) throw Error(ErrorCode::invalid_argument, "byte kernel needs width 10");
    const auto& use = dir == Direction::forward ? p : invert_window_permutation(p);
    std::copy(use.map().begin(), use.map().end(), map_.begin());
  }

  void apply(std::span<std::uint8_t> buf, WindowStats* stats = nullptr) const {
    if (buf.size() < kByteWindow) throw Error(ErrorCode::invalid_argument, "sliding byte permutation needs >= 10 bytes");
    const std::size_t last = buf.size() - kByteWindow;
    std::array<std::uint8_t, kByteWindow> tmp{};
    auto one = [&](std::size_t k) {
      const std::uint8_t* w = buf.data() + k;
      for (std::size_t i = 0; i < kByteWindow; ++i) tmp[i] = w[map_[i]];
      std::copy(tmp.begin(), tmp.end(), buf.begin() + static_cast<std::ptrdiff_t>(k));
    };
    if (dir_ == Direction::forward)
      for (std::size_t k = 0; k <= last; ++k) one(k);
    else
      for (std::size_t k = last + 1; k-- > 0;) one(k);
    if (stats) stats->byte_windows += last + 1;
  }

 private:
  std::array<std::uint8_t, kByteWindow> map_{};
  Direction dir_;
};

/// Sliding permutation over bits with window width 80 and one-bit shifts.
///
/// The 80-bit window lives in the top of a 128-bit register (window bit j at
/// register bit 127-j, matching MSB-first byte order). One window
/// application followed by a one-bit shift is a fixed rewiring of
/// (window + incoming bit) into (window + outgoing bit), so eight of them in a
/// row rewire 80 window bits plus one incoming byte into 80 window bits plus
/// one finished byte. That rewiring is precomputed as per-byte lookup tables;
/// a message costs 11 lookups per byte instead of 640 bit moves.
class BitWindowKernel {
 public:
  using u128 = unsigned __int128;

  BitWindowKernel(const WindowPermutation& p, Direction dir) : dir_(dir) {
    if (p.width() != kBitWindow) throw Error(ErrorCode::invalid_argument, "bit kernel needs width 80");
    const WindowPermutation use = dir == Direction::forward ? p : invert_window_permutation(p);
    build_single(use);
    build_block(use);
  }

  /// Buffer length in bits is 8 * buf.size(); must be at least 80.
  void apply(std::span<std::uint8_t> buf, WindowStats* stats = nullptr) const {
    const std::size_t n = buf.size();
    if (n < kByteWindow) throw Error(ErrorCode::invalid_argument, "sliding bit permutation needs >= 80 bits");
    if (dir_ == Direction::forward) {
      u128 s = permute_once(load(buf.data()));
      for (std::size_t i = 0; i + kByteWindow < n; ++i) {
        const u128 r = block(s, buf[i + kByteWindow]);
        buf[i] = static_cast<std::uint8_t>(r >> 120);
        s = r << 8;
      }
      store(s, buf.data() + (n - kByteWindow));
    } else {
      u128 s = permute_once(load(buf.data() + (n - kByteWindow)));
      for (std::size_t i = n - kByteWindow; i-- > 0;) {
        const u128 r = block(s, buf[i]);
        buf[i + kByteWindow] = static_cast<std::uint8_t>(r >> 40);
        s = r & kWindowMask;
      }
      store(s, buf.data());
    }
    if (stats) stats->bit_windows += 8 * n - kBitWindow + 1;
  }

 private:
  static constexpr u128 kWindowMask = ~u128{0} << 48;
  static constexpr std::size_t kBlockInputs = kByteWindow + 1;

  static u128 load(const std::uint8_t* p) noexcept {
    u128 s = 0;
    for (std::size_t b = 0; b < kByteWindow; ++b) s |= u128{p[b]} << (120 - 8 * b);
    return s;
  }
  static void store(u128 s, std::uint8_t* p) noexcept {
    for (std::size_t b = 0; b < kByteWindow; ++b) p[b] = static_cast<std::uint8_t>(s >> (120 - 8 * b));
  }
  static std::uint8_t window_byte(u128 s, std::size_t b) noexcept {
    return static_cast<std::uint8_t>(s >> (120 - 8 * b));
  }

  u128 permute_once(u128 s) const noexcept {
    u128 r = 0;
    for (std::size_t b = 0; b < kByteWindow; ++b) r |= (*single_)[b][window_byte(s, b)];
    return r;
  }

  u128 block(u128 s, std::uint8_t incoming) const noexcept {
    const auto& t = *block_;
    u128 r = t[kByteWindow][incoming];
    for (std::size_t b = 0; b < kByteWindow; ++b) r |= t[b][window_byte(s, b)];
    return r;
  }

  // dest[label] = output register bit position (0 = MSB) for each input label;
  // tables then map each input byte value to the OR of its routed bits.
  template <std::size_t Inputs>
  static void fill_tables(const std::array<int, Inputs * 8>& dest,
                          std::array<std::array<u128, 256>, Inputs>& tables) {
    for (std::size_t b = 0; b < Inputs; ++b)
      for (unsigned v = 0; v < 256; ++v) {
        u128 r = 0;
        for (unsigned t = 0; t < 8; ++t)
          if (v & (0x80U >> t)) r |= u128{1} << (127 - dest[8 * b + t]);
        tables[b][v] = r;
      }
  }

  void build_single(const WindowPermutation& p) {
    // Output j takes input p[j], so input label p[j] lands at j.
    std::array<int, kBitWindow> dest{};
    for (std::size_t j = 0; j < kBitWindow; ++j) dest[p[j]] = static_cast<int>(j);
    single_ = std::make_unique<std::array<std::array<u128, 256>, kByteWindow>>();
    fill_tables<kByteWindow>(dest, *single_);
  }

  // Labels 0..79 are window positions, 80..87 the incoming byte (MSB first).
  // Forward step: emit window[0], shift left, take the next incoming bit at
  // position 79, permute. Outputs: emitted byte at register bits 0..7, window
  // at 8..87 (shifted up by 8 afterwards).
  // Backward step: emit window[79], shift right, take incoming bits from the
  // preceding byte's LSB upwards at position 0, permute. Outputs: window at
  // 0..79, emitted byte at 80..87.
  void build_block(const WindowPermutation& p) {
    std::array<int, kBitWindow> win{};
    for (std::size_t j = 0; j < kBitWindow; ++j) win[j] = static_cast<int>(j);
    std::array<int, kBlockInputs * 8> dest{};
    std::array<int, kBitWindow> next{};
    for (int step = 0; step < 8; ++step) {
      if (dir_ == Direction::forward) {
        dest[static_cast<std::size_t>(win[0])] = step;
        for (std::size_t j = 0; j + 1 < kBitWindow; ++j) win[j] = win[j + 1];
        win[kBitWindow - 1] = static_cast<int>(kBitWindow) + step;
      } else {
        dest[static_cast<std::size_t>(win[kBitWindow - 1])] = static_cast<int>(kBitWindow) + 7 - step;
        for (std::size_t j = kBitWindow - 1; j > 0; --j) win[j] = win[j - 1];
        win[0] = static_cast<int>(kBitWindow) + 7 - step;
      }
      for (std::size_t j = 0; j < kBitWindow; ++j) next[j] = win[p[j]];
      win = next;
    }
    const int window_base = dir_ == Direction::forward ? 8 : 0;
    for (std::size_t j = 0; j < kBitWindow; ++j) dest[static_cast<std::size_t>(win[j])] = window_base + static_cast<int>(j);
    block_ = std::make_unique<std::array<std::array<u128, 256>, kBlockInputs>>();
    fill_tables<kBlockInputs>(dest, *block_);
  }

  Direction dir_;
  std::unique_ptr<std::array<std::array<u128, 256>, kByteWindow>> single_;
  std::unique_ptr<std::array<std::array<u128, 256>, kBlockInputs>> block_;
};

/// Straightforward per-window bit permutation; the fast kernel must agree
/// with it bit for bit. Window count is 8*n - 80 + 1.
inline void sliding_bit_permute_reference(std::span<std::uint8_t> buf, const WindowPermutation& p, Direction dir) {
  const std::size_t nbits = buf.size() * 8;
  if (p.width() != kBitWindow || nbits < kBitWindow) throw Error(ErrorCode::invalid_argument, "reference bit permute");
  const WindowPermutation use = dir == Direction::forward ? p : invert_window_permutation(p);
  auto get = [&](std::size_t i) { return (buf[i >> 3] >> (7 - (i & 7))) & 1U; };
  auto put = [&](std::size_t i, unsigned v) {
    const auto m = static_cast<std::uint8_t>(0x80U >> (i & 7));
    buf[i >> 3] = static_cast<std::uint8_t>(v ? (buf[i >> 3] | m) : (buf[i >> 3] & ~m));
  };
  std::array<unsigned, kBitWindow> tmp{};
  auto one = [&](std::size_t k) {
    for (std::size_t j = 0; j < kBitWindow; ++j) tmp[j] = get(k + use[j]);
    for (std::size_t j = 0; j < kBitWindow; ++j) put(k + j, tmp[j]);
  };
  const std::size_t last = nbits - kBitWindow;
  if (dir == Direction::forward)
    for (std::size_t k = 0; k <= last; ++k) one(k);
  else
    for (std::size_t k = last + 1; k-- > 0;) one(k);
}

}  // namespace ire
