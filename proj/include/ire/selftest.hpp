#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ire/bits.hpp"
#include "ire/cipher.hpp"
#include "ire/entropy.hpp"
#include "ire/keymat.hpp"
#include "ire/keystream.hpp"
#include "ire/window_kernels.hpp"

namespace ire {

/// The operations the self-test exercises. Replaceable so a harness can
/// inject faults and confirm the vectors catch them.
struct SelftestHooks {
  std::function<BitBuffer(const BitBuffer&, const RbsLoop&, std::uint64_t, CombineRule)> combine = keystream_combine;
  std::function<Bytes(ByteView, const WindowPermutation&)> byte_permute = [](ByteView in, const WindowPermutation& p) {
    return sliding_byte_permute(in, p);
  };
};

struct SelftestCheck {
  std::string name;
  bool passed = false;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;
  bool ok() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return !checks.empty();
  }
};

namespace detail {
inline Bytes labels(std::uint8_t from, std::uint8_t to) {
  Bytes b;
  for (unsigned v = from; v <= to; ++v) b.push_back(static_cast<std::uint8_t>(v));
  return b;
}
}  // namespace detail

/// Known-answer vectors plus a short seeded round-trip sweep.
inline SelftestReport run_selftest(const SelftestHooks& hooks = {}, int sweep_cases = 64) {
  SelftestReport rep;
  auto check = [&](std::string name, auto&& body) {
    bool ok = false;
    try {
      ok = body();
    } catch (const std::exception&) {
      ok = false;
    }
    rep.checks.push_back({std::move(name), ok});
  };

  // Message bits 1011001010 against loop bits 1001100001.
  check("combine rule B (1011001010 ^ 1001100001 = 0010101011)", [&] {
    BitBuffer ks = BitBuffer::from_string("1001100001");
    for (std::size_t i = ks.size(); i < kMinRbsBits; ++i) ks.push_back(false);
    const RbsLoop loop = RbsLoop::from_bits(ks);
    const auto out = hooks.combine(BitBuffer::from_string("1011001010"), loop, 0, CombineRule::B);
    return out.to_string() == "0010101011";
  });
  check("combine rule A is the complement of rule B", [&] {
    BitBuffer ks = BitBuffer::from_string("1001100001");
    for (std::size_t i = ks.size(); i < kMinRbsBits; ++i) ks.push_back(false);
    const RbsLoop loop = RbsLoop::from_bits(ks);
    const auto out = hooks.combine(BitBuffer::from_string("1011001010"), loop, 0, CombineRule::A);
    return out.to_string() == "1101010100";
  });

  const WindowPermutation s2({7, 2, 6, 3, 0, 9, 1, 8, 5, 4});
  check("10-byte window: 1..10 -> 8,3,7,4,1,10,2,9,6,5", [&] {
    return hooks.byte_permute(detail::labels(1, 10), s2) == Bytes{8, 3, 7, 4, 1, 10, 2, 9, 6, 5};
  });
  check("window after one shift reads 3,7,4,1,10,2,9,6,5,11", [&] {
    // With 11 bytes exactly two windows run; undoing the second one exposes
    // the contents the shifted window saw.
    const Bytes out = hooks.byte_permute(detail::labels(1, 11), s2);
    if (out.size() != 11 || out[0] != 8) return false;
    Bytes window(10);
    for (std::size_t i = 0; i < 10; ++i) window[s2[i]] = out[1 + i];
    return window == Bytes{3, 7, 4, 1, 10, 2, 9, 6, 5, 11};
  });
  check("15-byte sliding permutation", [&] {
    return hooks.byte_permute(detail::labels(1, 15), s2) == Bytes{8, 6, 2, 7, 9, 5, 1, 12, 3, 4, 15, 11, 13, 10, 14};
  });

  check("pad: 8 bytes -> 10 with two 0x20", [] {
    const auto p = pad(Bytes(8, 'x'));
    return p.bytes.size() == 10 && p.pad_count == 2 && p.bytes[8] == 0x20 && p.bytes[9] == 0x20;
  });
  check("pad: 10 bytes unchanged", [] {
    const Bytes m = detail::labels(1, 10);
    const auto p = pad(m);
    return p.bytes == m && p.pad_count == 0;
  });
  check("pad: trailing-space message survives", [] {
    const Bytes m{'A', 'B', 'C', 'D', 'E', 'F', 'G', 'H', ' '};
    return unpad(pad(m)) == m;
  });

  check("fast bit kernel matches reference", [&] {
    SeededEntropy rng(0x5E1F);
    for (int c = 0; c < sweep_cases; ++c) {
      const auto p = generate_window_permutation(rng, kBitWindow);
      Bytes buf(10 + uniform_below(rng, 40));
      rng.fill(buf);
      for (Direction d : {Direction::forward, Direction::backward}) {
        Bytes fast = buf, slow = buf;
        BitWindowKernel(p, d).apply(fast);
        sliding_bit_permute_reference(slow, p, d);
        if (fast != slow) return false;
      }
    }
    return true;
  });
  check("encrypt/decrypt round trip", [&] {
    SeededEntropy rng(0x5E1F + 1);
    for (int c = 0; c < sweep_cases; ++c) {
      const KeySet k = generate_keyset(rng, 80 + uniform_below(rng, 4096), c % 2 ? CombineRule::A : CombineRule::B);
      Bytes m(uniform_below(rng, 300));
      rng.fill(m);
      const auto e = encrypt(m, k, uniform_below(rng, k.rbs().length()));
      if (decrypt(e, k) != m) return false;
    }
    return true;
  });
  return rep;
}

}  // namespace ire
