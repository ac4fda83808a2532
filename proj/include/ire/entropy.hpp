#pragma once

#include <cerrno>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <limits>
#include <random>
#include <span>

#include <sys/random.h>

#include "ire/common.hpp"

namespace ire {

/// Anything that can fill a byte span with random data. Implementations
/// throw Error(entropy_failure) when they cannot.
template <class E>
concept EntropySource = requires(E& e, std::span<std::uint8_t> out) {
  { e.fill(out) };
  { e.secure() } -> std::convertible_to<bool>;
};

/// Kernel CSPRNG via getrandom(2).
class SystemEntropy {
 public:
  void fill(std::span<std::uint8_t> out) {
    std::size_t done = 0;
    while (done < out.size()) {
      ssize_t n = ::getrandom(out.data() + done, out.size() - done, 0);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::entropy_failure, std::strerror(errno));
      }
      done += static_cast<std::size_t>(n);
    }
  }
  static constexpr bool secure() noexcept { return true; }
};

/// Deterministic generator for reproducible tests and benchmarks.
/// NOT suitable for key material.
class SeededEntropy {
 public:
  explicit SeededEntropy(std::uint64_t seed) : engine_(seed) {}

  void fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
      std::uint64_t w = engine_();
      for (int k = 0; k < 8 && i < out.size(); ++k, ++i) out[i] = static_cast<std::uint8_t>(w >> (8 * k));
    }
  }
  static constexpr bool secure() noexcept { return false; }

 private:
  std::mt19937_64 engine_;
};

template <EntropySource E>
std::uint64_t next_u64(E& entropy) {
  std::uint8_t buf[8];
  entropy.fill(buf);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
  return v;
}

/// Uniform draw from [0, n) by rejection; no modulo bias. A source that
/// always yields zero produces zero.
template <EntropySource E>
std::uint64_t uniform_below(E& entropy, std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "uniform_below(0)");
  if (n == 1) return 0;
  const std::uint64_t rem = (std::uint64_t{0} - n) % n;  // 2^64 mod n
  const std::uint64_t max_ok = std::numeric_limits<std::uint64_t>::max() - rem;
  for (;;) {
    std::uint64_t x = next_u64(entropy);
    if (x <= max_ok) return x % n;
  }
}

}  // namespace ire
