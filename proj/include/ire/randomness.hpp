#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>

#include <boost/math/special_functions/gamma.hpp>

#include "ire/bits.hpp"
#include "ire/common.hpp"

namespace ire {

inline constexpr double kSignificance = 0.01;
inline constexpr std::size_t kMinTestBits = 100;

struct TestVerdict {
  double statistic = 0.0;
  double p_value = 0.0;
  bool pass = false;
  bool applicable = true;
};

namespace detail {

inline std::uint8_t last_byte_mask(std::size_t bits) noexcept {
  const auto r = bits & 7;
  return r == 0 ? std::uint8_t{0xFF} : static_cast<std::uint8_t>(0xFF00U >> r);
}

inline std::size_t count_ones(const BitBuffer& b) noexcept {
  const auto& bytes = b.bytes();
  if (bytes.empty()) return 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < bytes.size(); ++i) n += static_cast<std::size_t>(std::popcount(bytes[i]));
  const auto last = static_cast<std::uint8_t>(bytes.back() & last_byte_mask(b.size()));
  return n + static_cast<std::size_t>(std::popcount(last));
}

// Number of adjacent positions i, i+1 whose bits differ.
inline std::size_t count_transitions(const BitBuffer& b) noexcept {
  const auto& bytes = b.bytes();
  if (b.size() < 2) return 0;
  std::size_t n = 0;
  const std::size_t full = b.size() / 8;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const std::uint8_t x = bytes[i];
    std::uint8_t pairs = static_cast<std::uint8_t>((x ^ (x >> 1)) & 0x7F);
    if (i == full) {
      const auto r = b.size() & 7;
      pairs &= static_cast<std::uint8_t>((0x7FU >> (8 - r)) << (8 - r));
    }
    n += static_cast<std::size_t>(std::popcount(pairs));
    const std::size_t next_first_bit = (i + 1) * 8;
    if (next_first_bit < b.size()) n += static_cast<std::size_t>((x & 1U) != (bytes[i + 1] >> 7));
  }
  return n;
}

}  // namespace detail

/// Frequency (monobit) test: balance of ones and zeros.
inline TestVerdict monobit_test(const BitBuffer& bits) {
  const std::size_t n = bits.size();
  if (n < kMinTestBits) throw Error(ErrorCode::invalid_argument, "monobit test needs at least 100 bits");
  const double ones = static_cast<double>(detail::count_ones(bits));
  const double sum = 2.0 * ones - static_cast<double>(n);
  TestVerdict v;
  v.statistic = std::fabs(sum) / std::sqrt(static_cast<double>(n));
  v.p_value = std::erfc(v.statistic / std::sqrt(2.0));
  v.pass = v.p_value >= kSignificance;
  return v;
}

/// Runs test: total number of uninterrupted runs of identical bits.
/// Returns applicable=false when the ones fraction is too far from 1/2 for
/// the statistic to mean anything.
inline TestVerdict runs_test(const BitBuffer& bits) {
  const std::size_t n = bits.size();
  if (n < kMinTestBits) throw Error(ErrorCode::invalid_argument, "runs test needs at least 100 bits");
  const double nd = static_cast<double>(n);
  const double pi = static_cast<double>(detail::count_ones(bits)) / nd;
  TestVerdict v;
  if (std::fabs(pi - 0.5) >= 2.0 / std::sqrt(nd)) {
    v.applicable = false;
    return v;
  }
  const double runs = static_cast<double>(detail::count_transitions(bits) + 1);
  const double q = pi * (1.0 - pi);
  v.statistic = runs;
  v.p_value = std::erfc(std::fabs(runs - 2.0 * nd * q) / (2.0 * std::sqrt(2.0 * nd) * q));
  v.pass = v.p_value >= kSignificance;
  return v;
}

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 0.0;
};

/// Pearson goodness-of-fit against equal expected frequency in every cell.
inline ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts) {
  if (counts.size() < 2) throw Error(ErrorCode::invalid_argument, "chi-square needs at least two cells");
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  if (total <= 0) throw Error(ErrorCode::invalid_argument, "chi-square needs observations");
  const double expected = total / static_cast<double>(counts.size());
  ChiSquareResult r;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    r.statistic += d * d / expected;
  }
  r.degrees_of_freedom = counts.size() - 1;
  r.p_value = boost::math::gamma_q(static_cast<double>(r.degrees_of_freedom) / 2.0, r.statistic / 2.0);
  return r;
}

}  // namespace ire
