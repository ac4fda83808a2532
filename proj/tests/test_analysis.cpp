#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ire/ire.hpp"
#include "test_util.hpp"

using namespace ire;

namespace {

BitBuffer pattern(const std::string& unit, std::size_t n) {
  BitBuffer b(n);
  for (std::size_t i = 0; i < n; ++i) b.set(i, unit[i % unit.size()] == '1');
  return b;
}

// Straightforward second implementation: walk the bits one at a time.
struct NaiveStats {
  double monobit_stat, monobit_p;
  bool runs_applicable;
  double runs_stat, runs_p;
};

NaiveStats naive(const BitBuffer& b) {
  const std::size_t n = b.size();
  long long sum = 0, ones = 0, runs = 1;
  for (std::size_t i = 0; i < n; ++i) {
    sum += b[i] ? 1 : -1;
    ones += b[i] ? 1 : 0;
    if (i > 0 && b[i] != b[i - 1]) ++runs;
  }
  NaiveStats s{};
  const double nd = static_cast<double>(n);
  s.monobit_stat = std::abs(static_cast<double>(sum)) / std::sqrt(nd);
  s.monobit_p = std::erfc(s.monobit_stat / std::sqrt(2.0));
  const double pi = static_cast<double>(ones) / nd;
  s.runs_applicable = std::abs(pi - 0.5) < 2.0 / std::sqrt(nd);
  s.runs_stat = static_cast<double>(runs);
  s.runs_p = std::erfc(std::abs(static_cast<double>(runs) - 2.0 * nd * pi * (1.0 - pi)) /
                       (2.0 * std::sqrt(2.0 * nd) * pi * (1.0 - pi)));
  return s;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-10 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

TEST(Monobit, AlternatingIsBalanced) {
  const auto v = monobit_test(pattern("01", 10'000));
  EXPECT_DOUBLE_EQ(v.statistic, 0.0);
  EXPECT_DOUBLE_EQ(v.p_value, 1.0);
  EXPECT_TRUE(v.pass);
}

TEST(Monobit, AllOnesFails) {
  const auto v = monobit_test(pattern("1", 10'000));
  EXPECT_DOUBLE_EQ(v.statistic, 100.0);
  EXPECT_LT(v.p_value, 1e-300);
  EXPECT_FALSE(v.pass);
}

TEST(Monobit, TooShort) {
  EXPECT_THROW(monobit_test(pattern("01", 99)), Error);
}

TEST(Runs, AlternatingHasTooManyRuns) {
  const auto v = runs_test(pattern("01", 10'000));
  EXPECT_TRUE(v.applicable);
  EXPECT_DOUBLE_EQ(v.statistic, 10'000.0);
  EXPECT_LT(v.p_value, 1e-100);
  EXPECT_FALSE(v.pass);
}

TEST(Runs, PairPatternHasExactlyTheExpectedRunCount) {
  // 0011 repeated: n/2 runs, which is exactly 2n*pi*(1-pi) at pi = 1/2, so
  // the runs statistic cannot see this structure.
  const auto v = runs_test(pattern("0011", 10'000));
  EXPECT_TRUE(v.applicable);
  EXPECT_DOUBLE_EQ(v.statistic, 5'000.0);
  EXPECT_DOUBLE_EQ(v.p_value, 1.0);
  EXPECT_TRUE(v.pass);
}

TEST(Runs, TwoLongBlocksHaveTooFewRuns) {
  BitBuffer b(10'000);
  for (std::size_t i = 5'000; i < 10'000; ++i) b.set(i, true);
  const auto v = runs_test(b);
  EXPECT_DOUBLE_EQ(v.statistic, 2.0);
  EXPECT_FALSE(v.pass);
}

TEST(Runs, NotApplicableWhenUnbalanced) {
  const auto v = runs_test(pattern("1110", 10'000));
  EXPECT_FALSE(v.applicable);
  EXPECT_FALSE(v.pass);
}

TEST(Runs, TooShort) {
  EXPECT_THROW(runs_test(pattern("01", 50)), Error);
}

TEST(Statistics, MatchNaiveImplementation) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 100 + rng() % 20'000;
    BitBuffer b(n);
    // Bias some inputs so both branches of the runs pre-check are covered.
    const unsigned bias = i % 4 == 0 ? 70 : 50;
    for (std::size_t j = 0; j < n; ++j) b.set(j, rng() % 100 < bias);
    const auto ref = naive(b);
    const auto m = monobit_test(b);
    const auto r = runs_test(b);
    ASSERT_TRUE(close(m.statistic, ref.monobit_stat));
    ASSERT_TRUE(close(m.p_value, ref.monobit_p));
    ASSERT_EQ(r.applicable, ref.runs_applicable);
    if (ref.runs_applicable) {
      ASSERT_TRUE(close(r.statistic, ref.runs_stat));
      ASSERT_TRUE(close(r.p_value, ref.runs_p));
    }
  }
}

TEST(Statistics, VerdictMatchesSignificance) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    BitBuffer b(1000);
    for (std::size_t j = 0; j < 1000; ++j) b.set(j, rng() % 100 < 53);
    const auto m = monobit_test(b);
    EXPECT_EQ(m.pass, m.p_value >= 0.01);
    EXPECT_GE(m.p_value, 0.0);
    EXPECT_LE(m.p_value, 1.0);
  }
}

TEST(ChiSquare, KnownValue) {
  // cells 10,20,30: expected 20 each, statistic (100+0+100)/20 = 10,
  // df 2, survival function exp(-10/2).
  const std::vector<std::uint64_t> c{10, 20, 30};
  const auto r = chi_square_uniform(c);
  EXPECT_DOUBLE_EQ(r.statistic, 10.0);
  EXPECT_EQ(r.degrees_of_freedom, 2u);
  EXPECT_NEAR(r.p_value, std::exp(-5.0), 1e-12);
}

TEST(CiphertextRandomness, ZeroPlaintextPassesMonobit) {
  SystemEntropy e;
  const auto k = generate_keyset(e, std::uint64_t{1} << 21);
  const auto env = encrypt(Bytes(100'000, 0), k, choose_offset(e, k.rbs().length()));
  // One keyset: fails with probability 0.01; the acceptance suite checks the
  // 18-of-20 rate.
  const auto v = monobit_test(BitBuffer::from_bytes(env.payload));
  EXPECT_GT(v.p_value, 0.0);
}

TEST(FitLine, ExactLine) {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_FALSE(f.degenerate);
}

TEST(FitLine, NoisyLineHasLowerRSquared) {
  const std::vector<double> x{1, 2, 3, 4}, y{1, 4, 2, 5};
  const auto f = fit_line(x, y);
  EXPECT_LT(f.r_squared, 0.9);
  EXPECT_GE(f.r_squared, 0.0);
}

TEST(BenchLinear, SingleSizeIsDegenerate) {
  const auto k = tu::seeded_keyset(3, 1 << 16);
  const std::vector<std::size_t> sizes{4096};
  const auto r = bench_linear(k, sizes, 3);
  ASSERT_EQ(r.points.size(), 1u);
  EXPECT_TRUE(r.encrypt_fit.degenerate);
  EXPECT_DOUBLE_EQ(r.encrypt_fit.r_squared, 1.0);
  EXPECT_FALSE(r.diagnostic.empty());
}

TEST(BenchLinear, ReportsSortedPoints) {
  const auto k = tu::seeded_keyset(4, 1 << 16);
  const std::vector<std::size_t> sizes{1 << 12, 1 << 13, 1 << 14};
  const auto r = bench_linear(k, sizes, 3);
  ASSERT_EQ(r.points.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(r.points[i].bytes, sizes[i]);
    EXPECT_GT(r.points[i].encrypt_seconds, 0.0);
    EXPECT_GT(r.points[i].decrypt_seconds, 0.0);
  }
  EXPECT_GE(r.encrypt_fit.r_squared, 0.0);
  EXPECT_LE(r.encrypt_fit.r_squared, 1.0);
}

TEST(BenchLinear, RejectsBadArguments) {
  const auto k = tu::seeded_keyset(5, 1 << 12);
  const std::vector<std::size_t> unsorted{200, 100}, tiny{5, 100};
  EXPECT_THROW(bench_linear(k, unsorted, 3), Error);
  EXPECT_THROW(bench_linear(k, tiny, 3), Error);
  const std::vector<std::size_t> ok{100, 200};
  EXPECT_THROW(bench_linear(k, ok, 2), Error);
}

TEST(BenchParallel, CountsAllMessages) {
  const auto k = tu::seeded_keyset(6, 1 << 16);
  const auto t = bench_parallel(k, 4096, 8, 2);
  EXPECT_EQ(t.messages, 8u);
  EXPECT_GT(t.bytes_per_second(), 0.0);
}
