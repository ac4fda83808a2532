#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <new>
#include <string>
#include <thread>
#include <vector>

#include "ire/cipher.hpp"
#include "ire/entropy.hpp"
#include "ire/keymat.hpp"

namespace ire {

struct BenchPoint {
  std::size_t bytes = 0;
  double encrypt_seconds = 0.0;  // median
  double decrypt_seconds = 0.0;  // median
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  bool degenerate = false;
};

struct BenchReport {
  std::vector<BenchPoint> points;
  LinearFit encrypt_fit;
  LinearFit decrypt_fit;
  std::string diagnostic;  // non-empty when the run was cut short or the fit is degenerate
};

/// Ordinary least squares y = slope*x + intercept. Fewer than two distinct x
/// values gives a degenerate fit with r_squared = 1.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  LinearFit f;
  const std::size_t n = x.size();
  if (n == 0) {
    f.degenerate = true;
    return f;
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) {
    f.degenerate = true;
    f.intercept = my;
    return f;
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (syy > 0.0) {
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (f.slope * x[i] + f.intercept);
      ss_res += r * r;
    }
    f.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return f;
}

namespace detail {
inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace detail

/// Times in-memory encryption and decryption of random plaintexts at each
/// size and fits median time against size. Key generation and I/O are
/// outside the timed region.
inline BenchReport bench_linear(const KeySet& k, std::span<const std::size_t> sizes, int repetitions,
                                std::uint64_t seed = 0x1BE) {
  if (sizes.empty()) throw Error(ErrorCode::invalid_argument, "no sizes");
  if (repetitions < 3) throw Error(ErrorCode::invalid_argument, "at least 3 repetitions");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < kMinPayload) throw Error(ErrorCode::invalid_argument, "sizes must be >= 10 bytes");
    if (i > 0 && sizes[i] <= sizes[i - 1]) throw Error(ErrorCode::invalid_argument, "sizes must be strictly increasing");
  }
  const Cipher cipher(k);
  SeededEntropy rng(seed);
  BenchReport report;
  std::size_t sink = 0;
  for (std::size_t size : sizes) {
    try {
      Bytes plain(size);
      rng.fill(plain);
      const std::uint64_t offset = uniform_below(rng, k.rbs().length());
      CipherEnvelope env = cipher.encrypt(plain, offset);  // warm-up
      sink += cipher.decrypt(env).size();
      std::vector<double> enc, dec;
      for (int r = 0; r < repetitions; ++r) {
        enc.push_back(detail::seconds([&] { env = cipher.encrypt(plain, offset); }));
        Bytes back;
        dec.push_back(detail::seconds([&] { back = cipher.decrypt(env); }));
        sink += back.size();
      }
      report.points.push_back({size, detail::median(enc), detail::median(dec)});
    } catch (const std::bad_alloc&) {
      report.diagnostic = "allocation failed at " + std::to_string(size) + " bytes; report truncated";
      break;
    }
  }
  std::vector<double> x, ye, yd;
  for (const auto& p : report.points) {
    x.push_back(static_cast<double>(p.bytes));
    ye.push_back(p.encrypt_seconds);
    yd.push_back(p.decrypt_seconds);
  }
  report.encrypt_fit = fit_line(x, ye);
  report.decrypt_fit = fit_line(x, yd);
  if (report.diagnostic.empty() && report.encrypt_fit.degenerate)
    report.diagnostic = "degenerate fit: fewer than two sizes";
  static std::atomic<std::size_t> keep{0};
  keep += sink;
  return report;
}

struct ThroughputReport {
  unsigned threads = 1;
  std::size_t messages = 0;
  std::size_t bytes_per_message = 0;
  double seconds = 0.0;
  double bytes_per_second() const { return seconds > 0 ? static_cast<double>(messages * bytes_per_message) / seconds : 0.0; }
};

/// Aggregate encryption throughput of independent messages spread over
/// `threads` workers sharing one key set; each worker owns its buffers.
inline ThroughputReport bench_parallel(const KeySet& k, std::size_t message_bytes, std::size_t messages,
                                       unsigned threads, std::uint64_t seed = 0x9A7) {
  if (threads == 0) throw Error(ErrorCode::invalid_argument, "threads must be >= 1");
  const Cipher cipher(k);
  ThroughputReport rep{threads, messages, message_bytes, 0.0};
  std::vector<Bytes> inputs(threads, Bytes(message_bytes));
  for (unsigned t = 0; t < threads; ++t) SeededEntropy(seed + t).fill(inputs[t]);
  std::atomic<std::size_t> sink{0};
  rep.seconds = detail::seconds([&] {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        SeededEntropy rng(seed ^ (0x5EED0000ULL + t));
        for (std::size_t m = t; m < messages; m += threads) sink += cipher.encrypt(inputs[t], rng).payload.size();
      });
    for (auto& th : pool) th.join();
  });
  return rep;
}

}  // namespace ire
