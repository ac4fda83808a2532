#include "cli.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>
#include <unistd.h>

#include "ire/ire.hpp"

namespace ire::cli {
namespace {

namespace fs = std::filesystem;

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path);
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::io_failure, "read failed: " + path);
  return data;
}

// Writes to a sibling temporary and renames over the target, so a failed run
// never leaves a partial file behind.
void write_file_atomic(const std::string& path, const Bytes& data) {
  static std::atomic<unsigned> counter{0};
  const std::string tmp = path + ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (out) out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (out) out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::io_failure, "cannot write " + path);
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::io_failure, "cannot rename into " + path);
  }
}

CombineRule parse_rule(const std::string& s) { return (s == "a" || s == "A") ? CombineRule::A : CombineRule::B; }

// Calls f with the system source, or with a seeded one when a test seed was
// given (after warning that the output is not secure).
template <class F>
decltype(auto) with_entropy(const std::optional<std::uint64_t>& seed, std::ostream& err, F&& f) {
  if (seed) {
    err << "warning: deterministic test seed in use; output is NOT secure\n";
    SeededEntropy e(*seed);
    return f(e);
  }
  SystemEntropy e;
  return f(e);
}

struct Options {
  std::string key_path, input_path, output_path, rbs_from;
  std::uint64_t rbs_bits = kDefaultRbsBits;
  bool rbs_bits_given = false;
  std::string rule = "b";
  std::optional<std::uint64_t> offset;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
  bool csv = false;
  std::vector<std::size_t> sizes{1U << 16, 1U << 17, 1U << 18, 1U << 19, 1U << 20};
  int reps = 5;
  unsigned threads = 0;
};

int cmd_keygen(const Options& o, std::ostream& out, std::ostream& err) {
  KeySet k = with_entropy(o.seed, err, [&](auto& e) {
    if (o.rbs_from.empty()) return generate_keyset(e, o.rbs_bits, parse_rule(o.rule));
    const Bytes raw = read_file(o.rbs_from);
    // Imported loops use every bit of the file unless --rbs-bits was given.
    RbsLoop rbs = import_raw_rbs(raw, o.rbs_bits_given ? o.rbs_bits : 0);
    auto sub = generate_substitution_table(e);
    auto bytes = generate_window_permutation(e, kByteWindow);
    auto bits = generate_window_permutation(e, kBitWindow);
    return KeySet(std::move(sub), std::move(bytes), std::move(bits), std::move(rbs), parse_rule(o.rule));
  });
  const Bytes file = serialize_keyset(k);
  write_file_atomic(o.output_path, file);
  out << "wrote " << o.output_path << " (" << file.size() << " bytes, " << k.rbs().length() << " RBS bits, rule "
      << rule_name(k.rule()) << ")\n";
  out << "fingerprint: " << fingerprint(file) << "\n";
  return kOk;
}

int cmd_encrypt(const Options& o, std::ostream& out, std::ostream& err) {
  const KeySet k = parse_keyset(read_file(o.key_path));
  const Bytes plain = read_file(o.input_path);
  const std::uint64_t offset =
      o.offset ? *o.offset : with_entropy(o.seed, err, [&](auto& e) { return choose_offset(e, k.rbs().length()); });
  const CipherEnvelope env = encrypt(plain, k, offset);
  write_file_atomic(o.output_path, encode_envelope(env));
  if (o.verbose) out << "start offset: " << offset << "\n";
  return kOk;
}

int cmd_decrypt(const Options& o, std::ostream& out, std::ostream&) {
  const KeySet k = parse_keyset(read_file(o.key_path));
  const CipherEnvelope env = decode_envelope(read_file(o.input_path));
  const Bytes plain = decrypt(env, k);
  write_file_atomic(o.output_path, plain);
  if (o.verbose) out << "start offset: " << env.start_offset << "\n";
  return kOk;
}

int cmd_selftest(const Options&, std::ostream& out, std::ostream&) {
  const SelftestReport rep = run_selftest();
  for (const auto& c : rep.checks) out << (c.passed ? "PASS  " : "FAIL  ") << c.name << "\n";
  out << (rep.ok() ? "selftest passed\n" : "selftest FAILED\n");
  return rep.ok() ? kOk : kFailure;
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  const KeySet k = o.key_path.empty()
                       ? with_entropy(o.seed, err, [&](auto& e) { return generate_keyset(e, kDefaultRbsBits); })
                       : parse_keyset(read_file(o.key_path));
  if (o.threads > 0) {
    const std::size_t size = o.sizes.back();
    const auto t = bench_parallel(k, size, 4 * o.threads, o.threads);
    if (o.csv)
      out << "threads,messages,bytes_per_message,seconds,bytes_per_second\n"
          << t.threads << ',' << t.messages << ',' << t.bytes_per_message << ',' << t.seconds << ','
          << t.bytes_per_second() << "\n";
    else
      out << t.threads << " threads, " << t.messages << " x " << t.bytes_per_message << " bytes: "
          << std::fixed << std::setprecision(1) << t.bytes_per_second() / 1e6 << " MB/s aggregate\n";
    return kOk;
  }
  const BenchReport r = bench_linear(k, o.sizes, o.reps);
  if (o.csv) {
    out << "bytes,encrypt_seconds,decrypt_seconds\n";
    for (const auto& p : r.points) out << p.bytes << ',' << p.encrypt_seconds << ',' << p.decrypt_seconds << "\n";
    out << "# encrypt_fit," << r.encrypt_fit.slope << ',' << r.encrypt_fit.intercept << ',' << r.encrypt_fit.r_squared << "\n";
    out << "# decrypt_fit," << r.decrypt_fit.slope << ',' << r.decrypt_fit.intercept << ',' << r.decrypt_fit.r_squared << "\n";
  } else {
    out << std::setw(12) << "bytes" << std::setw(14) << "encrypt ms" << std::setw(14) << "decrypt ms" << std::setw(12)
        << "enc MB/s" << "\n";
    for (const auto& p : r.points)
      out << std::setw(12) << p.bytes << std::fixed << std::setprecision(3) << std::setw(14) << p.encrypt_seconds * 1e3
          << std::setw(14) << p.decrypt_seconds * 1e3 << std::setprecision(1) << std::setw(12)
          << static_cast<double>(p.bytes) / p.encrypt_seconds / 1e6 << "\n";
    out << std::setprecision(4) << "encrypt fit: r^2 = " << r.encrypt_fit.r_squared
        << ", decrypt fit: r^2 = " << r.decrypt_fit.r_squared << "\n";
  }
  if (!r.diagnostic.empty()) err << "note: " << r.diagnostic << "\n";
  return kOk;
}

int cmd_rndtest(const Options& o, std::ostream& out, std::ostream&) {
  BitBuffer bits;
  if (!o.key_path.empty()) {
    const KeySet k = parse_keyset(read_file(o.key_path));
    bits = k.rbs().fragment(0, static_cast<std::size_t>(k.rbs().length()));
  } else {
    bits = BitBuffer::from_bytes(read_file(o.input_path));
  }
  const std::pair<const char*, TestVerdict> rows[] = {{"monobit", monobit_test(bits)}, {"runs", runs_test(bits)}};
  auto verdict = [](const TestVerdict& v) { return !v.applicable ? "n/a" : v.pass ? "pass" : "fail"; };
  if (o.csv) {
    out << "test,bits,statistic,p_value,result\n";
    for (const auto& [name, v] : rows)
      out << name << ',' << bits.size() << ',' << v.statistic << ',' << v.p_value << ',' << verdict(v) << "\n";
  } else {
    out << bits.size() << " bits, alpha = " << kSignificance << "\n";
    for (const auto& [name, v] : rows)
      out << std::left << std::setw(10) << name << std::right << std::setw(16) << std::setprecision(6) << v.statistic
          << std::setw(14) << v.p_value << "  " << verdict(v) << "\n";
  }
  return rows[0].second.pass && rows[1].second.pass ? kOk : kFailure;
}

}  // namespace

std::string fingerprint(const std::vector<std::uint8_t>& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::io_failure, "SHA-256 failed");
  std::ostringstream s;
  for (unsigned i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return s.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Iterated random encryption toolkit", "ire"};
  app.require_subcommand(1);
  Options o;

  auto add_seed = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Deterministic test seed (INSECURE, testing only)");
  };

  auto* keygen = app.add_subcommand("keygen", "Generate a key set file");
  keygen->add_option("--out", o.output_path, "Key file to write")->required();
  auto* rbs_bits = keygen->add_option("--rbs-bits", o.rbs_bits, "Length of the random bit loop")
      ->check(CLI::Range(std::uint64_t{kMinRbsBits}, std::uint64_t{1} << 40));
  keygen->add_option("--rule", o.rule, "Combine rule: a (equal->1) or b (equal->0)")
      ->check(CLI::IsMember({"a", "b", "A", "B"}));
  keygen->add_option("--rbs-from", o.rbs_from, "Use an external MSB-first packed bit file as the loop")
      ->check(CLI::ExistingFile);
  add_seed(keygen);

  auto* enc = app.add_subcommand("encrypt", "Encrypt a file");
  enc->add_option("--key", o.key_path, "Key file")->required();
  enc->add_option("--in", o.input_path, "Plaintext file")->required();
  enc->add_option("--out", o.output_path, "Envelope file to write")->required();
  enc->add_option("--offset", o.offset, "Explicit 0-based start bit in the loop");
  enc->add_flag("-v,--verbose", o.verbose, "Print the start offset");
  add_seed(enc);

  auto* dec = app.add_subcommand("decrypt", "Decrypt an envelope file");
  dec->add_option("--key", o.key_path, "Key file")->required();
  dec->add_option("--in", o.input_path, "Envelope file")->required();
  dec->add_option("--out", o.output_path, "Plaintext file to write")->required();
  dec->add_flag("-v,--verbose", o.verbose, "Print the start offset");

  auto* self = app.add_subcommand("selftest", "Run known-answer vectors and a quick property sweep");

  auto* bench = app.add_subcommand("bench", "Time encryption and decryption against message size");
  bench->add_option("--key", o.key_path, "Key file (default: fresh in-memory key set)");
  bench->add_option("--sizes", o.sizes, "Message sizes in bytes, strictly increasing")->delimiter(',');
  bench->add_option("--reps", o.reps, "Repetitions per size (median taken)")->check(CLI::Range(3, 1000));
  bench->add_option("--threads", o.threads, "Measure aggregate throughput with this many workers");
  bench->add_flag("--csv", o.csv, "Comma-separated output");
  add_seed(bench);

  auto* rnd = app.add_subcommand("rndtest", "Monobit and runs tests on a key's loop or a raw file");
  auto* rkey = rnd->add_option("--key", o.key_path, "Key file whose loop is tested");
  auto* rin = rnd->add_option("--in", o.input_path, "Raw file tested as a bit stream");
  rkey->excludes(rin);
  rnd->add_flag("--csv", o.csv, "Comma-separated output");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (rnd->parsed() && o.key_path.empty() && o.input_path.empty())
      throw CLI::ValidationError("rndtest", "one of --key or --in is required");
    o.rbs_bits_given = rbs_bits->count() > 0;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (keygen->parsed()) return cmd_keygen(o, out, err);
    if (enc->parsed()) return cmd_encrypt(o, out, err);
    if (dec->parsed()) return cmd_decrypt(o, out, err);
    if (self->parsed()) return cmd_selftest(o, out, err);
    if (bench->parsed()) return cmd_bench(o, out, err);
    if (rnd->parsed()) return cmd_rndtest(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::invalid_argument ? kUsage : kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace ire::cli
