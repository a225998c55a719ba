#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "drivers.hpp"
#include "testfns.hpp"

namespace fwdiff::bench {

enum class TargetFunction { rosenbrock, ackley };

inline std::optional<TargetFunction> parse_function(std::string_view name) {
  if (name == "rosenbrock") return TargetFunction::rosenbrock;
  if (name == "ackley") return TargetFunction::ackley;
  return std::nullopt;
}

inline std::string_view function_name(TargetFunction fn) {
  return fn == TargetFunction::rosenbrock ? "rosenbrock" : "ackley";
}

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Generic functor over either benchmark function, usable with plain doubles
/// and with duals of any width.
struct Target {
  TargetFunction fn = TargetFunction::rosenbrock;
  AckleyParams params{};

  template <typename T>
  T operator()(std::span<const T> x) const {
    return fn == TargetFunction::rosenbrock ? rosenbrock(x) : ackley(x, params);
  }
};

/// Seeded input: uniform in [-2, 2] for Rosenbrock, [-1, 1] for Ackley.
inline std::vector<double> random_input(TargetFunction fn, std::size_t k,
                                        std::uint64_t seed = kDefaultSeed) {
  double const half = fn == TargetFunction::rosenbrock ? 2.0 : 1.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-half, half);
  std::vector<double> x(k);
  for (auto& xi : x) xi = dist(rng);
  return x;
}

inline std::vector<double> analytic_gradient(TargetFunction fn, std::span<const double> x) {
  return fn == TargetFunction::rosenbrock ? rosenbrock_grad_analytic(x) : ackley_grad_analytic(x);
}

// ----------------------------------------------------------------------------
// Timing
// ----------------------------------------------------------------------------

struct BenchRecord {
  std::string function;
  std::size_t k = 0;
  std::size_t chunk = 0;
  std::size_t threads = 1;
  std::size_t reps = 0;
  double min_seconds = 0.0;
  double mean_seconds = 0.0;

  friend bool operator==(BenchRecord const&, BenchRecord const&) = default;
};

inline constexpr std::size_t kMinReps = 3;

/// One untimed warm-up, then `reps` timed gradient evaluations.
inline BenchRecord time_gradient(TargetFunction fn, std::span<const double> x, std::size_t chunk,
                                 std::size_t threads, std::size_t reps) {
  if (reps < kMinReps) {
    throw std::invalid_argument("reps must be at least " + std::to_string(kMinReps));
  }
  if (chunk == 0) throw std::invalid_argument("chunk size must be at least 1");
  if (threads == 0) throw std::invalid_argument("thread count must be at least 1");

  using clock = std::chrono::steady_clock;
  ChunkConfig const cfg{chunk, threads};
  Target const target{fn};
  volatile double sink = gradient(target, x, cfg).values.front();

  double min_s = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    auto const t0 = clock::now();
    auto const g = gradient(target, x, cfg);
    auto const t1 = clock::now();
    sink = g.values.back();
    double const s = std::chrono::duration<double>(t1 - t0).count();
    min_s = std::min(min_s, s);
    total += s;
  }
  (void)sink;

  BenchRecord rec;
  rec.function = std::string(function_name(fn));
  rec.k = x.size();
  rec.chunk = chunk;
  rec.threads = threads;
  rec.reps = reps;
  rec.min_seconds = min_s;
  rec.mean_seconds = std::max(min_s, total / static_cast<double>(reps));
  return rec;
}

/// One record per chunk size at a fixed seeded input of size k.
inline std::vector<BenchRecord> run_chunk_sweep(TargetFunction fn, std::size_t k,
                                                std::span<const std::size_t> chunks,
                                                std::size_t reps,
                                                std::uint64_t seed = kDefaultSeed) {
  if (k < 2) throw std::invalid_argument("input size must be at least 2");
  auto const x = random_input(fn, k, seed);
  std::vector<BenchRecord> out;
  out.reserve(chunks.size());
  for (std::size_t n : chunks) out.push_back(time_gradient(fn, x, n, 1, reps));
  return out;
}

/// For each k, a serial record and, when threads > 1, a threaded one.
inline std::vector<BenchRecord> run_size_sweep(TargetFunction fn, std::span<const std::size_t> sizes,
                                               std::size_t chunk, std::size_t threads,
                                               std::size_t reps,
                                               std::uint64_t seed = kDefaultSeed) {
  std::vector<BenchRecord> out;
  for (std::size_t k : sizes) {
    if (k < 2) throw std::invalid_argument("input size must be at least 2");
    auto const x = random_input(fn, k, seed);
    out.push_back(time_gradient(fn, x, chunk, 1, reps));
    if (threads > 1) out.push_back(time_gradient(fn, x, chunk, threads, reps));
  }
  return out;
}

// ----------------------------------------------------------------------------
// Verification
// ----------------------------------------------------------------------------

inline constexpr double kFdStep = 1e-6;
inline constexpr double kDefaultTolerance = 1e-5;

/// |a - b| scaled by max(|a|, |b|, 1), so components near zero are judged on
/// absolute error.
inline double relative_error(double a, double b) {
  if (a == b) return 0.0;
  double const scale = std::max({std::abs(a), std::abs(b), 1.0});
  double const e = std::abs(a - b) / scale;
  return std::isnan(e) ? std::numeric_limits<double>::infinity() : e;
}

struct ComponentCheck {
  std::size_t index = 0;
  double ad = 0.0;
  double analytic = 0.0;
  double fd = 0.0;
  double err_analytic = 0.0;
  double err_fd = 0.0;
};

struct VerifyReport {
  TargetFunction function = TargetFunction::rosenbrock;
  std::size_t k = 0;
  std::size_t chunk = 0;
  double tolerance = kDefaultTolerance;
  double f_value = 0.0;
  std::size_t expected_passes = 0;
  std::size_t evaluations = 0;
  double max_err_analytic = 0.0;
  double max_err_fd = 0.0;
  double max_abs_gradient = 0.0;
  bool chunk_invariant = true;
  std::vector<ComponentCheck> offending;

  bool passed() const {
    return offending.empty() && chunk_invariant && evaluations == expected_passes;
  }
};

/// AD gradient against the closed form and central differences, plus a chunk
/// invariance check against one-lane and all-lane passes.
inline VerifyReport verify_at(TargetFunction fn, std::span<const double> x, std::size_t chunk,
                              double tol = kDefaultTolerance) {
  if (chunk == 0) throw std::invalid_argument("chunk size must be at least 1");
  Target const target{fn};
  CountingFunction counted(target);
  ChunkConfig const cfg{chunk, 1};
  auto const ad = gradient(counted, x, cfg);

  VerifyReport rep;
  rep.function = fn;
  rep.k = x.size();
  rep.chunk = ad.chunk;
  rep.tolerance = tol;
  rep.f_value = ad.f_value;
  rep.expected_passes = pass_count(x.size(), ad.chunk);
  rep.evaluations = counted.count();

  auto const analytic = analytic_gradient(fn, x);
  auto const fd = fd_gradient([&](std::span<const double> v) { return target(v); }, x, kFdStep);

  for (std::size_t i = 0; i < x.size(); ++i) {
    ComponentCheck c{i, ad.values[i], analytic[i], fd[i], relative_error(ad.values[i], analytic[i]),
                     relative_error(ad.values[i], fd[i])};
    rep.max_err_analytic = std::max(rep.max_err_analytic, c.err_analytic);
    rep.max_err_fd = std::max(rep.max_err_fd, c.err_fd);
    rep.max_abs_gradient = std::max(rep.max_abs_gradient, std::abs(ad.values[i]));
    if (!(c.err_analytic <= tol) || !(c.err_fd <= tol)) rep.offending.push_back(c);
  }

  for (std::size_t n : {std::size_t{1}, x.size()}) {
    auto const other = gradient(target, x, ChunkConfig{n, 1});
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!detail::same_bits(other.values[i], ad.values[i])) rep.chunk_invariant = false;
    }
  }
  return rep;
}

inline VerifyReport verify(TargetFunction fn, std::size_t k, std::size_t chunk,
                           std::uint64_t seed = kDefaultSeed, double tol = kDefaultTolerance) {
  if (k < 2) throw std::invalid_argument("input size must be at least 2");
  auto const x = random_input(fn, k, seed);
  return verify_at(fn, x, chunk, tol);
}

inline void print_report(std::ostream& os, VerifyReport const& r) {
  os << "function: " << function_name(r.function) << "\n"
     << "k: " << r.k << "  chunk: " << r.chunk << "\n"
     << "f(x): " << to_string(r.f_value) << "\n"
     << "evaluations: " << r.evaluations << " (expected " << r.expected_passes << ")\n"
     << "max |grad|: " << to_string(r.max_abs_gradient) << "\n"
     << "max rel err AD vs analytic: " << to_string(r.max_err_analytic) << "\n"
     << "max rel err AD vs finite differences: " << to_string(r.max_err_fd) << "\n"
     << "chunk invariant: " << (r.chunk_invariant ? "yes" : "no") << "\n";
  for (auto const& c : r.offending) {
    os << "  component " << c.index << ": ad=" << to_string(c.ad)
       << " analytic=" << to_string(c.analytic) << " fd=" << to_string(c.fd)
       << " err_analytic=" << to_string(c.err_analytic) << " err_fd=" << to_string(c.err_fd)
       << "\n";
  }
  os << (r.passed() ? "PASS" : "FAIL") << " (tol " << to_string(r.tolerance) << ")\n";
}

// ----------------------------------------------------------------------------
// CSV
// ----------------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader =
    "function,k,chunk,threads,reps,min_seconds,mean_seconds";

inline std::string format_csv(std::span<const BenchRecord> records) {
  auto num = [](double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
  };
  std::string out(kCsvHeader);
  out += '\n';
  for (auto const& r : records) {
    out += r.function + ',' + std::to_string(r.k) + ',' + std::to_string(r.chunk) + ',' +
           std::to_string(r.threads) + ',' + std::to_string(r.reps) + ',' + num(r.min_seconds) +
           ',' + num(r.mean_seconds) + '\n';
  }
  return out;
}

/// Throws std::runtime_error when the file cannot be written.
inline void emit_csv(std::span<const BenchRecord> records, std::string const& path) {
  if (records.empty()) throw std::invalid_argument("emit_csv: no records");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << format_csv(records);
  os.flush();
  if (!os) throw std::runtime_error("failed writing " + path);
}

inline std::vector<BenchRecord> parse_csv(std::string_view text) {
  auto fail = [](std::string const& what) { throw std::runtime_error("parse_csv: " + what); };

  std::vector<std::string_view> lines;
  while (!text.empty()) {
    auto const nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  if (lines.empty() || lines.front() != kCsvHeader) fail("missing header");

  auto to_size = [&](std::string_view s) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) fail("bad integer '" + std::string(s) + "'");
    return v;
  };
  auto to_double = [&](std::string_view s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) fail("bad number '" + std::string(s) + "'");
    return v;
  };

  std::vector<BenchRecord> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    std::string_view line = lines[li];
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t pos;
    while ((pos = line.find(',')) != std::string_view::npos) {
      f.push_back(line.substr(0, pos));
      line.remove_prefix(pos + 1);
    }
    f.push_back(line);
    if (f.size() != 7) fail("expected 7 fields on line " + std::to_string(li + 1));
    out.push_back(BenchRecord{std::string(f[0]), to_size(f[1]), to_size(f[2]), to_size(f[3]),
                              to_size(f[4]), to_double(f[5]), to_double(f[6])});
  }
  return out;
}

}  // namespace fwdiff::bench
