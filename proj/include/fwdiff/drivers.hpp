#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <exception>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "dual.hpp"

namespace fwdiff {

/// Largest lane count instantiated for gradient and Jacobian passes. Larger
/// requested chunks are reduced to this.
inline constexpr std::size_t kMaxChunk = 128;

/// Chunk used when ChunkConfig leaves it unset (further clamped to k).
inline constexpr std::size_t kDefaultChunk = 8;

/// Largest per-level chunk for nested (Hessian / third-order) passes.
inline constexpr std::size_t kMaxNestedChunk = 8;

/// Largest input dimension accepted by third_order_tensor.
inline constexpr std::size_t kMaxThirdOrderDim = 8;

struct ChunkConfig {
  /// Lanes seeded per pass; unset means min(k, kDefaultChunk).
  std::optional<std::size_t> chunk_size;
  /// Worker threads; 1 runs serially.
  std::size_t threads = 1;
};

struct GradientResult {
  std::vector<double> values;
  double f_value = std::numeric_limits<double>::quiet_NaN();
  std::size_t chunk = 0;
  std::size_t passes = 0;

  std::size_t size() const noexcept { return values.size(); }
};

struct JacobianResult {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;  // row-major, rows x cols
  std::vector<double> f_values;
  std::size_t passes = 0;

  double at(std::size_t i, std::size_t j) const { return entries.at(i * cols + j); }
};

struct HessianResult {
  std::size_t dim = 0;
  std::vector<double> entries;  // row-major, dim x dim
  std::vector<double> gradient;
  double f_value = std::numeric_limits<double>::quiet_NaN();
  std::size_t passes = 0;

  double at(std::size_t i, std::size_t j) const { return entries.at(i * dim + j); }
};

struct ThirdOrderResult {
  std::size_t dim = 0;
  std::vector<double> entries;  // entries[(a * dim + b) * dim + c]
  std::size_t passes = 0;

  double at(std::size_t a, std::size_t b, std::size_t c) const {
    return entries.at((a * dim + b) * dim + c);
  }
};

constexpr std::size_t pass_count(std::size_t k, std::size_t chunk) noexcept {
  return (k + chunk - 1) / chunk;
}

/// Validates cfg against an input of dimension k and returns the chunk size
/// that will actually be used.
inline std::size_t effective_chunk(ChunkConfig const& cfg, std::size_t k) {
  if (k == 0) throw std::invalid_argument("empty input");
  if (cfg.threads == 0) throw std::invalid_argument("thread count must be at least 1");
  std::size_t n = cfg.chunk_size.value_or(kDefaultChunk);
  if (n == 0) throw std::invalid_argument("chunk size must be at least 1");
  return std::min({n, k, kMaxChunk});
}

/// Wraps a target function and counts how often it is evaluated. Copies share
/// the counter.
template <typename F>
class CountingFunction {
 public:
  explicit CountingFunction(F f)
      : f_(std::move(f)), count_(std::make_shared<std::atomic<std::size_t>>(0)) {}

  template <typename... Args>
  decltype(auto) operator()(Args&&... args) const {
    count_->fetch_add(1, std::memory_order_relaxed);
    return f_(std::forward<Args>(args)...);
  }

  std::size_t count() const noexcept { return count_->load(); }
  void reset() noexcept { count_->store(0); }

 private:
  F f_;
  std::shared_ptr<std::atomic<std::size_t>> count_;
};

namespace detail {

template <std::size_t... Ws>
struct width_list {};

using lane_widths =
    width_list<1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 20, 24, 32, 48, 64, 96, 128>;
using nested_widths = width_list<1, 2, 4, 8>;

// Calls body with the smallest instantiated width W >= n. Unused lanes of a
// wider dual stay zero.
template <std::size_t W, std::size_t... Rest, typename Body>
decltype(auto) dispatch_width(std::size_t n, width_list<W, Rest...>, Body&& body) {
  if constexpr (sizeof...(Rest) == 0) {
    return body(std::integral_constant<std::size_t, W>{});
  } else {
    if (n <= W) return body(std::integral_constant<std::size_t, W>{});
    return dispatch_width(n, width_list<Rest...>{}, std::forward<Body>(body));
  }
}

inline bool same_bits(double a, double b) noexcept {
  return std::memcmp(&a, &b, sizeof(double)) == 0;
}

inline void assert_pure([[maybe_unused]] double expected, [[maybe_unused]] double got) {
#ifndef NDEBUG
  if (!same_bits(expected, got) && !(std::isnan(expected) && std::isnan(got))) {
    throw std::logic_error("target function returned different values across passes");
  }
#endif
}

// Runs body(first, last) over disjoint contiguous blocks of [begin, end),
// one block per worker, and rethrows the first worker exception.
template <typename Body>
void for_pass_blocks(std::size_t begin, std::size_t end, std::size_t threads, Body&& body) {
  std::size_t const total = end - begin;
  std::size_t const workers = std::max<std::size_t>(1, std::min(threads, total));
  if (workers == 1) {
    body(begin, end);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t const first = begin + w * total / workers;
      std::size_t const last = begin + (w + 1) * total / workers;
      pool.emplace_back([&, w, first, last] {
        try {
          body(first, last);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto const& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Gradient passes [first_pass, last_pass) with W-lane duals; writes each
// pass's coefficients into out and returns the value channel of the first pass.
template <std::size_t W, typename F>
double gradient_passes(F& f, std::span<const double> x, std::size_t chunk, std::size_t first_pass,
                       std::size_t last_pass, std::span<double> out) {
  using D = Dual<double, W>;
  std::vector<D> buf(x.begin(), x.end());
  double f_value = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t p = first_pass; p < last_pass; ++p) {
    std::size_t const lo = p * chunk;
    std::size_t const hi = std::min(lo + chunk, x.size());
    for (std::size_t i = lo; i < hi; ++i) buf[i].partials[i - lo] = 1.0;

    D const r = f(std::span<const D>(buf));

    for (std::size_t i = lo; i < hi; ++i) {
      out[i] = r.partials[i - lo];
      buf[i].partials[i - lo] = 0.0;
    }
    if (p == first_pass) {
      f_value = r.value;
    } else {
      // Impure target functions show up as a changing value channel.
      assert_pure(f_value, r.value);
    }
  }
  return f_value;
}

}  // namespace detail

// ----------------------------------------------------------------------------
// Scalar derivatives
// ----------------------------------------------------------------------------

/// f'(x) for f callable on Dual<double, 1>.
template <typename F>
double derivative(F&& f, double x) {
  using D = Dual<double, 1>;
  D const r = f(seed_unit<1>(x, 0));
  return r.partials[0];
}

/// f''(x) through a Dual<Dual<double, 1>, 1> seeded as
/// Dual(Dual(x, 1), Dual(1, 0)).
template <typename F>
double second_derivative(F&& f, double x) {
  using Inner = Dual<double, 1>;
  using D = Dual<Inner, 1>;
  D const seed{Inner(x, {1.0}), {Inner(1.0, {0.0})}};
  D const r = f(seed);
  return r.partials[0].partials[0];
}

// ----------------------------------------------------------------------------
// Gradient
// ----------------------------------------------------------------------------

/// Gradient of a scalar function of k inputs with passes spread over
/// cfg.threads workers. Each worker owns a contiguous block of passes and
/// therefore a disjoint slice of the output, so the result is bitwise equal to
/// the serial one. f must be safe to call concurrently.
template <typename F>
GradientResult gradient_threaded(F&& f, std::span<const double> x, ChunkConfig const& cfg) {
  std::size_t const chunk = effective_chunk(cfg, x.size());
  std::size_t const passes = pass_count(x.size(), chunk);

  GradientResult result;
  result.values.assign(x.size(), 0.0);
  result.chunk = chunk;
  result.passes = passes;

  detail::dispatch_width(chunk, detail::lane_widths{}, [&](auto width) {
    constexpr std::size_t W = decltype(width)::value;
    detail::for_pass_blocks(0, passes, cfg.threads, [&](std::size_t first, std::size_t last) {
      double const v =
          detail::gradient_passes<W>(f, x, chunk, first, last, std::span<double>(result.values));
      if (first == 0) result.f_value = v;
    });
  });
  return result;
}

/// Chunked forward-mode gradient: ceil(k / N) evaluations of f, each seeding N
/// consecutive inputs with unit lanes. f takes std::span<const Dual<double, W>>
/// and returns Dual<double, W>.
template <typename F>
GradientResult gradient(F&& f, std::span<const double> x, ChunkConfig const& cfg = {}) {
  return gradient_threaded(std::forward<F>(f), x, cfg);
}

template <typename F>
GradientResult gradient(F&& f, std::vector<double> const& x, ChunkConfig const& cfg = {}) {
  return gradient(std::forward<F>(f), std::span<const double>(x), cfg);
}

// ----------------------------------------------------------------------------
// Jacobian
// ----------------------------------------------------------------------------

/// Dense Jacobian of a vector function. f returns a sized range of duals whose
/// length must not change between passes.
template <typename F>
JacobianResult jacobian(F&& f, std::span<const double> x, ChunkConfig const& cfg = {}) {
  std::size_t const chunk = effective_chunk(cfg, x.size());
  std::size_t const passes = pass_count(x.size(), chunk);
  std::size_t const k = x.size();

  JacobianResult result;
  result.cols = k;
  result.passes = passes;

  detail::dispatch_width(chunk, detail::lane_widths{}, [&](auto width) {
    constexpr std::size_t W = decltype(width)::value;
    using D = Dual<double, W>;

    auto run = [&](std::size_t first, std::size_t last) {
      std::vector<D> buf(x.begin(), x.end());
      for (std::size_t p = first; p < last; ++p) {
        std::size_t const lo = p * chunk;
        std::size_t const hi = std::min(lo + chunk, k);
        for (std::size_t j = lo; j < hi; ++j) buf[j].partials[j - lo] = 1.0;

        auto const out = f(std::span<const D>(buf));
        std::size_t const m = std::size(out);

        if (p == 0) {
          result.rows = m;
          result.entries.assign(m * k, 0.0);
          result.f_values.resize(m);
          std::size_t i = 0;
          for (auto const& o : out) result.f_values[i++] = o.value;
        } else if (m != result.rows) {
          throw std::runtime_error("jacobian: output length changed from " +
                                   std::to_string(result.rows) + " to " + std::to_string(m));
        }

        std::size_t i = 0;
        for (auto const& o : out) {
          for (std::size_t j = lo; j < hi; ++j) result.entries[i * k + j] = o.partials[j - lo];
          ++i;
        }
        for (std::size_t j = lo; j < hi; ++j) buf[j].partials[j - lo] = 0.0;
      }
    };

    // The first pass fixes the output shape before the rest fan out.
    run(0, 1);
    detail::for_pass_blocks(1, passes, cfg.threads, run);
  });
  return result;
}

template <typename F>
JacobianResult jacobian(F&& f, std::vector<double> const& x, ChunkConfig const& cfg = {}) {
  return jacobian(std::forward<F>(f), std::span<const double>(x), cfg);
}

// ----------------------------------------------------------------------------
// Hessian (forward over forward)
// ----------------------------------------------------------------------------

namespace detail {

inline std::size_t nested_chunk(std::size_t requested, std::size_t k) {
  if (requested == 0) throw std::invalid_argument("chunk size must be at least 1");
  return std::min({requested, k, kMaxNestedChunk});
}

template <std::size_t MW, std::size_t NW, typename F>
void hessian_passes(F& f, std::span<const double> x, std::size_t m, std::size_t n,
                    HessianResult& out) {
  using Inner = Dual<double, NW>;
  using D = Dual<Inner, MW>;
  std::size_t const k = x.size();
  std::vector<D> buf;
  buf.reserve(k);
  for (double xi : x) buf.emplace_back(Inner(xi));

  for (std::size_t p = 0; p < pass_count(k, m); ++p) {
    std::size_t const plo = p * m;
    std::size_t const phi = std::min(plo + m, k);
    for (std::size_t j = plo; j < phi; ++j) buf[j].partials[j - plo] = Inner(1.0);

    for (std::size_t q = 0; q < pass_count(k, n); ++q) {
      std::size_t const qlo = q * n;
      std::size_t const qhi = std::min(qlo + n, k);
      for (std::size_t i = qlo; i < qhi; ++i) buf[i].value.partials[i - qlo] = 1.0;

      D const r = f(std::span<const D>(buf));

      for (std::size_t i = qlo; i < qhi; ++i) {
        for (std::size_t j = plo; j < phi; ++j) {
          out.entries[i * k + j] = r.partials[j - plo].partials[i - qlo];
        }
        if (p == 0) out.gradient[i] = r.value.partials[i - qlo];
        buf[i].value.partials[i - qlo] = 0.0;
      }
      if (p == 0 && q == 0) out.f_value = r.value.value;
    }
    for (std::size_t j = plo; j < phi; ++j) buf[j].partials[j - plo] = Inner(0.0);
  }
}

}  // namespace detail

/// Hessian from Dual<Dual<double, N>, M> passes: ceil(k/M) * ceil(k/N)
/// evaluations of f. Gradient and value come out of the same evaluations.
template <typename F>
HessianResult hessian(F&& f, std::span<const double> x, std::size_t outer_chunk,
                      std::size_t inner_chunk) {
  std::size_t const k = x.size();
  if (k == 0) throw std::invalid_argument("empty input");
  std::size_t const m = detail::nested_chunk(outer_chunk, k);
  std::size_t const n = detail::nested_chunk(inner_chunk, k);

  HessianResult result;
  result.dim = k;
  result.entries.assign(k * k, 0.0);
  result.gradient.assign(k, 0.0);
  result.passes = pass_count(k, m) * pass_count(k, n);

  detail::dispatch_width(m, detail::nested_widths{}, [&](auto mw) {
    detail::dispatch_width(n, detail::nested_widths{}, [&](auto nw) {
      detail::hessian_passes<decltype(mw)::value, decltype(nw)::value>(f, x, m, n, result);
    });
  });
  return result;
}

template <typename F>
HessianResult hessian(F&& f, std::span<const double> x) {
  return hessian(std::forward<F>(f), x, kDefaultChunk, kDefaultChunk);
}

template <typename F>
HessianResult hessian(F&& f, std::vector<double> const& x, std::size_t outer_chunk = kDefaultChunk,
                      std::size_t inner_chunk = kDefaultChunk) {
  return hessian(std::forward<F>(f), std::span<const double>(x), outer_chunk, inner_chunk);
}

// ----------------------------------------------------------------------------
// Third-order tensor
// ----------------------------------------------------------------------------

/// All third partials of f via triple-nested duals, ceil(k/M) * ceil(k/N) *
/// ceil(k/L) evaluations. Only for k <= kMaxThirdOrderDim; larger problems
/// should be split into blocks of at most that many variables.
template <typename F>
ThirdOrderResult third_order_tensor(F&& f, std::span<const double> x, std::size_t m,
                                    std::size_t n, std::size_t l) {
  std::size_t const k = x.size();
  if (k == 0) throw std::invalid_argument("empty input");
  if (k > kMaxThirdOrderDim) {
    throw std::invalid_argument("third_order_tensor: dimension " + std::to_string(k) +
                                " exceeds " + std::to_string(kMaxThirdOrderDim) +
                                "; differentiate sub-blocks of variables in separate calls");
  }
  m = detail::nested_chunk(m, k);
  n = detail::nested_chunk(n, k);
  l = detail::nested_chunk(l, k);

  ThirdOrderResult result;
  result.dim = k;
  result.entries.assign(k * k * k, 0.0);
  result.passes = pass_count(k, m) * pass_count(k, n) * pass_count(k, l);

  detail::dispatch_width(std::max({m, n, l}), detail::nested_widths{}, [&](auto width) {
    constexpr std::size_t C = decltype(width)::value;
    using D1 = Dual<double, C>;
    using D2 = Dual<D1, C>;
    using D3 = Dual<D2, C>;

    std::vector<D3> buf;
    buf.reserve(k);
    for (double xi : x) buf.emplace_back(D2(D1(xi)));

    for (std::size_t a0 = 0; a0 < k; a0 += m) {
      std::size_t const a1 = std::min(a0 + m, k);
      for (std::size_t a = a0; a < a1; ++a) buf[a].partials[a - a0] = D2(1.0);
      for (std::size_t b0 = 0; b0 < k; b0 += n) {
        std::size_t const b1 = std::min(b0 + n, k);
        for (std::size_t b = b0; b < b1; ++b) buf[b].value.partials[b - b0] = D1(1.0);
        for (std::size_t c0 = 0; c0 < k; c0 += l) {
          std::size_t const c1 = std::min(c0 + l, k);
          for (std::size_t c = c0; c < c1; ++c) buf[c].value.value.partials[c - c0] = 1.0;

          D3 const r = f(std::span<const D3>(buf));
          for (std::size_t a = a0; a < a1; ++a) {
            for (std::size_t b = b0; b < b1; ++b) {
              for (std::size_t c = c0; c < c1; ++c) {
                result.entries[(a * k + b) * k + c] =
                    r.partials[a - a0].partials[b - b0].partials[c - c0];
              }
            }
          }
          for (std::size_t c = c0; c < c1; ++c) buf[c].value.value.partials[c - c0] = 0.0;
        }
        for (std::size_t b = b0; b < b1; ++b) buf[b].value.partials[b - b0] = D1(0.0);
      }
      for (std::size_t a = a0; a < a1; ++a) buf[a].partials[a - a0] = D2(0.0);
    }
  });
  return result;
}

template <typename F>
ThirdOrderResult third_order_tensor(F&& f, std::vector<double> const& x, std::size_t m = 1,
                                    std::size_t n = 1, std::size_t l = 1) {
  return third_order_tensor(std::forward<F>(f), std::span<const double>(x), m, n, l);
}

}  // namespace fwdiff
