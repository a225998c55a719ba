#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <concepts>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

#include "partials.hpp"

namespace fwdiff {

template <typename T, std::size_t N>
struct Dual;

// ----------------------------------------------------------------------------
// Traits
// ----------------------------------------------------------------------------

template <typename T>
struct is_dual : std::false_type {};

template <typename T, std::size_t N>
struct is_dual<Dual<T, N>> : std::true_type {};

template <typename T>
inline constexpr bool is_dual_v = is_dual<T>::value;

template <typename T>
concept Arithmetic = std::is_arithmetic_v<T>;

/// Innermost floating type of a (possibly nested) dual.
template <typename T>
struct base_scalar {
  using type = T;
};

template <typename T, std::size_t N>
struct base_scalar<Dual<T, N>> {
  using type = typename base_scalar<T>::type;
};

template <typename T>
using base_scalar_t = typename base_scalar<T>::type;

/// Number of Dual layers wrapped around the base scalar.
template <typename T>
inline constexpr std::size_t nesting_depth_v = 0;

template <typename T, std::size_t N>
inline constexpr std::size_t nesting_depth_v<Dual<T, N>> = 1 + nesting_depth_v<T>;

// A plain number, or the element type of a nested dual; either can be combined
// with Dual<T, N> without touching its lanes.
template <typename S, typename T>
concept ScalarOperand = Arithmetic<S> || (std::same_as<S, T> && !Arithmetic<T>);

// ----------------------------------------------------------------------------
// Dual
// ----------------------------------------------------------------------------

/// Multidimensional dual number: value + sum_i partials[i] * eps_i with
/// eps_i * eps_j = 0. T is either a floating type or another Dual.
template <typename T, std::size_t N>
struct Dual {
  using value_type = T;
  using partials_type = Partials<T, N>;
  static constexpr std::size_t lanes = N;

  T value{};
  Partials<T, N> partials{};

  constexpr Dual() = default;

  // Constants lift implicitly with zero partials.
  template <Arithmetic S>
  constexpr Dual(S s) : value(s) {}

  constexpr Dual(T v)
    requires(!Arithmetic<T>)
      : value(std::move(v)) {}

  constexpr Dual(T v, Partials<T, N> p) : value(std::move(v)), partials(std::move(p)) {}

  /// Componentwise equality including partials (operator== compares values only).
  constexpr bool identical(Dual const& o) const {
    if constexpr (is_dual_v<T>) {
      if (!value.identical(o.value)) return false;
    } else {
      if (!(value == o.value)) return false;
    }
    return partials.identical(o.partials);
  }

  constexpr Dual& operator+=(Dual const& o) { return *this = *this + o; }
  constexpr Dual& operator-=(Dual const& o) { return *this = *this - o; }
  constexpr Dual& operator*=(Dual const& o) { return *this = *this * o; }
  constexpr Dual& operator/=(Dual const& o) { return *this = *this / o; }

  template <ScalarOperand<T> S>
  constexpr Dual& operator+=(S const& s) { return *this = *this + s; }
  template <ScalarOperand<T> S>
  constexpr Dual& operator-=(S const& s) { return *this = *this - s; }
  template <ScalarOperand<T> S>
  constexpr Dual& operator*=(S const& s) { return *this = *this * s; }
  template <ScalarOperand<T> S>
  constexpr Dual& operator/=(S const& s) { return *this = *this / s; }
};

// ----------------------------------------------------------------------------
// Construction and access
// ----------------------------------------------------------------------------

/// Throws std::invalid_argument when the number of partials is not N.
template <std::size_t N, typename T>
constexpr Dual<T, N> make_dual(T value, std::span<const T> partials) {
  if (partials.size() != N) {
    throw std::invalid_argument("make_dual: expected " + std::to_string(N) +
                                " partials, got " + std::to_string(partials.size()));
  }
  Partials<T, N> p;
  for (std::size_t i = 0; i < N; ++i) p[i] = partials[i];
  return {std::move(value), p};
}

template <std::size_t N, typename T>
constexpr Dual<T, N> make_dual(T value, std::initializer_list<T> partials) {
  return make_dual<N, T>(std::move(value), std::span<const T>(partials.begin(), partials.size()));
}

/// Dual with a unit epsilon in `lane`. Throws std::out_of_range when lane >= N.
template <std::size_t N, typename T>
constexpr Dual<T, N> seed_unit(T value, std::size_t lane) {
  return {std::move(value), Partials<T, N>::unit(lane)};
}

template <Arithmetic S>
constexpr S value(S x) noexcept {
  return x;
}

template <typename T, std::size_t N>
constexpr T const& value(Dual<T, N> const& d) noexcept {
  return d.value;
}

template <typename T, std::size_t N>
constexpr Partials<T, N> const& partials(Dual<T, N> const& d) noexcept {
  return d.partials;
}

/// Single lane; throws std::out_of_range.
template <typename T, std::size_t N>
constexpr T const& partials(Dual<T, N> const& d, std::size_t lane) {
  return d.partials.at(lane);
}

/// Strips every nesting level down to the base scalar value.
template <typename T>
constexpr base_scalar_t<T> base_value(T const& x) {
  if constexpr (is_dual_v<T>) {
    return base_value(x.value);
  } else {
    return x;
  }
}

// ----------------------------------------------------------------------------
// Arithmetic
// ----------------------------------------------------------------------------

template <typename T, std::size_t N>
constexpr Dual<T, N> operator+(Dual<T, N> const& d) {
  return d;
}

template <typename T, std::size_t N>
constexpr Dual<T, N> operator-(Dual<T, N> const& d) {
  return {-d.value, -d.partials};
}

template <typename T, std::size_t N>
constexpr Dual<T, N> operator+(Dual<T, N> const& a, Dual<T, N> const& b) {
  return {a.value + b.value, a.partials + b.partials};
}

template <typename T, std::size_t N>
constexpr Dual<T, N> operator-(Dual<T, N> const& a, Dual<T, N> const& b) {
  return {a.value - b.value, a.partials - b.partials};
}

template <typename T, std::size_t N>
constexpr Dual<T, N> operator*(Dual<T, N> const& a, Dual<T, N> const& b) {
  return {a.value * b.value, a.value * b.partials + b.value * a.partials};
}

template <typename T, std::size_t N>
constexpr Dual<T, N> operator/(Dual<T, N> const& a, Dual<T, N> const& b) {
  return {a.value / b.value, (a.partials * b.value - a.value * b.partials) / (b.value * b.value)};
}

template <typename T, std::size_t N, ScalarOperand<T> S>
constexpr Dual<T, N> operator+(Dual<T, N> const& a, S const& c) {
  return {a.value + c, a.partials};
}

template <typename T, std::size_t N, ScalarOperand<T> S>
constexpr Dual<T, N> operator+(S const& c, Dual<T, N> const& a) {
  return {c + a.value, a.partials};
}

template <typename T, std::size_t N, ScalarOperand<T> S>
constexpr Dual<T, N> operator-(Dual<T, N> const& a, S const& c) {
  return {a.value - c, a.partials};
}

template <typename T, std::size_t N, ScalarOperand<T> S>
constexpr Dual<T, N> operator-(S const& c, Dual<T, N> const& a) {
  return {c - a.value, -a.partials};
}

template <typename T, std::size_t N, ScalarOperand<T> S>
constexpr Dual<T, N> operator*(Dual<T, N> const& a, S const& c) {
  return {a.value * c, a.partials * c};
}

template <typename T, std::size_t N, ScalarOperand<T> S>
constexpr Dual<T, N> operator*(S const& c, Dual<T, N> const& a) {
  return {c * a.value, c * a.partials};
}

template <typename T, std::size_t N, ScalarOperand<T> S>
constexpr Dual<T, N> operator/(Dual<T, N> const& a, S const& c) {
  return {a.value / c, a.partials / c};
}

template <typename T, std::size_t N, ScalarOperand<T> S>
constexpr Dual<T, N> operator/(S const& c, Dual<T, N> const& a) {
  return {c / a.value, -(c * a.partials) / (a.value * a.value)};
}

// ----------------------------------------------------------------------------
// Comparison: values only, partials are ignored.
// ----------------------------------------------------------------------------

template <typename T, std::size_t N>
constexpr bool operator==(Dual<T, N> const& a, Dual<T, N> const& b) {
  return a.value == b.value;
}

template <typename T, std::size_t N>
constexpr std::partial_ordering operator<=>(Dual<T, N> const& a, Dual<T, N> const& b) {
  return a.value <=> b.value;
}

template <typename T, std::size_t N, ScalarOperand<T> S>
constexpr bool operator==(Dual<T, N> const& a, S const& c) {
  return a.value == c;
}

template <typename T, std::size_t N, ScalarOperand<T> S>
constexpr std::partial_ordering operator<=>(Dual<T, N> const& a, S const& c) {
  return a.value <=> c;
}

// ----------------------------------------------------------------------------
// Elementary functions. Each returns {f(v), f'(v) * partials}.
// ----------------------------------------------------------------------------

namespace detail {

// Hides x from the optimizer so sin(x) and cos(x) stay separate libm calls.
// A fused sincos can differ from sin by an ulp, and the value channel of a
// dual must match the plain evaluation bit for bit.
template <typename T>
inline T unfused(T x) {
#if defined(__GNUC__)
  if constexpr (std::is_floating_point_v<T>) asm volatile("" : "+m"(x));
#endif
  return x;
}

}  // namespace detail

template <Arithmetic S>
constexpr S square(S x) {
  return x * x;
}

template <typename T, std::size_t N>
constexpr Dual<T, N> square(Dual<T, N> const& d) {
  return {square(d.value), (2 * d.value) * d.partials};
}

template <typename T, std::size_t N>
Dual<T, N> sin(Dual<T, N> const& d) {
  using std::cos;
  using std::sin;
  return {sin(d.value), cos(detail::unfused(d.value)) * d.partials};
}

template <typename T, std::size_t N>
Dual<T, N> cos(Dual<T, N> const& d) {
  using std::cos;
  using std::sin;
  return {cos(d.value), -sin(detail::unfused(d.value)) * d.partials};
}

template <typename T, std::size_t N>
Dual<T, N> tan(Dual<T, N> const& d) {
  using std::tan;
  T t = tan(d.value);
  return {t, (1 + t * t) * d.partials};
}

template <typename T, std::size_t N>
Dual<T, N> exp(Dual<T, N> const& d) {
  using std::exp;
  T e = exp(d.value);
  return {e, e * d.partials};
}

template <typename T, std::size_t N>
Dual<T, N> log(Dual<T, N> const& d) {
  using std::log;
  return {log(d.value), (1 / d.value) * d.partials};
}

template <typename T, std::size_t N>
Dual<T, N> sqrt(Dual<T, N> const& d) {
  using std::sqrt;
  T s = sqrt(d.value);
  return {s, (0.5 / s) * d.partials};
}

/// Derivative is sign(v), and exactly 0 at v == 0. NaN values propagate into
/// the partials.
template <typename T, std::size_t N>
Dual<T, N> abs(Dual<T, N> const& d) {
  using std::abs;
  if (d.value > 0) return d;
  if (d.value < 0) return -d;
  if (d.value == 0) return Dual<T, N>(abs(d.value));
  return {abs(d.value), d.partials * d.value};
}

/// x^p for a plain exponent. p == 0 yields zero partials everywhere.
template <typename T, std::size_t N, Arithmetic S>
Dual<T, N> pow(Dual<T, N> const& d, S p) {
  using std::pow;
  if (p == 0) return Dual<T, N>(pow(d.value, p));
  return {pow(d.value, p), (p * pow(d.value, p - 1)) * d.partials};
}

// ----------------------------------------------------------------------------
// Text rendering, ((1.0 + 1.0*ε[1,1]) + (1.0 + 0.0*ε[1,1])*ε[2,1]) style.
// ----------------------------------------------------------------------------

namespace detail {

inline std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace detail

template <Arithmetic S>
std::string to_string(S x) {
  return detail::format_number(static_cast<double>(x));
}

template <typename T, std::size_t N>
std::string to_string(Dual<T, N> const& d) {
  constexpr std::size_t depth = nesting_depth_v<Dual<T, N>>;
  std::string out = "(" + to_string(d.value);
  for (std::size_t k = 0; k < N; ++k) {
    auto const& p = d.partials[k];
    if constexpr (is_dual_v<T>) {
      out += " + " + to_string(p);
    } else {
      if (std::signbit(p) && !std::isnan(p)) {
        out += " - " + to_string(-p);
      } else {
        out += " + " + to_string(p);
      }
    }
    out += "*ε[" + std::to_string(depth) + "," + std::to_string(k + 1) + "]";
  }
  return out + ")";
}

template <typename T, std::size_t N>
std::ostream& operator<<(std::ostream& os, Dual<T, N> const& d) {
  return os << to_string(d);
}

}  // namespace fwdiff
