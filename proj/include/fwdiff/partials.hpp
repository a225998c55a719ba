#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace fwdiff {

/// Fixed-length vector of epsilon coefficients.
///
/// The storage is an inline std::array, so constructing, copying and
/// combining partials never touches the heap. The element type may itself be
/// a Dual, which is how nesting works.
template <typename T, std::size_t N>
class Partials {
  static_assert(N >= 1, "a Partials vector needs at least one lane");

 public:
  using value_type = T;
  static constexpr std::size_t size() noexcept { return N; }

  constexpr Partials() : lanes_{} {}

  /// Throws std::invalid_argument unless exactly N entries are given.
  constexpr Partials(std::initializer_list<T> entries) : Partials() {
    if (entries.size() != N) {
      throw std::invalid_argument("Partials: expected " + std::to_string(N) +
                                  " entries, got " + std::to_string(entries.size()));
    }
    std::size_t i = 0;
    for (auto const& e : entries) lanes_[i++] = e;
  }

  static constexpr Partials zero() { return Partials(); }

  static constexpr Partials unit(std::size_t lane) {
    if (lane >= N) {
      throw std::out_of_range("Partials::unit: lane " + std::to_string(lane) +
                              " out of range for N = " + std::to_string(N));
    }
    Partials p;
    p.lanes_[lane] = T(1);
    return p;
  }

  constexpr T& operator[](std::size_t i) noexcept { return lanes_[i]; }
  constexpr T const& operator[](std::size_t i) const noexcept { return lanes_[i]; }

  constexpr T const& at(std::size_t i) const {
    if (i >= N) {
      throw std::out_of_range("Partials::at: lane " + std::to_string(i) +
                              " out of range for N = " + std::to_string(N));
    }
    return lanes_[i];
  }

  constexpr auto begin() const noexcept { return lanes_.begin(); }
  constexpr auto end() const noexcept { return lanes_.end(); }
  constexpr auto begin() noexcept { return lanes_.begin(); }
  constexpr auto end() noexcept { return lanes_.end(); }

  constexpr std::array<T, N> const& lanes() const noexcept { return lanes_; }

  // Elementwise equality. Dual's own comparisons ignore partials, so this is
  // the way to ask whether two derivative vectors agree.
  constexpr bool identical(Partials const& o) const {
    for (std::size_t i = 0; i < N; ++i) {
      if constexpr (requires(T const& a) { a.identical(a); }) {
        if (!lanes_[i].identical(o.lanes_[i])) return false;
      } else {
        if (!(lanes_[i] == o.lanes_[i])) return false;
      }
    }
    return true;
  }

  constexpr Partials& operator+=(Partials const& o) {
    for (std::size_t i = 0; i < N; ++i) lanes_[i] += o.lanes_[i];
    return *this;
  }

  constexpr Partials& operator-=(Partials const& o) {
    for (std::size_t i = 0; i < N; ++i) lanes_[i] -= o.lanes_[i];
    return *this;
  }

  template <typename S>
  constexpr Partials& operator*=(S const& s) {
    for (auto& l : lanes_) l *= s;
    return *this;
  }

  template <typename S>
  constexpr Partials& operator/=(S const& s) {
    for (auto& l : lanes_) l /= s;
    return *this;
  }

  friend constexpr Partials operator+(Partials a, Partials const& b) { return a += b; }
  friend constexpr Partials operator-(Partials a, Partials const& b) { return a -= b; }

  friend constexpr Partials operator-(Partials a) {
    for (auto& l : a.lanes_) l = -l;
    return a;
  }

  // Scaling by an element-compatible scalar on either side. For nested duals S
  // is the inner Dual type.
  template <typename S>
    requires(!std::is_same_v<S, Partials>)
  friend constexpr Partials operator*(S const& s, Partials const& p) {
    Partials r;
    for (std::size_t i = 0; i < N; ++i) r.lanes_[i] = s * p.lanes_[i];
    return r;
  }

  template <typename S>
    requires(!std::is_same_v<S, Partials>)
  friend constexpr Partials operator*(Partials const& p, S const& s) {
    Partials r;
    for (std::size_t i = 0; i < N; ++i) r.lanes_[i] = p.lanes_[i] * s;
    return r;
  }

  template <typename S>
    requires(!std::is_same_v<S, Partials>)
  friend constexpr Partials operator/(Partials const& p, S const& s) {
    Partials r;
    for (std::size_t i = 0; i < N; ++i) r.lanes_[i] = p.lanes_[i] / s;
    return r;
  }

 private:
  std::array<T, N> lanes_;
};

}  // namespace fwdiff
