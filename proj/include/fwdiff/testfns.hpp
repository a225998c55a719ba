#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "dual.hpp"

namespace fwdiff {

struct AckleyParams {
  double a = 20.0;
  double b = 0.2;
  double c = 2.0 * std::numbers::pi;
};

/// sum_{i<k-1} 100 (x[i+1] - x[i]^2)^2 + (1 - x[i])^2, for plain or dual
/// elements. Requires k >= 2.
template <typename T>
T rosenbrock(std::span<const T> x) {
  if (x.size() < 2) throw std::invalid_argument("rosenbrock: need at least 2 inputs");
  T acc{};
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    acc += 100 * square(x[i + 1] - square(x[i])) + square(1 - x[i]);
  }
  return acc;
}

template <typename T>
T rosenbrock(std::vector<T> const& x) {
  return rosenbrock(std::span<const T>(x));
}

/// -a exp(-b sqrt(mean x^2)) - exp(mean cos(c x)) + a + e. Requires k >= 1.
template <typename T>
T ackley(std::span<const T> x, AckleyParams const& p = {}) {
  using std::cos;
  using std::exp;
  using std::sqrt;
  if (x.empty()) throw std::invalid_argument("ackley: empty input");
  T sum_sq{};
  T sum_cos{};
  for (auto const& xi : x) {
    sum_sq += square(xi);
    sum_cos += cos(p.c * xi);
  }
  double const k = static_cast<double>(x.size());
  return -p.a * exp(-p.b * sqrt(sum_sq / k)) - exp(sum_cos / k) + p.a + std::numbers::e;
}

template <typename T>
T ackley(std::vector<T> const& x, AckleyParams const& p = {}) {
  return ackley(std::span<const T>(x), p);
}

/// Closed-form Rosenbrock gradient.
inline std::vector<double> rosenbrock_grad_analytic(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("rosenbrock: need at least 2 inputs");
  std::size_t const k = x.size();
  std::vector<double> g(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    if (i + 1 < k) g[i] += -400.0 * x[i] * (x[i + 1] - x[i] * x[i]) - 2.0 * (1.0 - x[i]);
    if (i > 0) g[i] += 200.0 * (x[i] - x[i - 1] * x[i - 1]);
  }
  return g;
}

/// Closed-form Ackley gradient. Throws std::domain_error at x = 0, where the
/// sqrt term has a kink.
inline std::vector<double> ackley_grad_analytic(std::span<const double> x, AckleyParams const& p = {}) {
  if (x.empty()) throw std::invalid_argument("ackley: empty input");
  double const k = static_cast<double>(x.size());
  double sum_sq = 0.0;
  double sum_cos = 0.0;
  for (double xi : x) {
    sum_sq += xi * xi;
    sum_cos += std::cos(p.c * xi);
  }
  double const r = std::sqrt(sum_sq / k);
  if (r == 0.0) throw std::domain_error("ackley: non-differentiable point");

  double const radial = p.a * p.b * std::exp(-p.b * r) / (k * r);
  double const periodic = p.c * std::exp(sum_cos / k) / k;
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    g[i] = radial * x[i] + periodic * std::sin(p.c * x[i]);
  }
  return g;
}

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h. f takes
/// std::span<const double>.
template <typename F>
std::vector<double> fd_gradient(F&& f, std::span<const double> x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double const xi = xp[i];
    xp[i] = xi + step;
    double const fp = f(std::span<const double>(xp));
    xp[i] = xi - step;
    double const fm = f(std::span<const double>(xp));
    xp[i] = xi;
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

}  // namespace fwdiff
