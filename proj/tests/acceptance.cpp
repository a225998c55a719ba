// Acceptance suite: one PASS / FAIL / SKIP line per criterion, nonzero exit if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <catch_amalgamated.hpp>

#include <fwdiff/bench.hpp>
#include <fwdiff/fwdiff.hpp>

#include "test_util.hpp"

namespace {

namespace bench = fwdiff::bench;
using bench::TargetFunction;
using fwdiff_test::rel_err;
using fwdiff_test::same_bits;
using fwdiff_test::ulp_distance;

enum class Outcome { pass, fail, skip };

struct Verdict {
  Outcome outcome;
  std::string detail;
};

Verdict pass(std::string d) { return {Outcome::pass, std::move(d)}; }
Verdict fail(std::string d) { return {Outcome::fail, std::move(d)}; }
Verdict check(bool ok, std::string d) { return {ok ? Outcome::pass : Outcome::fail, std::move(d)}; }

std::string num(double v) { return fwdiff::to_string(v); }

auto const rosen = [](auto x) { return fwdiff::rosenbrock(x); };
auto const ackley = [](auto x) { return fwdiff::ackley(x); };

Verdict nested_exactness() {
  double const got = fwdiff::second_derivative([](auto x) { return sin(x); }, 1.0);
  auto const ulps = ulp_distance(got, -0.8414709848078965);
  return check(ulps <= 2, "second_derivative(sin, 1.0) = " + num(got) + ", " +
                              std::to_string(ulps) + " ulps from -0.8414709848078965");
}

Verdict pass_accounting() {
  fwdiff::CountingFunction counted(rosen);
  fwdiff::gradient(counted, std::vector<double>{0.1, 0.2, 0.3, 0.4}, {.chunk_size = 2});
  if (counted.count() != 2) return fail("k=4 N=2 took " + std::to_string(counted.count()) + " evaluations");

  std::size_t cases = 0;
  for (std::size_t k = 1; k <= 20; ++k) {
    auto const x = bench::random_input(TargetFunction::ackley, k);
    for (std::size_t n = 1; n <= k + 2; ++n) {
      fwdiff::CountingFunction c(ackley);
      fwdiff::gradient(c, x, {.chunk_size = n});
      std::size_t const want = (k + n - 1) / n;
      if (c.count() != want) {
        return fail("k=" + std::to_string(k) + " N=" + std::to_string(n) + ": " +
                    std::to_string(c.count()) + " evaluations, expected " + std::to_string(want));
      }
      ++cases;
    }
  }
  return pass("k=4 N=2 -> 2 evaluations; " + std::to_string(cases) + " (k, N) pairs with k <= 20 match ceil(k/N)");
}

Verdict chunk_invariance() {
  std::size_t compared = 0;
  for (auto fn : {TargetFunction::rosenbrock, TargetFunction::ackley}) {
    bench::Target const target{fn};
    for (std::size_t k : {2u, 5u, 16u, 100u}) {
      auto const x = bench::random_input(fn, k);
      auto const ref = fwdiff::gradient(target, x, {.chunk_size = 1});
      for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{3}, std::size_t{4}, std::size_t{8}, k}) {
        auto const g = fwdiff::gradient(target, x, {.chunk_size = n});
        for (std::size_t i = 0; i < k; ++i) {
          if (!same_bits(g.values[i], ref.values[i])) {
            return fail(std::string(bench::function_name(fn)) + " k=" + std::to_string(k) +
                        " N=" + std::to_string(n) + " lane " + std::to_string(i) + " differs");
          }
          ++compared;
        }
      }
    }
  }
  return pass(std::to_string(compared) + " gradient entries bitwise identical across chunk sizes");
}

Verdict oracle_agreement() {
  double worst_an = 0.0;
  double worst_fd = 0.0;
  double worst_an_fd = 0.0;
  for (auto fn : {TargetFunction::rosenbrock, TargetFunction::ackley}) {
    bench::Target const target{fn};
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      auto const x = bench::random_input(fn, 100, seed);
      auto const ad = fwdiff::gradient(target, x, {.chunk_size = 10}).values;
      auto const an = bench::analytic_gradient(fn, x);
      auto const fd = fwdiff::fd_gradient([&](std::span<const double> v) { return target(v); }, x, 1e-6);
      for (std::size_t i = 0; i < x.size(); ++i) {
        worst_an = std::max(worst_an, rel_err(ad[i], an[i]));
        worst_fd = std::max(worst_fd, rel_err(ad[i], fd[i]));
        worst_an_fd = std::max(worst_an_fd, rel_err(an[i], fd[i]));
      }
    }
  }
  bool const ok = worst_an <= 1e-10 && worst_fd <= 1e-5 && worst_an_fd <= 1e-5;
  return check(ok, "max rel err AD/analytic " + num(worst_an) + " (<= 1e-10), AD/FD " +
                       num(worst_fd) + ", analytic/FD " + num(worst_an_fd) + " (<= 1e-5)");
}

Verdict hessian_correctness() {
  auto const h = fwdiff::hessian(rosen, std::vector<double>{1.0, 1.0}, 2, 2);
  double const want[2][2] = {{802.0, -400.0}, {-400.0, 200.0}};
  double worst = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      worst = std::max(worst, std::abs(h.at(i, j) - want[i][j]) / std::abs(want[i][j]));
    }
  }
  if (worst > 1e-9) return fail("Rosenbrock Hessian at (1,1) off by " + num(worst));

  double worst_sym = 0.0;
  fwdiff_test::Rng rng(77);
  for (std::size_t trial = 0; trial < 40; ++trial) {
    std::size_t const k = 2 + rng.index(9);
    auto const fn = trial % 2 == 0 ? TargetFunction::rosenbrock : TargetFunction::ackley;
    auto const x = bench::random_input(fn, k, 1000 + trial);
    auto const hr = fwdiff::hessian(bench::Target{fn}, x, 3, 2);
    double asym = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double ra = 0.0;
      double rn = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        ra += std::abs(hr.at(i, j) - hr.at(j, i));
        rn += std::abs(hr.at(i, j));
      }
      asym = std::max(asym, ra);
      norm = std::max(norm, rn);
    }
    worst_sym = std::max(worst_sym, asym / norm);
  }
  return check(worst_sym <= 1e-8, "H(1,1) rel err " + num(worst) + " (<= 1e-9); max asymmetry " +
                                      num(worst_sym) + " (<= 1e-8)");
}

Verdict chunk_trend() {
  std::vector<std::size_t> const chunks{1, 4};
  auto const a = bench::run_chunk_sweep(TargetFunction::ackley, 12000, chunks, 3);
  auto const r = bench::run_chunk_sweep(TargetFunction::rosenbrock, 12000, chunks, 3);
  double const ra = a[1].min_seconds / a[0].min_seconds;
  double const rr = r[1].min_seconds / r[0].min_seconds;
  return check(ra <= 0.6 && rr <= 0.9,
               "k=12000 min-time ratio N=4/N=1: ackley " + num(ra) + " (<= 0.6, " +
                   num(a[0].min_seconds) + "s -> " + num(a[1].min_seconds) + "s), rosenbrock " +
                   num(rr) + " (<= 0.9, " + num(r[0].min_seconds) + "s -> " +
                   num(r[1].min_seconds) + "s)");
}

Verdict threading_trend() {
  auto const x = bench::random_input(TargetFunction::ackley, 10000);
  bench::Target const target{TargetFunction::ackley};
  auto const serial = fwdiff::gradient(target, x, {.chunk_size = 10, .threads = 1});
  auto const threaded = fwdiff::gradient_threaded(target, x, {.chunk_size = 10, .threads = 4});
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!same_bits(serial.values[i], threaded.values[i])) {
      return fail("threaded lane " + std::to_string(i) + " differs from serial");
    }
  }

  unsigned const hw = std::thread::hardware_concurrency();
  if (hw < 4) {
    return {Outcome::skip, "timing skipped: " + std::to_string(hw) +
                               " hardware thread(s) < 4; threaded result bitwise equal to serial"};
  }
  auto const s = bench::time_gradient(TargetFunction::ackley, x, 10, 1, 3);
  auto const t = bench::time_gradient(TargetFunction::ackley, x, 10, 4, 3);
  double const ratio = t.min_seconds / s.min_seconds;
  return check(ratio <= 0.75, "4-thread/serial min-time ratio " + num(ratio) +
                                  " (<= 0.75); results bitwise equal");
}

Verdict property_suite() {
  Catch::Session session;
  char const* argv[] = {"acceptance", "[property]", "--reporter", "compact"};
  if (session.applyCommandLine(4, argv) != 0) return fail("could not configure Catch2");
  int const failed = session.run();
  return check(failed == 0, failed == 0 ? "all [property] cases passed"
                                        : std::to_string(failed) + " [property] assertion(s) failed");
}

}  // namespace

int main() {
  struct Criterion {
    char const* name;
    std::function<Verdict()> run;
  };
  std::vector<Criterion> const criteria{
      {"AC1 nested-dual exactness", nested_exactness},
      {"AC2 chunk-pass accounting", pass_accounting},
      {"AC3 chunk-size invariance", chunk_invariance},
      {"AC4 oracle agreement", oracle_agreement},
      {"AC5 hessian correctness", hessian_correctness},
      {"AC6 chunk-size timing trend", chunk_trend},
      {"AC7 threading trend", threading_trend},
      {"AC8 property suite", property_suite},
  };

  int failures = 0;
  for (auto const& c : criteria) {
    auto const t0 = std::chrono::steady_clock::now();
    Verdict v = [&] {
      try {
        return c.run();
      } catch (std::exception const& e) {
        return fail(std::string("exception: ") + e.what());
      }
    }();
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char const* tag = v.outcome == Outcome::pass ? "PASS" : v.outcome == Outcome::skip ? "SKIP" : "FAIL";
    if (v.outcome == Outcome::fail) ++failures;
    std::printf("[%s] %s: %s (%.2fs)\n", tag, c.name, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
