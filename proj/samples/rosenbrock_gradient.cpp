// Gradient of the Rosenbrock function in chunks, with pass counting.

#include <cmath>
#include <iostream>
#include <vector>

#include <fwdiff/fwdiff.hpp>

int main() {
  std::vector<double> const x{-1.2, 1.0, 0.5, -0.3};
  fwdiff::CountingFunction f([](auto v) { return fwdiff::rosenbrock(v); });

  auto const g = fwdiff::gradient(f, x, {.chunk_size = 2});
  std::cout << "f(x) = " << fwdiff::to_string(g.f_value) << "\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::cout << "df/dx" << i << " = " << fwdiff::to_string(g.values[i]) << "\n";
  }
  std::cout << "evaluations: " << f.count() << " (chunk " << g.chunk << ")\n";

  auto const analytic = fwdiff::rosenbrock_grad_analytic(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::abs(analytic[i] - g.values[i]) > 1e-10 * std::max(1.0, std::abs(analytic[i]))) return 1;
  }
  return f.count() == 2 ? 0 : 1;
}
