// Hessian of the Rosenbrock function at its minimum.

#include <iostream>
#include <vector>

#include <fwdiff/fwdiff.hpp>

int main() {
  std::vector<double> const x{1.0, 1.0};
  auto const h = fwdiff::hessian([](auto v) { return fwdiff::rosenbrock(v); }, x, 1, 2);

  for (std::size_t i = 0; i < h.dim; ++i) {
    for (std::size_t j = 0; j < h.dim; ++j) std::cout << fwdiff::to_string(h.at(i, j)) << " ";
    std::cout << "\n";
  }
  std::cout << "passes: " << h.passes << "\n";
  return h.at(0, 0) == 802.0 && h.at(0, 1) == -400.0 && h.at(1, 1) == 200.0 ? 0 : 1;
}
