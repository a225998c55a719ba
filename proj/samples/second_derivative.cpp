// Second derivative of sin at 1.0 with a dual nested inside a dual.

#include <iostream>

#include <fwdiff/fwdiff.hpp>

int main() {
  using fwdiff::Dual;
  using Inner = Dual<double, 1>;

  Dual<Inner, 1> const d{Inner(1.0, {1.0}), {Inner(1.0, {0.0})}};
  std::cout << "d  = " << d << "\n";

  auto const d2 = sin(d);
  std::cout << "d2 = " << d2 << "\n";
  std::cout << "partials(partials(d2, 0), 0) = "
            << fwdiff::to_string(fwdiff::partials(fwdiff::partials(d2, 0), 0)) << "\n";

  double const via_driver = fwdiff::second_derivative([](auto x) { return sin(x); }, 1.0);
  std::cout << "second_derivative(sin, 1.0) = " << fwdiff::to_string(via_driver) << "\n";
  return via_driver == -0.8414709848078965 ? 0 : 1;
}
