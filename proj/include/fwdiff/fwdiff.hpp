#pragma once

// Forward-mode automatic differentiation with multidimensional dual numbers.
//
//   #include <fwdiff/fwdiff.hpp>
//
//   auto f = [](auto x) { return fwdiff::rosenbrock(x); };
//   std::vector<double> x{-1.2, 1.0};
//   auto g = fwdiff::gradient(f, x, {.chunk_size = 2});  // g.values ~ {-215.6, -88.0}

#include "partials.hpp"
#include "dual.hpp"
#include "drivers.hpp"
#include "testfns.hpp"
