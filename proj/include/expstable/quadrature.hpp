#pragma once

#include <functional>

#include "expstable/measure.hpp"

namespace expstable {

// Recursive adaptive Simpson with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& g, double a, double b,
                        double abs_tol, int max_depth = 48);

// Integral of f(x) e^{-x} dx over the support of f, split at breakpoints.
// Unbounded-right supports are extended in blocks until the tail stops
// contributing; unbounded-left supports are extended likewise but throw
// NonIntegrableError when the block contributions fail to decay.
double integrate_exp_weighted(const TestFunction& f, double abs_tol = 1e-10);

}  // namespace expstable
