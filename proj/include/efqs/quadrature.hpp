#pragma once

#include <vector>

namespace efqs {

/// n equally spaced points from a to b inclusive (n >= 2), or {a} for n == 1.
std::vector<double> linspace(double a, double b, int n);

/// Composite trapezoid weights for n points of spacing h.
std::vector<double> trapezoid_weights(int n, double h);

} // namespace efqs
