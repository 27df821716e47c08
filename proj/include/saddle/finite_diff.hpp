#pragma once

#include "saddle/types.hpp"

#include <functional>

namespace saddle {

// Central-difference gradient of a scalar function, one coordinate at a
// time: (f(x + h e_i) - f(x - h e_i)) / (2h).
Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-5);

// Relative discrepancy ||a - b|| / max(1, ||a||, ||b||).
double rel_err(const Vec& a, const Vec& b);

}  // namespace saddle
