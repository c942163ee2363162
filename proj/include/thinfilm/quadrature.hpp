#pragma once

// Adaptive Gauss-Kronrod (7,15) quadrature. Worst-first interval refinement
// until the summed error estimate meets max(abs_tol, rel_tol * |value|).

#include <functional>

#include "thinfilm/errors.hpp"

namespace thinfilm {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int cells = 0;
};

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-12, double abs_tol = 0.0,
                           int max_cells = 4000);

} // namespace thinfilm
