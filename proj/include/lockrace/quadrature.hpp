#pragma once

#include <functional>
#include <span>

namespace lockrace {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long panels = 0;
    bool converged = true;
};

// Adaptive Simpson with absolute tolerance and a hard panel budget.  On budget
// exhaustion the best estimate is returned with converged = false and the
// accumulated error estimate.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol = 1e-10, long max_panels = 1L << 20);

// Same, splitting the domain at the given sorted knots (integrand may jump there).
QuadratureResult integrate_adaptive_segmented(const std::function<double(double)>& f,
                                              std::span<const double> knots,
                                              double abs_tol = 1e-10, long max_panels = 1L << 20);

// Fixed-order Gauss-Legendre rule; essentially exact for smooth integrands over
// short intervals, with no adaptive noise floor.
double integrate_gauss(const std::function<double(double)>& f, double a, double b,
                       int order = 24);

}  // namespace lockrace
