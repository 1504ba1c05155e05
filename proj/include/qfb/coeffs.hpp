#pragma once
// Cumulant-generating-function terms and the optimal quadratic-majorant
// coefficients.
//
// The cgf of Q_f splits into two scalar terms,
//   l1(x) = -log(1 - 2x)/2   (log-determinant part)
//   l2(x) = x / (1 - 2x)     (noncentrality part)
// each finite for x < 1/2. On [-L, L] both of l1(t f(x)) and l2(t f(x))
// are dominated by parabolas a x^2 + g x through the origin; the smallest
// admissible leading coefficients are
//   alpha(L, t) = l1(t f(L)) / L^2 - t c / L
//   beta(L, t)  = l2(t f(L)) / L^2 - t c / L
//   gamma(t)    = t c,   c = f'(0),
// valid for t in [0, t_star), t_star = 1 / (2 max(|f(L)|, |f(-L)|)).

#include <string>

#include "qfb/function_spec.hpp"

namespace qfb {

// -log(1 - 2x)/2 for x < 1/2.
double l1(double x);
// x/(1 - 2x) for x < 1/2.
double l2(double x);

// Supremum of admissible tilt parameters for the majorant on [-L, L].
double t_star(const FunctionSpec& f, double L);

struct BoundCoefficients {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double t_star = 0.0;
    double L = 0.0;
    double t = 0.0;
};

// f(x) = x; requires 0 <= t < 1/(2L).
BoundCoefficients coeffs_identity(double L, double t);
// f(x) = x^p, p >= 2; requires 0 <= t < 1/(2L^p).
BoundCoefficients coeffs_power(double L, double t, int p);
// Any admissible f; dispatches to the closed forms for identity/power.
BoundCoefficients coeffs_general(const FunctionSpec& f, double L, double t);

// Grid check of the two majorant admissibility conditions, for both l1 and
// l2, over x in (0, L] and t in [0, t_star):
//   (1)  x (d/dx l(t f(x)) / 2 + t c) >= l(t f(x))
//   (2)  (l(t f(x)) - l(t f(-x))) / (2x) >= t c
// A heuristic admissibility check on a finite grid, not a proof.
struct ConditionReport {
    bool pass = true;
    double worst_margin = 0.0;  // most negative slack seen (0 if none)
    double x = 0.0;             // first violating grid point
    double t = 0.0;
    int condition = 0;     // 1 or 2
    int which_l = 0;       // 1 for l1, 2 for l2
    std::string detail;    // human-readable failure description
};

ConditionReport verify_majorant_conditions(const FunctionSpec& f, double L, int grid_size,
                                        double tol = 1e-9);

}  // namespace qfb
