#pragma once
// Derivative-free scalar minimization on an open interval (lo, hi).
//
// Golden-section with parabolic acceleration (Brent). The bracket is
// initialized strictly inside the interval because the bound objective
// diverges at the right endpoint; probes never touch lo or hi. Fully
// deterministic: no randomized probes, so identical inputs give identical
// outputs.

#include <cmath>
#include <stdexcept>
#include <utility>

namespace qfb {

struct ScalarMinResult {
    double t_opt = 0.0;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
    // Minimizer drifted to the left endpoint; the objective's infimum is
    // approached as t -> lo and the caller decides what that means.
    bool at_boundary = false;
};

namespace detail {
inline constexpr double kEdgeInset = 1e-9;      // probe inset from each endpoint
inline constexpr int kMaxEvaluations = 10000;
}  // namespace detail

template <class F>
ScalarMinResult minimize_scalar(F&& objective, double lo, double hi, double tol = 1e-10) {
    if (!(lo < hi)) throw std::invalid_argument("minimize_scalar: need lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("minimize_scalar: tol must be positive");

    const double width = hi - lo;
    double a = lo + detail::kEdgeInset * width;
    double b = hi - detail::kEdgeInset * width;

    int evals = 0;
    auto eval = [&](double t) {
        if (evals >= detail::kMaxEvaluations) {
            throw std::runtime_error("minimize_scalar: evaluation cap exceeded");
        }
        ++evals;
        const double v = objective(t);
        if (!std::isfinite(v)) {
            throw std::runtime_error("minimize_scalar: objective not finite in the interior");
        }
        return v;
    };

    constexpr double golden = 0.3819660112501051;  // 2 - phi
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = eval(x);
    double fw = fx, fv = fx;
    double delta = 0.0, delta_prev = 0.0;

    while (true) {
        const double mid = 0.5 * (a + b);
        const double step_floor = tol * (hi - lo) + 1e-15 * std::abs(x);
        if (std::abs(x - mid) + 0.5 * (b - a) <= 2.0 * step_floor) break;
        if (evals >= detail::kMaxEvaluations) {
            throw std::runtime_error("minimize_scalar: evaluation cap exceeded");
        }

        bool parabolic_ok = false;
        if (std::abs(delta_prev) > step_floor) {
            // Parabola through (x, fx), (w, fw), (v, fv).
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double delta_old = delta_prev;
            delta_prev = delta;
            if (q != 0.0 && std::abs(p) < std::abs(0.5 * q * delta_old) && p > q * (a - x) &&
                p < q * (b - x)) {
                delta = p / q;
                const double u = x + delta;
                if (u - a < 2.0 * step_floor || b - u < 2.0 * step_floor) {
                    delta = (mid - x) >= 0.0 ? step_floor : -step_floor;
                }
                parabolic_ok = true;
            }
        }
        if (!parabolic_ok) {
            delta_prev = (x >= mid) ? a - x : b - x;
            delta = golden * delta_prev;
        }

        const double u =
            (std::abs(delta) >= step_floor) ? x + delta : x + (delta >= 0.0 ? step_floor : -step_floor);
        const double fu = eval(u);
        if (fu <= fx) {
            if (u >= x) a = x; else b = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }

    ScalarMinResult res;
    res.t_opt = x;
    res.value = fx;
    res.evaluations = evals;
    res.converged = true;
    res.at_boundary = (x <= lo + 10.0 * detail::kEdgeInset * width);
    return res;
}

}  // namespace qfb
