#include "qfb/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qfb {

double l1(double x) {
    if (x >= 0.5) {
        throw std::domain_error("l1: argument must be < 1/2");
    }
    // log1p keeps l1 accurate near 0, where l1(x) ~ x.
    return -0.5 * std::log1p(-2.0 * x);
}

double l2(double x) {
    if (x >= 0.5) {
        throw std::domain_error("l2: argument must be < 1/2");
    }
    return x / (1.0 - 2.0 * x);
}

double t_star(const FunctionSpec& f, double L) {
    if (!(L > 0.0)) {
        throw std::invalid_argument("t_star: L must be positive");
    }
    const double hi = std::max(std::abs(f(L)), std::abs(f(-L)));
    if (hi == 0.0) {
        throw std::invalid_argument("t_star: f vanishes at both endpoints of [-L, L]");
    }
    return 1.0 / (2.0 * hi);
}

namespace {

void check_t_range(double t, double ts, const char* who) {
    if (!(t >= 0.0) || t >= ts) {
        std::ostringstream os;
        os << who << ": t = " << t << " outside [0, t_star = " << ts << ")";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

BoundCoefficients coeffs_identity(double L, double t) {
    if (!(L > 0.0)) throw std::invalid_argument("coeffs_identity: L must be positive");
    const double ts = 1.0 / (2.0 * L);
    check_t_range(t, ts, "coeffs_identity");
    BoundCoefficients bc;
    bc.L = L;
    bc.t = t;
    bc.t_star = ts;
    bc.alpha = l1(t * L) / (L * L) - t / L;
    bc.beta = l2(t * L) / (L * L) - t / L;
    bc.gamma = t;
    return bc;
}

BoundCoefficients coeffs_power(double L, double t, int p) {
    if (p < 2) throw std::invalid_argument("coeffs_power: p must be >= 2");
    if (!(L > 0.0)) throw std::invalid_argument("coeffs_power: L must be positive");
    const double Lp = std::pow(L, p);
    const double ts = 1.0 / (2.0 * Lp);
    check_t_range(t, ts, "coeffs_power");
    BoundCoefficients bc;
    bc.L = L;
    bc.t = t;
    bc.t_star = ts;
    bc.alpha = l1(t * Lp) / (L * L);
    bc.beta = l2(t * Lp) / (L * L);
    bc.gamma = 0.0;
    return bc;
}

BoundCoefficients coeffs_general(const FunctionSpec& f, double L, double t) {
    switch (f.kind()) {
        case FunctionKind::identity:
            return coeffs_identity(L, t);
        case FunctionKind::power:
            return coeffs_power(L, t, f.power_exponent());
        case FunctionKind::tabulated:
            break;
    }
    const double ts = t_star(f, L);
    check_t_range(t, ts, "coeffs_general");
    const double c = f.deriv0();
    const double fL = f(L);
    BoundCoefficients bc;
    bc.L = L;
    bc.t = t;
    bc.t_star = ts;
    bc.alpha = l1(t * fL) / (L * L) - t * c / L;
    bc.beta = l2(t * fL) / (L * L) - t * c / L;
    bc.gamma = t * c;
    return bc;
}

ConditionReport verify_majorant_conditions(const FunctionSpec& f, double L, int grid_size,
                                        double tol) {
    if (!(L > 0.0)) throw std::invalid_argument("verify_majorant_conditions: L must be positive");
    if (grid_size < 2) throw std::invalid_argument("verify_majorant_conditions: grid_size must be >= 2");
    if (!f.covers(-L, L)) {
        throw std::domain_error("verify_majorant_conditions: f is not defined on [-L, L]");
    }
    // Monotonicity precondition; even powers go through the closed-form power path.
    if (f.kind() == FunctionKind::tabulated) {
        const double step = 2.0 * L / grid_size;
        double prev = f(-L);
        for (int i = 1; i <= grid_size; ++i) {
            const double cur = f(-L + i * step);
            if (cur < prev - 1e-12 * std::max(1.0, std::abs(prev))) {
                throw std::invalid_argument(
                    "verify_majorant_conditions: f must be monotone increasing");
            }
            prev = cur;
        }
    }

    const double ts = t_star(f, L);
    const double c = f.deriv0();
    ConditionReport rep;

    auto record = [&](double margin, double x, double t, int cond, int which) {
        if (margin < rep.worst_margin) rep.worst_margin = margin;
        if (margin < -tol && rep.pass) {
            rep.pass = false;
            rep.x = x;
            rep.t = t;
            rep.condition = cond;
            rep.which_l = which;
            std::ostringstream os;
            os << "condition (" << cond << ") for l" << which << " violated at x = " << x
               << ", t = " << t << " (margin " << margin << ")";
            rep.detail = os.str();
        }
    };

    for (int j = 0; j < grid_size; ++j) {
        const double t = ts * j / grid_size;  // [0, t_star)
        for (int k = 1; k <= grid_size; ++k) {
            const double x = L * k / grid_size;  // (0, L]
            double fx, fmx, dfx;
            try {
                fx = f(x);
                fmx = f(-x);
                if (f.kind() == FunctionKind::tabulated) {
                    // Central finite difference, shrunk to stay on the grid.
                    const double h =
                        std::min(1e-6 * L, std::min(f.domain_max() - x, x - f.domain_min()));
                    dfx = h > 0.0 ? (f(x + h) - f(x - h)) / (2.0 * h) : f.deriv(x);
                } else {
                    dfx = f.deriv(x);
                }
            } catch (const std::exception&) {
                record(-1.0, x, t, 0, 0);
                continue;
            }
            const double ax = t * fx;
            const double amx = t * fmx;
            if (ax >= 0.5 || amx >= 0.5) {
                // Outside the cgf domain: admissibility fails here by definition.
                record(-1.0, x, t, 0, 0);
                continue;
            }
            // d/dx l(t f(x)) = l'(t f(x)) * t * f'(x)
            const double one_m = 1.0 - 2.0 * ax;
            const double dl1 = t * dfx / one_m;                  // l1'(u) = 1/(1-2u)
            const double dl2 = t * dfx / (one_m * one_m);        // l2'(u) = 1/(1-2u)^2
            const double l1x = l1(ax), l1mx = l1(amx);
            const double l2x = l2(ax), l2mx = l2(amx);

            record(x * (0.5 * dl1 + t * c) - l1x, x, t, 1, 1);
            record(x * (0.5 * dl2 + t * c) - l2x, x, t, 1, 2);
            record((l1x - l1mx) / (2.0 * x) - t * c, x, t, 2, 1);
            record((l2x - l2mx) / (2.0 * x) - t * c, x, t, 2, 2);
        }
    }
    return rep;
}

}  // namespace qfb
