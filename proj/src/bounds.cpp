#include "qfb/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qfb/coeffs.hpp"
#include "qfb/optimize.hpp"

namespace qfb {

const char* to_string(Tail t) { return t == Tail::upper ? "upper" : "lower"; }

const char* to_string(BoundMethod m) {
    return m == BoundMethod::optimized ? "optimized" : "legacy";
}

const char* to_string(BoundRegime r) {
    switch (r) {
        case BoundRegime::optimized: return "optimized";
        case BoundRegime::trivial: return "trivial";
        case BoundRegime::gaussian: return "gaussian";
        case BoundRegime::exponential: return "exponential";
    }
    return "?";
}

double nu_f(const ScaleParams& sp, const FunctionSpec& f, double t) {
    const BoundCoefficients bc = coeffs_general(f, sp.L, t);
    return 2.0 * (bc.beta * sp.s2d + bc.alpha * sp.s2);
}

double nu_f(const Spectrum& spec, const FunctionSpec& f, double t) {
    return nu_f(scale_params(spec, f), f, t);
}

double tilt_objective(const ScaleParams& sp, const FunctionSpec& f, double gap, double t) {
    const BoundCoefficients bc = coeffs_general(f, sp.L, t);
    return bc.beta * sp.s2d + bc.alpha * sp.s2 - gap * t;
}

namespace {

// Shared engine for both tails: minimize nu_f(t)/2 - gap * t over the tilt
// interval (0, t_max), gap > 0.
TailBoundResult optimize_tail(const ScaleParams& sp, const FunctionSpec& f, double q,
                              double gap, Tail tail, double tol) {
    if (!(sp.d > 0.0)) {
        throw std::invalid_argument("tail bound: d = max |f(eta)| must be positive");
    }
    const double t_max = std::min(t_star(f, sp.L), 1.0 / (2.0 * sp.d));

    const auto objective = [&](double t) { return tilt_objective(sp, f, gap, t); };
    const ScalarMinResult min = minimize_scalar(objective, 0.0, t_max, tol);

    TailBoundResult res;
    res.q = q;
    res.tail = tail;
    res.method = BoundMethod::optimized;
    res.t_opt = min.t_opt;
    if (min.at_boundary) {
        // Objective increasing from t = 0+: the infimum is the trivial bound.
        res.log_bound = 0.0;
        res.bound = 1.0;
        res.regime = BoundRegime::trivial;
        return res;
    }
    res.log_bound = min.value;
    res.bound = std::min(1.0, std::exp(min.value));
    res.regime = BoundRegime::optimized;
    return res;
}

TailBoundResult trivial_result(double q, Tail tail, BoundMethod method) {
    TailBoundResult res;
    res.q = q;
    res.tail = tail;
    res.method = method;
    res.bound = 1.0;
    res.log_bound = 0.0;
    res.t_opt = 0.0;
    res.regime = BoundRegime::trivial;
    return res;
}

}  // namespace

TailBoundResult upper_tail_bound(const ScaleParams& sp, const FunctionSpec& f, double q,
                                 double tol) {
    if (!std::isfinite(q)) throw std::invalid_argument("upper_tail_bound: q must be finite");
    if (q <= sp.xi) return trivial_result(q, Tail::upper, BoundMethod::optimized);
    return optimize_tail(sp, f, q, q - sp.xi, Tail::upper, tol);
}

TailBoundResult upper_tail_bound(const Spectrum& spec, const FunctionSpec& f, double q,
                                 double tol) {
    return upper_tail_bound(scale_params(spec, f), f, q, tol);
}

TailBoundResult lower_tail_bound(const ScaleParams& sp, const FunctionSpec& f, double q,
                                 double tol) {
    if (!std::isfinite(q)) throw std::invalid_argument("lower_tail_bound: q must be finite");
    if (q >= sp.xi) return trivial_result(q, Tail::lower, BoundMethod::optimized);
    return optimize_tail(sp, f, q, sp.xi - q, Tail::lower, tol);
}

TailBoundResult lower_tail_bound(const Spectrum& spec, const FunctionSpec& f, double q,
                                 double tol) {
    return lower_tail_bound(scale_params(spec, f), f, q, tol);
}

LegacyParams legacy_params(const Spectrum& spec) {
    LegacyParams p;
    p.nu = 2.0 * (4.0 * spec.sum_eta_sq_delta_sq() + 2.0 * spec.sum_eta_sq());
    p.b = spec.max_abs_eta();
    p.mean = spec.sum_eta_delta_sq() + spec.sum_eta();
    return p;
}

TailBoundResult legacy_bound(const LegacyParams& params, double q, Tail tail) {
    if (!(params.nu > 0.0) || !(params.b > 0.0)) {
        throw std::invalid_argument("legacy_bound: nu and b must be positive");
    }
    if (!std::isfinite(q)) throw std::invalid_argument("legacy_bound: q must be finite");

    const double excess = tail == Tail::upper ? q - params.mean : params.mean - q;
    if (excess <= 0.0) return trivial_result(q, tail, BoundMethod::legacy);

    TailBoundResult res;
    res.q = q;
    res.tail = tail;
    res.method = BoundMethod::legacy;
    res.t_opt = 0.0;
    const double knee = params.nu / (4.0 * params.b);
    if (excess <= knee) {
        res.log_bound = -0.5 * excess * excess / params.nu;
        res.regime = BoundRegime::gaussian;
    } else {
        res.log_bound =
            0.5 * params.nu / (16.0 * params.b * params.b) - excess / (4.0 * params.b);
        res.regime = BoundRegime::exponential;
    }
    res.bound = std::min(1.0, std::exp(res.log_bound));
    return res;
}

std::vector<CompareRow> compare(const Spectrum& spec, const FunctionSpec& f,
                                const std::vector<double>& q_grid) {
    std::vector<CompareRow> rows(q_grid.size());
    const ScaleParams sp = scale_params(spec, f);
    const bool with_legacy = f.is_identity();
    const LegacyParams lp = with_legacy ? legacy_params(spec) : LegacyParams{};

    const auto n = static_cast<std::ptrdiff_t>(q_grid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double q = q_grid[static_cast<std::size_t>(i)];
        CompareRow row;
        row.q = q;
        const TailBoundResult nb = upper_tail_bound(sp, f, q);
        row.bound_new = nb.bound;
        row.log_bound_new = nb.log_bound;
        row.t_opt = nb.t_opt;
        if (with_legacy) {
            const TailBoundResult lb = legacy_bound(lp, q, Tail::upper);
            row.bound_legacy = lb.bound;
            row.log_bound_legacy = lb.log_bound;
            row.ratio = nb.bound / lb.bound;
            row.has_legacy = true;
        } else {
            row.bound_legacy = std::numeric_limits<double>::quiet_NaN();
            row.log_bound_legacy = std::numeric_limits<double>::quiet_NaN();
            row.ratio = std::numeric_limits<double>::quiet_NaN();
        }
        rows[static_cast<std::size_t>(i)] = row;
    }
    return rows;
}

}  // namespace qfb
