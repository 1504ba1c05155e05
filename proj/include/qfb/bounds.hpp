#pragma once
// Tail bounds for Q_f: the optimized quadratic-majorant Chernoff bound
// (both tails) and the legacy piecewise sub-gamma baseline, plus a
// side-by-side comparison table.
//
// All bound values are computed in log space; exp is taken only at the API
// surface so values down to ~1e-300 stay representable.

#include <vector>

#include "qfb/function_spec.hpp"
#include "qfb/spectrum.hpp"

namespace qfb {

enum class Tail { upper, lower };

enum class BoundMethod {
    optimized,  // tilt-optimized quadratic-majorant Chernoff bound
    legacy,     // piecewise gaussian/exponential sub-gamma bound
};

enum class BoundRegime {
    optimized,    // interior minimizer found
    trivial,      // query on the wrong side of xi / mean, bound is 1
    gaussian,     // legacy bound, quadratic piece
    exponential,  // legacy bound, linear piece
};

const char* to_string(Tail t);
const char* to_string(BoundMethod m);
const char* to_string(BoundRegime r);

struct TailBoundResult {
    double q = 0.0;
    double bound = 1.0;      // min(1, exp(log_bound))
    double t_opt = 0.0;      // optimizing tilt; 0 when not applicable
    double log_bound = 0.0;  // natural log, un-clamped
    Tail tail = Tail::upper;
    BoundMethod method = BoundMethod::optimized;
    BoundRegime regime = BoundRegime::trivial;
};

// Variance proxy nu_f(t) = 2 (beta(L,t) sum eta^2 delta^2 + alpha(L,t) sum eta^2).
double nu_f(const ScaleParams& sp, const FunctionSpec& f, double t);
double nu_f(const Spectrum& spec, const FunctionSpec& f, double t);

// Log objective nu_f(t)/2 - gap * t minimized over the tilt; exposed so
// tests can probe convexity around the returned t_opt.
double tilt_objective(const ScaleParams& sp, const FunctionSpec& f, double gap, double t);

// P(Q_f > q) bound; trivial (= 1) for q <= xi.
TailBoundResult upper_tail_bound(const ScaleParams& sp, const FunctionSpec& f, double q,
                                 double tol = 1e-10);
TailBoundResult upper_tail_bound(const Spectrum& spec, const FunctionSpec& f, double q,
                                 double tol = 1e-10);
// P(Q_f < q) bound; trivial (= 1) for q >= xi.
TailBoundResult lower_tail_bound(const ScaleParams& sp, const FunctionSpec& f, double q,
                                 double tol = 1e-10);
TailBoundResult lower_tail_bound(const Spectrum& spec, const FunctionSpec& f, double q,
                                 double tol = 1e-10);

// Inputs of the legacy sub-gamma bound (identity f only):
//   nu = 2 (4 sum eta^2 delta^2 + 2 sum eta^2), b = max |eta|, mean = E[Q].
struct LegacyParams {
    double nu = 0.0;
    double b = 0.0;
    double mean = 0.0;
};

LegacyParams legacy_params(const Spectrum& spec);

// Piecewise evaluation: gaussian piece up to mean +/- nu/(4b), exponential
// beyond; the boundary point uses the gaussian piece (both agree there up to
// the usual continuity slack).
TailBoundResult legacy_bound(const LegacyParams& params, double q, Tail tail);

struct CompareRow {
    double q = 0.0;
    double bound_new = 1.0;
    double log_bound_new = 0.0;
    double t_opt = 0.0;
    // Legacy columns are populated for identity f only (NaN otherwise).
    double bound_legacy = 0.0;
    double log_bound_legacy = 0.0;
    double ratio = 0.0;  // bound_new / bound_legacy
    bool has_legacy = false;
};

// Upper-tail comparison over a q grid. Rows are evaluated independently
// (in parallel) and assembled in input order.
std::vector<CompareRow> compare(const Spectrum& spec, const FunctionSpec& f,
                                const std::vector<double>& q_grid);

}  // namespace qfb
