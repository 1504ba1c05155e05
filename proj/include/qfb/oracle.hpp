#pragma once
// Ground-truth estimation of P(Q_f > q): plain Monte Carlo, exponentially
// tilted importance sampling for deep tails, and closed-form special cases.
//
// Sampling is keyed by (seed, draw index) through a counter-based generator
// and reduced in fixed chunk order, so every estimate is bit-identical for a
// given (seed, n, method) regardless of the number of threads.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qfb/function_spec.hpp"
#include "qfb/spectrum.hpp"

namespace qfb {

enum class OracleMethod { mc, tilted, closed_form };

const char* to_string(OracleMethod m);

struct OracleEstimate {
    double p_hat = 0.0;
    double se = 0.0;
    double ci_lo = 0.0;  // 95% interval
    double ci_hi = 0.0;
    std::int64_t n_samples = 0;
    OracleMethod method = OracleMethod::mc;
    std::uint64_t seed = 0;
    double ess = 0.0;        // effective sample size (tilted only)
    bool low_quality = false;  // tilted with ess < 50
};

// n independent draws of Q_f. Parallel over draws; draw j depends only on
// (seed, j), so the output is independent of the thread count.
std::vector<double> sample_qf(const Spectrum& spec, const FunctionSpec& f,
                              std::uint64_t seed, std::int64_t n);
// Single-threaded reference (bit-identical to sample_qf).
std::vector<double> sample_qf_serial(const Spectrum& spec, const FunctionSpec& f,
                                     std::uint64_t seed, std::int64_t n);

// One pass over shared normal draws evaluating several f at once; column k
// holds the draws of Q_{fs[k]}. Used by validation suites that sweep f over
// one spectrum (the draws are correlated across columns, each column is a
// faithful Monte Carlo sample).
std::vector<std::vector<double>> sample_qf_multi(const Spectrum& spec,
                                                 const std::vector<FunctionSpec>& fs,
                                                 std::uint64_t seed, std::int64_t n);

// Plain Monte Carlo tail estimate with binomial standard error and a Wilson
// 95% interval (well-behaved at zero counts).
OracleEstimate mc_tail(const Spectrum& spec, const FunctionSpec& f, double q,
                       std::int64_t n, std::uint64_t seed);
// Same estimate computed from an existing sample.
OracleEstimate mc_tail_from_sample(const std::vector<double>& sample, double q,
                                   std::uint64_t seed);
// P(Q_f < q) from an existing sample (same interval machinery).
OracleEstimate mc_lower_tail_from_sample(const std::vector<double>& sample, double q,
                                         std::uint64_t seed);

// Exponentially tilted importance sampling: coordinates are drawn from the
// tilted Gaussian (variance 1/(1-2a_i), mean 2 a_i delta_i/(1-2a_i) with
// a_i = t f(eta_i)) and re-weighted by mgf(t) e^{-t Q}, an unbiased
// (not self-normalized) estimator. t_tilt must lie in [0, 1/(2d)); t = 0
// degenerates to plain Monte Carlo with unit weights. Pass a negative
// t_tilt to reuse the optimizing tilt of the upper tail bound at q.
OracleEstimate tilted_tail(const Spectrum& spec, const FunctionSpec& f, double q,
                           std::int64_t n, std::uint64_t seed, double t_tilt = -1.0);

// log E[e^{t Q_f}] via the product form: sum_i l1(t f(eta_i)) + delta_i^2 l2(t f(eta_i)).
double log_mgf(const Spectrum& spec, const FunctionSpec& f, double t);

// Survival function of sum_{i=1..n_terms} eta (Z_i + delta)^2 (equal
// eigenvalues): a scaled noncentral chi-square evaluated by the Poisson
// mixture series, truncated when the remaining mass is < 1e-15.
double exact_tail_equal_eigs(int n_terms, double eta, double delta, double q);

// Central/noncentral chi-square survival helpers (exposed for tests).
double chi_square_sf(double x, double dof);
double noncentral_chi_square_sf(double x, double dof, double lambda);

// One row of the modified Q-Q diagnostic: at level z the empirical
// (1 - 10^-z)-quantile q_hat of the oracle sample is looked up, the selected
// cdf upper bound U evaluated there, and omega = -log10(1 - U(q_hat))
// compared against z. gap = z - omega >= 0 (up to Monte Carlo noise) when
// the bound is valid. q_lo4/q_hi4 bracket the quantile at +/- 4 binomial
// standard errors of the order statistic, for noise estimation.
struct QqRow {
    double z = 0.0;
    double q_hat = 0.0;
    double omega = 0.0;
    double gap = 0.0;
    double q_lo4 = 0.0;
    double q_hi4 = 0.0;
    bool ok = false;  // false when z is beyond the sample's resolution
};

// tail_bound(q) must return the upper-tail bound value in (0, 1].
// Resolution rule: 10^-z >= 10/n (at least ~10 draws beyond the quantile).
std::vector<QqRow> qq_rows_from_sorted(const std::vector<double>& sorted_sample,
                                       const std::function<double(double)>& tail_bound,
                                       const std::vector<double>& z_grid);

// Convenience wrapper: sample, sort, evaluate.
std::vector<QqRow> qq_data(const Spectrum& spec, const FunctionSpec& f,
                           const std::function<double(double)>& tail_bound,
                           const std::vector<double>& z_grid, std::int64_t n,
                           std::uint64_t seed);

// Wilson 95% score interval for a binomial proportion.
void wilson_interval(double p_hat, std::int64_t n, double& lo, double& hi);

}  // namespace qfb
