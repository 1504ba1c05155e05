#include "qfb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qfb/bounds.hpp"
#include "qfb/coeffs.hpp"
#include "qfb/rng.hpp"
#include "qfb/summation.hpp"

namespace qfb {

const char* to_string(OracleMethod m) {
    switch (m) {
        case OracleMethod::mc: return "mc";
        case OracleMethod::tilted: return "tilted";
        case OracleMethod::closed_form: return "closed_form";
    }
    return "?";
}

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr std::int64_t kChunk = 8192;  // fixed reduction granularity

// Draw j of Q_f; depends only on (seed, j).
double draw_qf(const std::vector<double>& fe, const std::vector<double>& deltas,
               std::uint64_t seed, std::int64_t j) {
    const std::size_t n = fe.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; i += 2) {
        double z0, z1;
        normal_pair(seed, RngDomain::qf_draws, static_cast<std::uint64_t>(j),
                    static_cast<std::uint32_t>(i / 2), z0, z1);
        const double u0 = z0 + deltas[i];
        acc += fe[i] * (u0 * u0);
        if (i + 1 < n) {
            const double u1 = z1 + deltas[i + 1];
            acc += fe[i + 1] * (u1 * u1);
        }
    }
    return acc;
}

std::vector<double> eval_f_on_etas(const Spectrum& spec, const FunctionSpec& f) {
    std::vector<double> fe(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) fe[i] = f(spec.etas()[i]);
    return fe;
}

void check_n(std::int64_t n, std::int64_t min_n, const char* who) {
    if (n < min_n) {
        throw std::invalid_argument(std::string(who) + ": need at least " +
                                    std::to_string(min_n) + " samples");
    }
}

}  // namespace

std::vector<double> sample_qf(const Spectrum& spec, const FunctionSpec& f,
                              std::uint64_t seed, std::int64_t n) {
    check_n(n, 1, "sample_qf");
    const std::vector<double> fe = eval_f_on_etas(spec, f);
    std::vector<double> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < n; ++j) {
        out[static_cast<std::size_t>(j)] = draw_qf(fe, spec.deltas(), seed, j);
    }
    return out;
}

std::vector<double> sample_qf_serial(const Spectrum& spec, const FunctionSpec& f,
                                     std::uint64_t seed, std::int64_t n) {
    check_n(n, 1, "sample_qf");
    const std::vector<double> fe = eval_f_on_etas(spec, f);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) {
        out[static_cast<std::size_t>(j)] = draw_qf(fe, spec.deltas(), seed, j);
    }
    return out;
}

std::vector<std::vector<double>> sample_qf_multi(const Spectrum& spec,
                                                 const std::vector<FunctionSpec>& fs,
                                                 std::uint64_t seed, std::int64_t n) {
    check_n(n, 1, "sample_qf_multi");
    const std::size_t nf = fs.size();
    const std::size_t dim = spec.size();
    std::vector<std::vector<double>> fe(nf);
    for (std::size_t k = 0; k < nf; ++k) fe[k] = eval_f_on_etas(spec, fs[k]);
    std::vector<std::vector<double>> out(nf, std::vector<double>(static_cast<std::size_t>(n)));

#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < n; ++j) {
        double ysq[2];
        std::vector<double> acc(nf, 0.0);
        for (std::size_t i = 0; i < dim; i += 2) {
            double z0, z1;
            normal_pair(seed, RngDomain::qf_draws, static_cast<std::uint64_t>(j),
                        static_cast<std::uint32_t>(i / 2), z0, z1);
            const double u0 = z0 + spec.deltas()[i];
            ysq[0] = u0 * u0;
            const bool pair = i + 1 < dim;
            if (pair) {
                const double u1 = z1 + spec.deltas()[i + 1];
                ysq[1] = u1 * u1;
            }
            // Accumulate in the same association as draw_qf so each column
            // is bit-identical to the single-f sampler.
            for (std::size_t k = 0; k < nf; ++k) {
                acc[k] += fe[k][i] * ysq[0];
                if (pair) acc[k] += fe[k][i + 1] * ysq[1];
            }
        }
        for (std::size_t k = 0; k < nf; ++k) out[k][static_cast<std::size_t>(j)] = acc[k];
    }
    return out;
}

void wilson_interval(double p_hat, std::int64_t n, double& lo, double& hi) {
    const double z2 = kZ95 * kZ95;
    const double nn = static_cast<double>(n);
    const double denom = 1.0 + z2 / nn;
    const double center = (p_hat + z2 / (2.0 * nn)) / denom;
    const double half =
        kZ95 * std::sqrt(p_hat * (1.0 - p_hat) / nn + z2 / (4.0 * nn * nn)) / denom;
    lo = std::max(0.0, center - half);
    hi = std::min(1.0, center + half);
    // Degenerate counts pin the matching endpoint exactly.
    if (p_hat == 0.0) lo = 0.0;
    if (p_hat == 1.0) hi = 1.0;
}

OracleEstimate mc_tail_from_sample(const std::vector<double>& sample, double q,
                                   std::uint64_t seed) {
    const std::int64_t n = static_cast<std::int64_t>(sample.size());
    check_n(n, 1000, "mc_tail");
    std::int64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
    for (std::int64_t j = 0; j < n; ++j) {
        count += sample[static_cast<std::size_t>(j)] > q ? 1 : 0;
    }
    OracleEstimate est;
    est.method = OracleMethod::mc;
    est.n_samples = n;
    est.seed = seed;
    est.p_hat = static_cast<double>(count) / static_cast<double>(n);
    est.se = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(n));
    wilson_interval(est.p_hat, n, est.ci_lo, est.ci_hi);
    return est;
}

OracleEstimate mc_lower_tail_from_sample(const std::vector<double>& sample, double q,
                                         std::uint64_t seed) {
    const std::int64_t n = static_cast<std::int64_t>(sample.size());
    check_n(n, 1000, "mc_lower_tail");
    std::int64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
    for (std::int64_t j = 0; j < n; ++j) {
        count += sample[static_cast<std::size_t>(j)] < q ? 1 : 0;
    }
    OracleEstimate est;
    est.method = OracleMethod::mc;
    est.n_samples = n;
    est.seed = seed;
    est.p_hat = static_cast<double>(count) / static_cast<double>(n);
    est.se = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(n));
    wilson_interval(est.p_hat, n, est.ci_lo, est.ci_hi);
    return est;
}

OracleEstimate mc_tail(const Spectrum& spec, const FunctionSpec& f, double q,
                       std::int64_t n, std::uint64_t seed) {
    check_n(n, 1000, "mc_tail");
    const std::vector<double> fe = eval_f_on_etas(spec, f);
    std::int64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : count)
    for (std::int64_t j = 0; j < n; ++j) {
        count += draw_qf(fe, spec.deltas(), seed, j) > q ? 1 : 0;
    }
    OracleEstimate est;
    est.method = OracleMethod::mc;
    est.n_samples = n;
    est.seed = seed;
    est.p_hat = static_cast<double>(count) / static_cast<double>(n);
    est.se = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(n));
    wilson_interval(est.p_hat, n, est.ci_lo, est.ci_hi);
    return est;
}

double log_mgf(const Spectrum& spec, const FunctionSpec& f, double t) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double a = t * f(spec.etas()[i]);
        const double d = spec.deltas()[i];
        acc.add(l1(a) + d * d * l2(a));
    }
    return acc.value();
}

OracleEstimate tilted_tail(const Spectrum& spec, const FunctionSpec& f, double q,
                           std::int64_t n, std::uint64_t seed, double t_tilt) {
    check_n(n, 1000, "tilted_tail");
    const ScaleParams sp = scale_params(spec, f);
    if (!(sp.d > 0.0)) throw std::invalid_argument("tilted_tail: degenerate f on spectrum");
    const double t_max = 1.0 / (2.0 * sp.d);
    double t = t_tilt;
    if (t < 0.0) {
        // Auto: the optimizing tilt of the upper-tail bound targets the
        // exceedance region.
        t = upper_tail_bound(sp, f, q).t_opt;
    }
    if (!(t >= 0.0) || t >= t_max) {
        throw std::invalid_argument("tilted_tail: t_tilt outside [0, 1/(2d))");
    }

    const std::size_t dim = spec.size();
    std::vector<double> fe = eval_f_on_etas(spec, f);
    std::vector<double> sigma(dim), mean(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const double a = t * fe[i];
        const double om = 1.0 - 2.0 * a;  // > 0 since t < 1/(2d)
        sigma[i] = 1.0 / std::sqrt(om);
        mean[i] = 2.0 * a * spec.deltas()[i] / om;
    }
    const double lmgf = log_mgf(spec, f, t);

    // Per-chunk partials combined in fixed chunk order.
    const std::int64_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> s_wi(static_cast<std::size_t>(n_chunks), 0.0);
    std::vector<double> s_wi2(static_cast<std::size_t>(n_chunks), 0.0);
    std::vector<double> s_w(static_cast<std::size_t>(n_chunks), 0.0);
    std::vector<double> s_w2(static_cast<std::size_t>(n_chunks), 0.0);

#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        const std::int64_t jb = c * kChunk;
        const std::int64_t je = std::min(n, jb + kChunk);
        CompensatedSum wi, wi2, w, w2;
        for (std::int64_t j = jb; j < je; ++j) {
            double qv = 0.0;
            for (std::size_t i = 0; i < dim; i += 2) {
                double z0, z1;
                normal_pair(seed, RngDomain::qf_draws, static_cast<std::uint64_t>(j),
                            static_cast<std::uint32_t>(i / 2), z0, z1);
                const double u0 = mean[i] + sigma[i] * z0 + spec.deltas()[i];
                qv += fe[i] * (u0 * u0);
                if (i + 1 < dim) {
                    const double u1 = mean[i + 1] + sigma[i + 1] * z1 + spec.deltas()[i + 1];
                    qv += fe[i + 1] * (u1 * u1);
                }
            }
            const double wgt = std::exp(lmgf - t * qv);
            w.add(wgt);
            w2.add(wgt * wgt);
            if (qv > q) {
                wi.add(wgt);
                wi2.add(wgt * wgt);
            }
        }
        const std::size_t cc = static_cast<std::size_t>(c);
        s_wi[cc] = wi.value();
        s_wi2[cc] = wi2.value();
        s_w[cc] = w.value();
        s_w2[cc] = w2.value();
    }

    CompensatedSum WI, WI2, W, W2;
    for (std::int64_t c = 0; c < n_chunks; ++c) {
        const std::size_t cc = static_cast<std::size_t>(c);
        WI.add(s_wi[cc]);
        WI2.add(s_wi2[cc]);
        W.add(s_w[cc]);
        W2.add(s_w2[cc]);
    }

    const double nn = static_cast<double>(n);
    OracleEstimate est;
    est.method = OracleMethod::tilted;
    est.n_samples = n;
    est.seed = seed;
    est.p_hat = WI.value() / nn;
    const double var = std::max(0.0, WI2.value() / nn - est.p_hat * est.p_hat);
    est.se = std::sqrt(var / (nn - 1.0));
    est.ci_lo = std::max(0.0, est.p_hat - kZ95 * est.se);
    est.ci_hi = std::min(1.0, est.p_hat + kZ95 * est.se);
    est.ess = W2.value() > 0.0 ? W.value() * W.value() / W2.value() : 0.0;
    est.low_quality = est.ess < 50.0;
    return est;
}

// ---------------------------------------------------------------------------
// Closed forms: chi-square survival via the regularized incomplete gamma.

namespace {

// Regularized lower incomplete gamma P(a, x) by series (x < a + 1) or
// continued fraction (modified Lentz) otherwise.
double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 1000; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Continued fraction for Q(a, x).
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    const double qq = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - qq;
}

double gamma_q(double a, double x) {
    if (x < a + 1.0) return 1.0 - gamma_p(a, x);
    // Recompute the continued fraction directly to avoid cancellation.
    const double lg = std::lgamma(a);
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - lg) * h;
}

}  // namespace

double chi_square_sf(double x, double dof) {
    if (dof <= 0.0) throw std::invalid_argument("chi_square_sf: dof must be positive");
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * x);
}

double noncentral_chi_square_sf(double x, double dof, double lambda) {
    if (dof <= 0.0 || lambda < 0.0) {
        throw std::invalid_argument("noncentral_chi_square_sf: bad parameters");
    }
    if (x <= 0.0) return 1.0;
    if (lambda == 0.0) return chi_square_sf(x, dof);
    // Poisson mixture over chi-square orders; survival terms are bounded by 1,
    // so the truncation error is below the remaining Poisson mass.
    const double half = 0.5 * lambda;
    double weight = std::exp(-half);  // k = 0
    double accumulated_mass = weight;
    CompensatedSum sf;
    sf.add(weight * chi_square_sf(x, dof));
    const int cap = 100000;
    int k = 0;
    while (1.0 - accumulated_mass > 1e-15) {
        if (++k > cap) {
            throw std::runtime_error("noncentral_chi_square_sf: series cap exceeded");
        }
        weight *= half / static_cast<double>(k);
        accumulated_mass += weight;
        sf.add(weight * chi_square_sf(x, dof + 2.0 * k));
    }
    return std::min(1.0, sf.value());
}

double exact_tail_equal_eigs(int n_terms, double eta, double delta, double q) {
    if (n_terms < 1) throw std::invalid_argument("exact_tail_equal_eigs: n_terms must be >= 1");
    if (eta == 0.0) throw std::invalid_argument("exact_tail_equal_eigs: eta must be nonzero");
    const double dof = static_cast<double>(n_terms);
    const double lambda = dof * delta * delta;
    if (eta > 0.0) {
        return noncentral_chi_square_sf(q / eta, dof, lambda);
    }
    // eta < 0: Q = eta * S with S >= 0, so P(Q > q) = P(S < q/eta).
    if (q >= 0.0) return 0.0;
    return 1.0 - noncentral_chi_square_sf(q / eta, dof, lambda);
}

// ---------------------------------------------------------------------------
// Modified Q-Q diagnostic.

std::vector<QqRow> qq_rows_from_sorted(const std::vector<double>& sorted_sample,
                                       const std::function<double(double)>& tail_bound,
                                       const std::vector<double>& z_grid) {
    const std::int64_t n = static_cast<std::int64_t>(sorted_sample.size());
    check_n(n, 10, "qq_rows_from_sorted");
    std::vector<QqRow> rows;
    rows.reserve(z_grid.size());
    for (double z : z_grid) {
        QqRow row;
        row.z = z;
        const double p = std::pow(10.0, -z);
        // Resolution rule: at least ~10 draws beyond the quantile.
        if (!(z > 0.0) || p < 10.0 / static_cast<double>(n)) {
            row.ok = false;
            rows.push_back(row);
            continue;
        }
        const double m = (1.0 - p) * static_cast<double>(n);
        auto clamp_idx = [&](double idx) {
            return static_cast<std::size_t>(
                std::min<double>(static_cast<double>(n - 1), std::max(0.0, idx)));
        };
        const std::size_t idx = clamp_idx(std::ceil(m) - 1.0);
        const double se_count = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
        row.q_hat = sorted_sample[idx];
        row.q_lo4 = sorted_sample[clamp_idx(m - 4.0 * se_count - 1.0)];
        row.q_hi4 = sorted_sample[clamp_idx(m + 4.0 * se_count - 1.0)];
        const double bound = tail_bound(row.q_hat);
        row.omega = -std::log10(bound);
        row.gap = z - row.omega;
        row.ok = true;
        rows.push_back(row);
    }
    return rows;
}

std::vector<QqRow> qq_data(const Spectrum& spec, const FunctionSpec& f,
                           const std::function<double(double)>& tail_bound,
                           const std::vector<double>& z_grid, std::int64_t n,
                           std::uint64_t seed) {
    std::vector<double> sample = sample_qf(spec, f, seed, n);
    std::sort(sample.begin(), sample.end());
    return qq_rows_from_sorted(sample, tail_bound, z_grid);
}

}  // namespace qfb
