#include "qfb/matrixops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qfb/rng.hpp"
#include "qfb/summation.hpp"

namespace qfb {

SymMatrix::SymMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), a_(std::move(entries)) {
    if (n_ == 0) throw std::invalid_argument("matrix: dimension must be >= 1");
    if (a_.size() != n_ * n_) throw std::invalid_argument("matrix: entry count != n^2");
    double max_abs = 0.0;
    for (double v : a_) {
        if (!std::isfinite(v)) throw std::invalid_argument("matrix: non-finite entry");
        max_abs = std::max(max_abs, std::abs(v));
    }
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double hi = a_[i * n_ + j];
            const double lo = a_[j * n_ + i];
            if (std::abs(hi - lo) > 1e-12 * max_abs) {
                throw std::invalid_argument("matrix: not symmetric");
            }
            const double avg = 0.5 * (hi + lo);
            a_[i * n_ + j] = avg;
            a_[j * n_ + i] = avg;
        }
    }
}

namespace {

// y = M x, rows in parallel; each row is a serial dot product so the result
// does not depend on the thread count.
void matvec(const SymMatrix& m, const std::vector<double>& x, std::vector<double>& y) {
    const auto n = static_cast<std::ptrdiff_t>(m.dim());
#pragma omp parallel for schedule(static) if (n > 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double* row = m.data().data() + static_cast<std::size_t>(i) * m.dim();
        double acc = 0.0;
        for (std::ptrdiff_t j = 0; j < n; ++j) acc += row[j] * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = acc;
    }
}

double norm2(const std::vector<double>& x) {
    CompensatedSum s;
    for (double v : x) s.add(v * v);
    return std::sqrt(s.value());
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    CompensatedSum s;
    for (std::size_t i = 0; i < x.size(); ++i) s.add(x[i] * y[i]);
    return s.value();
}

// One power-iteration run; returns the absolute Rayleigh quotient and its
// residual at the last iterate.
struct PowerRun {
    double lambda_abs = 0.0;
    double residual = 0.0;
    bool stabilized = false;
};

PowerRun power_run(const SymMatrix& m, double tol, std::uint64_t seed, bool on_m_squared,
                   int max_iter) {
    const std::size_t n = m.dim();
    std::vector<double> x(n), y(n), z(n);
    for (std::size_t i = 0; i < n; ++i) {
        double a, b;
        normal_pair(seed, RngDomain::power_iteration, i, 0, a, b);
        x[i] = a;
    }
    double xn = norm2(x);
    for (auto& v : x) v /= xn;

    PowerRun run;
    double prev = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        if (on_m_squared) {
            matvec(m, x, z);
            matvec(m, z, y);
        } else {
            matvec(m, x, y);
        }
        const double rho = dot(x, y);  // Rayleigh quotient (x normalized)
        const double yn = norm2(y);
        if (yn == 0.0) {  // x in the kernel; re-randomize
            for (std::size_t i = 0; i < n; ++i) {
                double a, b;
                normal_pair(seed + 17, RngDomain::power_iteration, i, it + 1u, a, b);
                x[i] = a;
            }
            xn = norm2(x);
            for (auto& v : x) v /= xn;
            continue;
        }
        // residual ||M x - rho x|| relative to |rho|
        double res2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - rho * x[i];
            res2 += r * r;
        }
        run.lambda_abs = std::abs(rho);
        run.residual = std::sqrt(res2);
        const bool rho_settled = std::abs(run.lambda_abs - prev) <=
                                 0.25 * tol * std::max(run.lambda_abs, 1e-300);
        if (rho_settled && run.residual <= tol * std::max(run.lambda_abs, 1e-300)) {
            run.stabilized = true;
            return run;
        }
        // Rayleigh quotient stalls while the residual stays large when the
        // spectrum has a +/- lambda pair: hand over to the M^2 run.
        if (!on_m_squared && rho_settled && it > 32 &&
            run.residual > 0.25 * run.lambda_abs) {
            return run;
        }
        prev = run.lambda_abs;
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / yn;
    }
    return run;
}

}  // namespace

double spectral_bound(const SymMatrix& m, double tol, std::uint64_t seed) {
    if (!(tol > 0.0)) throw std::invalid_argument("spectral_bound: tol must be positive");
    double hs2 = 0.0;
    for (double v : m.data()) hs2 += v * v;
    if (hs2 == 0.0) {
        throw std::invalid_argument("spectral_bound: zero matrix has no nonzero eigenvalue");
    }

    const int cap = 200000;
    PowerRun run = power_run(m, tol, seed, /*on_m_squared=*/false, cap);
    if (!run.stabilized) {
        // Restart once with a fresh vector, then fall back to M^2 (converges
        // to lambda_max^2 even for +/- pairs).
        PowerRun retry = power_run(m, tol, seed ^ 0x9E3779B97F4A7C15ull, false, cap / 4);
        if (retry.stabilized) {
            run = retry;
        } else {
            PowerRun sq = power_run(m, tol, seed + 1, /*on_m_squared=*/true, cap);
            if (sq.stabilized) {
                run = sq;
                run.lambda_abs = std::sqrt(sq.lambda_abs);
            } else {
                throw std::runtime_error(
                    "spectral_bound: power iteration did not stabilize; best enclosure |lambda| in [" +
                    std::to_string(std::max(run.lambda_abs, std::sqrt(sq.lambda_abs))) + ", " +
                    std::to_string(std::sqrt(hs2)) + "]");
            }
        }
    }
    return run.lambda_abs * (1.0 + tol);
}

namespace {

MatrixSummary summarize_impl(const SymMatrix& m, const std::vector<double>& mu,
                             double spec_tol, std::uint64_t seed, bool parallel) {
    const std::size_t n = m.dim();
    if (mu.size() != n) throw std::invalid_argument("summarize: dim(mu) != dim(M)");
    for (double v : mu) {
        if (!std::isfinite(v)) throw std::invalid_argument("summarize: non-finite mu entry");
    }

    // Per-row partials, combined afterwards in fixed row order.
    std::vector<double> row_hs(n), row_mmu(n), row_muq(n);
    const auto ni = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t i = 0; i < ni; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        const double* row = m.data().data() + ii * n;
        double hs = 0.0, mm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            hs += row[j] * row[j];
            mm += row[j] * mu[j];
        }
        row_hs[ii] = hs;
        row_mmu[ii] = mm;  // (M mu)_i for the moment
    }
    CompensatedSum trace, hs2, mmu2, muq;
    for (std::size_t i = 0; i < n; ++i) {
        trace.add(m(i, i));
        hs2.add(row_hs[i]);
        mmu2.add(row_mmu[i] * row_mmu[i]);
        muq.add(mu[i] * row_mmu[i]);
    }

    MatrixSummary s;
    s.trace = trace.value();
    s.hs_norm2 = hs2.value();
    s.mmu_norm2 = mmu2.value();
    s.mu_quad = muq.value();
    s.spec_bound = spectral_bound(m, spec_tol, seed);
    return s;
}

}  // namespace

MatrixSummary summarize(const SymMatrix& m, const std::vector<double>& mu, double spec_tol,
                        std::uint64_t seed) {
    return summarize_impl(m, mu, spec_tol, seed, true);
}

MatrixSummary summarize_serial(const SymMatrix& m, const std::vector<double>& mu,
                               double spec_tol, std::uint64_t seed) {
    return summarize_impl(m, mu, spec_tol, seed, false);
}

namespace {

// Cyclic Jacobi with accumulated rotations. A is destroyed.
void jacobi(std::vector<double>& a, std::size_t n, std::vector<double>* v) {
    if (v) {
        v->assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) (*v)[i * n + i] = 1.0;
    }
    double hs2 = 0.0;
    for (double x : a) hs2 += x * x;
    const double target = 1e-12 * std::sqrt(hs2);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a[i * n + j] * a[i * n + j];
        return std::sqrt(s);
    };

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_norm() <= target) return;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = 0.5 * (aqq - app) / apq;
                // Smaller-root tangent for numerical stability.
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                if (v) {
                    for (std::size_t k = 0; k < n; ++k) {
                        const double vkp = (*v)[k * n + p];
                        const double vkq = (*v)[k * n + q];
                        (*v)[k * n + p] = c * vkp - s * vkq;
                        (*v)[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    if (off_norm() > target) {
        throw std::runtime_error("jacobi: did not reach the off-diagonal tolerance");
    }
}

}  // namespace

std::vector<double> jacobi_eigenvalues(const SymMatrix& m, std::size_t dim_cap) {
    const std::size_t n = m.dim();
    if (n > dim_cap) throw std::invalid_argument("jacobi: dimension exceeds the cap");
    std::vector<double> a = m.data();
    jacobi(a, n, nullptr);
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a[i * n + i];
    return eig;
}

Spectrum full_spectrum(const SymMatrix& m, const std::vector<double>& mu,
                       std::size_t dim_cap) {
    const std::size_t n = m.dim();
    if (n > dim_cap) throw std::invalid_argument("full_spectrum: dimension exceeds the cap");
    if (mu.size() != n) throw std::invalid_argument("full_spectrum: dim(mu) != dim(M)");
    std::vector<double> a = m.data();
    std::vector<double> v;
    jacobi(a, n, &v);
    std::vector<double> etas(n), deltas(n);
    for (std::size_t i = 0; i < n; ++i) {
        etas[i] = a[i * n + i];
        double d = 0.0;
        for (std::size_t k = 0; k < n; ++k) d += v[k * n + i] * mu[k];  // (V^T mu)_i
        deltas[i] = d;
    }
    return Spectrum(std::move(etas), std::move(deltas));
}

ScaleParams scale_params(const MatrixSummary& s, const FunctionSpec& f) {
    const double L = s.spec_bound;
    if (!(L > 0.0)) throw std::invalid_argument("scale_params: spectral bound must be positive");
    if (!f.covers(-L, L)) {
        throw std::domain_error("scale_params: f is not defined on [-L, L]");
    }
    ScaleParams sp;
    sp.L = L;
    // Endpoint value of |f| over [-L, L]: equals max |f(eta)| for the identity
    // and power families, and over-estimates it otherwise (which only shrinks
    // the tilt interval, never invalidating the bound).
    sp.d = std::max(std::abs(f(L)), std::abs(f(-L)));
    sp.c = f.deriv0();
    sp.xi = sp.c * (s.mu_quad + s.trace);
    sp.s2 = s.hs_norm2;
    sp.s2d = s.mmu_norm2;
    return sp;
}

LegacyParams legacy_params(const MatrixSummary& s) {
    LegacyParams p;
    p.nu = 2.0 * (4.0 * s.mmu_norm2 + 2.0 * s.hs_norm2);
    p.b = s.spec_bound;
    p.mean = s.mu_quad + s.trace;
    return p;
}

}  // namespace qfb
