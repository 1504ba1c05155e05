#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qfb/bounds.hpp"
#include "qfb/matrixops.hpp"
#include "qfb/rng.hpp"

using namespace qfb;

namespace {

SymMatrix random_symmetric(std::size_t n, std::uint64_t seed) {
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v =
                2.0 * uniform01(seed, RngDomain::generic,
                                static_cast<std::uint64_t>(i * n + j), 0) -
                1.0;
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    return SymMatrix(n, std::move(a));
}

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = 2.0 * uniform01(seed, RngDomain::generic, i, 7) - 1.0;
    }
    return v;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("symmetrization and rejection") {
    // Tiny asymmetry is averaged away.
    SymMatrix ok(2, {1.0, 2.0 + 1e-14, 2.0, 3.0});
    CHECK(ok(0, 1) == ok(1, 0));

    CHECK_THROWS_AS(SymMatrix(2, {1.0, 2.0, 2.5, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(SymMatrix(2, {1.0, 2.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(SymMatrix(2, {1.0, std::nan(""), std::nan(""), 3.0}),
                    std::invalid_argument);
}

TEST_CASE("summaries of small closed-form matrices") {
    const SymMatrix eye(2, {1, 0, 0, 1});
    const MatrixSummary a = summarize(eye, {0.0, 0.0});
    CHECK(a.trace == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(a.mu_quad == 0.0);
    CHECK(a.mmu_norm2 == 0.0);
    CHECK(a.hs_norm2 == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(a.spec_bound == doctest::Approx(1.0).epsilon(1e-9));

    const SymMatrix d(2, {3, 0, 0, -5});
    const MatrixSummary b = summarize(d, {1.0, 1.0});
    CHECK(b.trace == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(b.mu_quad == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(b.mmu_norm2 == doctest::Approx(34.0).epsilon(1e-15));
    CHECK(b.hs_norm2 == doctest::Approx(34.0).epsilon(1e-15));
    CHECK(b.spec_bound == doctest::Approx(5.0 * (1.0 + 1e-10)).epsilon(1e-9));

    CHECK_THROWS_AS(summarize(d, {1.0}), std::invalid_argument);
}

TEST_CASE("spectral bound: degenerate and adversarial spectra") {
    CHECK_THROWS_AS(spectral_bound(SymMatrix(2, {0, 0, 0, 0}), 1e-10),
                    std::invalid_argument);

    // Exact +/- pair: plain power iteration stalls and the M^2 fallback wins.
    const SymMatrix pm(2, {5, 0, 0, -5});
    CHECK(spectral_bound(pm, 1e-10) == doctest::Approx(5.0).epsilon(1e-8));

    // Off-diagonal +/- pair (eigenvalues +/- 1).
    const SymMatrix rot(2, {0, 1, 1, 0});
    CHECK(spectral_bound(rot, 1e-10) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("spectral bound matches the Jacobi oracle on random matrices") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const SymMatrix m = random_symmetric(50, seed);
        const double jac = max_abs(jacobi_eigenvalues(m));
        const double pow_est = spectral_bound(m, 1e-10, seed);
        CHECK(pow_est == doctest::Approx(jac).epsilon(1e-8));
        CHECK(pow_est >= jac * (1.0 - 1e-9));  // inflated, never an under-estimate
    }
}

TEST_CASE("full spectrum pairs eigenvalues with rotated means") {
    const SymMatrix d(2, {3, 0, 0, -5});
    const Spectrum s = full_spectrum(d, {1.0, 0.0});
    std::vector<double> etas = s.etas();
    std::vector<double> deltas = s.deltas();
    // Up to ordering: eigenvalue 3 carries |delta| 1, eigenvalue -5 carries 0.
    const std::size_t i3 = etas[0] == doctest::Approx(3.0) ? 0 : 1;
    CHECK(etas[i3] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(etas[1 - i3] == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK(std::abs(deltas[i3]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(deltas[1 - i3]) <= 1e-12);

    const SymMatrix eye(3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    for (double e : jacobi_eigenvalues(eye)) CHECK(e == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("trace identities of the Jacobi eigenvalues") {
    const SymMatrix m = random_symmetric(20, 21);
    const std::vector<double> mu = random_vector(20, 22);
    const MatrixSummary s = summarize(m, mu);
    const Spectrum spec = full_spectrum(m, mu);

    CHECK(spec.sum_eta() == doctest::Approx(s.trace).epsilon(1e-10));
    CHECK(spec.sum_eta_sq() == doctest::Approx(s.hs_norm2).epsilon(1e-10));
    CHECK(spec.sum_eta_delta_sq() == doctest::Approx(s.mu_quad).epsilon(1e-10));
    CHECK(spec.sum_eta_sq_delta_sq() == doctest::Approx(s.mmu_norm2).epsilon(1e-10));
}

TEST_CASE("bound-path equivalence: trace summary vs exact eigendecomposition") {
    for (std::uint64_t seed : {31u, 32u, 33u, 34u, 35u}) {
        const std::size_t n = 10 + static_cast<std::size_t>(seed % 21);
        const SymMatrix m = random_symmetric(n, seed);
        const std::vector<double> mu = random_vector(n, seed + 100);
        const MatrixSummary summary = summarize(m, mu, 1e-10, seed);
        const Spectrum spec = full_spectrum(m, mu);

        for (const FunctionSpec& f : {FunctionSpec::identity(), FunctionSpec::power(2)}) {
            const ScaleParams sp_sum = scale_params(summary, f);
            const ScaleParams sp_exact = scale_params(spec, f);
            const Moments mom = moments(spec, f);
            for (double k : {1.0, 3.0}) {
                const double q = mom.mean + k * std::sqrt(mom.variance);
                const double b_sum = upper_tail_bound(sp_sum, f, q).bound;
                const double b_exact = upper_tail_bound(sp_exact, f, q).bound;
                CHECK(b_sum == doctest::Approx(b_exact).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("summaries are invariant under orthogonal conjugation") {
    const std::size_t n = 10;
    const SymMatrix m = random_symmetric(n, 51);
    std::vector<double> mu = random_vector(n, 52);
    const MatrixSummary base = summarize(m, mu, 1e-11);

    // Apply a product of Givens rotations to both M and mu.
    std::vector<double> a = m.data();
    std::vector<double> v = mu;
    for (int r = 0; r < 25; ++r) {
        const std::size_t p = static_cast<std::size_t>(
            uniform01(60, RngDomain::generic, static_cast<std::uint64_t>(r), 0) * n);
        const std::size_t q = (p + 1 + static_cast<std::size_t>(
                                            uniform01(60, RngDomain::generic,
                                                      static_cast<std::uint64_t>(r), 1) *
                                            (n - 1))) %
                              n;
        if (p == q) continue;
        const double th =
            6.28 * uniform01(60, RngDomain::generic, static_cast<std::uint64_t>(r), 2);
        const double c = std::cos(th), s = std::sin(th);
        for (std::size_t k = 0; k < n; ++k) {  // rows
            const double ap = a[p * n + k], aq = a[q * n + k];
            a[p * n + k] = c * ap - s * aq;
            a[q * n + k] = s * ap + c * aq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // columns
            const double ap = a[k * n + p], aq = a[k * n + q];
            a[k * n + p] = c * ap - s * aq;
            a[k * n + q] = s * ap + c * aq;
        }
        const double vp = v[p], vq = v[q];
        v[p] = c * vp - s * vq;
        v[q] = s * vp + c * vq;
    }
    const MatrixSummary rotated = summarize(SymMatrix(n, std::move(a)), v, 1e-11);
    CHECK(rotated.trace == doctest::Approx(base.trace).epsilon(1e-10));
    CHECK(rotated.hs_norm2 == doctest::Approx(base.hs_norm2).epsilon(1e-10));
    CHECK(rotated.mu_quad == doctest::Approx(base.mu_quad).epsilon(1e-10));
    CHECK(rotated.mmu_norm2 == doctest::Approx(base.mmu_norm2).epsilon(1e-10));
    CHECK(rotated.spec_bound == doctest::Approx(base.spec_bound).epsilon(1e-8));
}

TEST_CASE("parallel summarize is bit-identical to the serial reference") {
    const SymMatrix m = random_symmetric(160, 71);
    const std::vector<double> mu = random_vector(160, 72);
    const MatrixSummary p = summarize(m, mu);
    const MatrixSummary s = summarize_serial(m, mu);
    CHECK(p.trace == s.trace);
    CHECK(p.mu_quad == s.mu_quad);
    CHECK(p.mmu_norm2 == s.mmu_norm2);
    CHECK(p.hs_norm2 == s.hs_norm2);
    CHECK(p.spec_bound == s.spec_bound);
}

TEST_CASE("dimension caps") {
    const SymMatrix m = random_symmetric(8, 81);
    CHECK_THROWS_AS(full_spectrum(m, std::vector<double>(8, 0.0), 4), std::invalid_argument);
    CHECK_THROWS_AS(jacobi_eigenvalues(m, 4), std::invalid_argument);
}
