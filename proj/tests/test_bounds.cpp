#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qfb/bounds.hpp"
#include "qfb/oracle.hpp"
#include "qfb/spectrum.hpp"

using namespace qfb;

namespace {

// Test-side oracle: dense grid scan with refinement of the log objective,
// written against the raw closed forms (independent of the library's
// coefficient and optimizer code paths).
double grid_min_log_bound(double s2, double s2d, double xi, double L, double c, int p,
                          double gap, double t_max) {
    auto objective = [&](double t) {
        const double tfL = p == 1 ? t * L : t * std::pow(L, p);
        const double alpha =
            -std::log(1.0 - 2.0 * tfL) / (2.0 * L * L) - (p == 1 ? t * c / L : 0.0);
        const double beta = tfL / (1.0 - 2.0 * tfL) / (L * L) - (p == 1 ? t * c / L : 0.0);
        return beta * s2d + alpha * s2 - gap * t;
    };
    (void)xi;
    double lo = 0.0, hi = t_max, best = 1e300, tb = 0.0;
    for (int pass = 0; pass < 4; ++pass) {
        const double step = (hi - lo) / 1e6;
        for (int i = 1; i < 1000000; ++i) {
            const double t = lo + i * step;
            const double v = objective(t);
            if (v < best) {
                best = v;
                tb = t;
            }
        }
        lo = std::max(0.0, tb - 2.0 * step);
        hi = std::min(t_max, tb + 2.0 * step);
    }
    return best;
}

// Classical chi-square(n) Chernoff value for Q = L * chi2(n): at x = q / L,
// (x/n)^{n/2} e^{(n-x)/2}.
double chi2_chernoff(double q, int n, double L = 1.0) {
    const double x = q / L;
    return std::pow(x / n, n / 2.0) * std::exp((n - x) / 2.0);
}

}  // namespace

TEST_CASE("nu_f closed values and shape") {
    const Spectrum s2 = new_spectrum({1, 1}, {0, 0});
    const FunctionSpec id = FunctionSpec::identity();
    CHECK(nu_f(s2, id, 0.25) == doctest::Approx(0.38629436111989057).epsilon(1e-13));
    CHECK(nu_f(s2, id, 0.0) == 0.0);

    const Spectrum s1 = new_spectrum({1}, {1});
    CHECK(nu_f(s1, id, 0.25) == doctest::Approx(0.69314718055994529).epsilon(1e-13));

    // Non-negative and increasing in t.
    double prev = -1.0;
    for (int k = 0; k < 100; ++k) {
        const double t = 0.49 * k / 100.0;
        const double v = nu_f(s2, id, t);
        CHECK(v >= prev - 1e-15);
        CHECK(v >= 0.0);
        prev = v;
    }
    CHECK_THROWS_AS(nu_f(s2, id, 0.6), std::invalid_argument);
}

TEST_CASE("upper tail bound reproduces the chi-square Chernoff closed forms") {
    const FunctionSpec id = FunctionSpec::identity();

    // chi2(2) at q = 10: (e q / 2) e^{-q/2}, t_opt = (1 - 2/q)/2.
    const Spectrum s2 = new_spectrum({1, 1}, {0, 0});
    const TailBoundResult r = upper_tail_bound(s2, id, 10.0);
    CHECK(r.bound == doctest::Approx(0.091578194443670893).epsilon(1e-10));
    CHECK(r.t_opt == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(r.regime == BoundRegime::optimized);
    CHECK(r.bound == doctest::Approx(chi2_chernoff(10.0, 2)).epsilon(1e-10));

    // chi2(1) at q = 6: sqrt(6) e^{-2.5}.
    const Spectrum s1 = new_spectrum({1}, {0});
    const TailBoundResult r1 = upper_tail_bound(s1, id, 6.0);
    CHECK(r1.bound == doctest::Approx(0.20106636216561138).epsilon(1e-10));

    // Trivial at and below xi.
    const TailBoundResult tv = upper_tail_bound(s2, id, 2.0);
    CHECK(tv.bound == 1.0);
    CHECK(tv.regime == BoundRegime::trivial);
    CHECK(upper_tail_bound(s2, id, -4.0).bound == 1.0);
    CHECK_THROWS_AS(upper_tail_bound(s2, id, std::nan("")), std::invalid_argument);
}

TEST_CASE("equal-eigenvalue exactness across n and L") {
    const FunctionSpec id = FunctionSpec::identity();
    for (int n : {1, 2, 10}) {
        for (double L : {0.5, 1.0, 2.0}) {
            const Spectrum s(std::vector<double>(static_cast<std::size_t>(n), L),
                             std::vector<double>(static_cast<std::size_t>(n), 0.0));
            for (double x : {1.8, 3.0, 6.0, 15.0}) {
                const double q = L * n * x / 1.5;  // spread of q/(Ln) ratios > 1
                if (q / L <= n) continue;
                const TailBoundResult r = upper_tail_bound(s, id, q);
                CHECK(r.bound ==
                      doctest::Approx(chi2_chernoff(q, n, L)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("lower tail bound against the dense-grid oracle") {
    const FunctionSpec id = FunctionSpec::identity();
    const Spectrum s2 = new_spectrum({1, 1}, {0, 0});

    const TailBoundResult r = lower_tail_bound(s2, id, 0.1);
    // Frozen from the grid oracle; cross-checked live below.
    CHECK(r.bound == doctest::Approx(0.75414499573627736).epsilon(1e-9));
    const double oracle = grid_min_log_bound(2.0, 0.0, 2.0, 1.0, 1.0, 1, 2.0 - 0.1, 0.5);
    CHECK(r.log_bound == doctest::Approx(oracle).epsilon(1e-9));

    CHECK(lower_tail_bound(s2, id, 2.0).bound == 1.0);   // q = xi
    CHECK(lower_tail_bound(s2, id, 5.0).bound == 1.0);   // q > xi
    CHECK(lower_tail_bound(s2, id, 2.0).regime == BoundRegime::trivial);
}

TEST_CASE("upper tail bound against the dense-grid oracle, noncentral and powers") {
    const Spectrum s = new_spectrum({0.8, 1.2}, {1.0, 0.5});
    const FunctionSpec id = FunctionSpec::identity();
    const ScaleParams sp = scale_params(s, id);
    const double q = sp.xi + 6.0;
    const TailBoundResult r = upper_tail_bound(s, id, q);
    const double oracle = grid_min_log_bound(sp.s2, sp.s2d, sp.xi, sp.L, 1.0, 1, q - sp.xi,
                                             1.0 / (2.0 * sp.d));
    CHECK(r.log_bound == doctest::Approx(oracle).epsilon(1e-9));

    const FunctionSpec p3 = FunctionSpec::power(3);
    const ScaleParams sp3 = scale_params(s, p3);
    const double q3 = 8.0;
    const TailBoundResult r3 = upper_tail_bound(s, p3, q3);
    const double oracle3 =
        grid_min_log_bound(sp3.s2, sp3.s2d, 0.0, sp3.L, 0.0, 3, q3, 1.0 / (2.0 * sp3.d));
    CHECK(r3.log_bound == doctest::Approx(oracle3).epsilon(1e-9));
}

TEST_CASE("symmetric spectra tie the two tails together") {
    const Spectrum s = new_spectrum({1, -1}, {0, 0});
    const FunctionSpec id = FunctionSpec::identity();
    for (double q : {1.0, 3.0, 7.5}) {
        const TailBoundResult up = upper_tail_bound(s, id, q);
        const TailBoundResult lo = lower_tail_bound(s, id, -q);
        CHECK(up.log_bound == doctest::Approx(lo.log_bound).epsilon(1e-12));
        CHECK(up.bound == doctest::Approx(lo.bound).epsilon(1e-12));
    }
}

TEST_CASE("legacy bound piecewise closed forms") {
    // nu = 8, b = 1, mean = 2 (the chi-square(2) spectrum).
    const LegacyParams lp = legacy_params(new_spectrum({1, 1}, {0, 0}));
    CHECK(lp.nu == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(lp.b == 1.0);
    CHECK(lp.mean == doctest::Approx(2.0).epsilon(1e-15));

    // q = 4 sits exactly on the regime knee: gaussian branch, e^{-1/4}.
    const TailBoundResult g = legacy_bound(lp, 4.0, Tail::upper);
    CHECK(g.bound == doctest::Approx(0.77880078307140488).epsilon(1e-12));
    CHECK(g.regime == BoundRegime::gaussian);

    const TailBoundResult e = legacy_bound(lp, 10.0, Tail::upper);
    CHECK(e.bound == doctest::Approx(0.17377394345044514).epsilon(1e-12));
    CHECK(e.regime == BoundRegime::exponential);

    CHECK(legacy_bound(lp, 2.0, Tail::upper).bound == 1.0);
    CHECK(legacy_bound(lp, 2.0, Tail::upper).regime == BoundRegime::trivial);

    // Lower tail mirrors around the mean.
    const TailBoundResult lg = legacy_bound(lp, 0.0, Tail::lower);
    CHECK(lg.bound == doctest::Approx(0.77880078307140488).epsilon(1e-12));
    CHECK(lg.regime == BoundRegime::gaussian);
    const TailBoundResult le = legacy_bound(lp, -6.0, Tail::lower);
    CHECK(le.bound == doctest::Approx(0.17377394345044514).epsilon(1e-12));
    CHECK(le.regime == BoundRegime::exponential);
    CHECK(legacy_bound(lp, 3.0, Tail::lower).bound == 1.0);

    CHECK_THROWS_AS(legacy_bound(LegacyParams{0.0, 1.0, 0.0}, 1.0, Tail::upper),
                    std::invalid_argument);
}

TEST_CASE("comparison table") {
    const Spectrum s2 = new_spectrum({1, 1}, {0, 0});
    const FunctionSpec id = FunctionSpec::identity();

    const std::vector<CompareRow> rows = compare(s2, id, {10.0});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].bound_new == doctest::Approx(0.091578194443670893).epsilon(1e-10));
    CHECK(rows[0].bound_legacy == doctest::Approx(0.17377394345044514).epsilon(1e-12));
    CHECK(rows[0].ratio == doctest::Approx(0.52699612280932162).epsilon(1e-9));
    CHECK(rows[0].has_legacy);

    CHECK(compare(s2, id, {}).empty());

    // q below both xi and the mean: both trivial, ratio 1.
    const std::vector<CompareRow> triv = compare(s2, id, {1.0});
    CHECK(triv[0].bound_new == 1.0);
    CHECK(triv[0].bound_legacy == 1.0);
    CHECK(triv[0].ratio == 1.0);

    // Power f has no legacy column.
    const std::vector<CompareRow> pow_rows = compare(s2, FunctionSpec::power(2), {10.0});
    CHECK_FALSE(pow_rows[0].has_legacy);
    CHECK(std::isnan(pow_rows[0].bound_legacy));
}

TEST_CASE("dominance over the legacy bound for identity f") {
    const std::vector<Spectrum> specs = {
        new_spectrum({1, 1}, {0, 0}),
        new_spectrum({1}, {0}),
        new_spectrum({3, -5}, {0, 0}),
        new_spectrum({1, -1, 2, -2, 0.5, -0.5}, {0, 0, 0, 0, 0, 0}),
        new_spectrum({0.5, 1.5, 2.5}, {1.0, 0.5, 0.0}),
    };
    const FunctionSpec id = FunctionSpec::identity();
    for (const Spectrum& s : specs) {
        const LegacyParams lp = legacy_params(s);
        const Moments mom = moments(s, id);
        const double sd = std::sqrt(mom.variance);
        for (int k = 1; k <= 40; ++k) {
            const double q = mom.mean + 0.25 * sd * k;
            const double b_new = upper_tail_bound(s, id, q).bound;
            const double b_old = legacy_bound(lp, q, Tail::upper).bound;
            REQUIRE(b_new <= b_old + 1e-12);
        }
    }
}

TEST_CASE("upper bound is non-increasing and lower bound non-decreasing in q") {
    const Spectrum s = new_spectrum({0.5, 1.5, -0.75}, {1.0, 0.5, 0.0});
    const FunctionSpec id = FunctionSpec::identity();
    const ScaleParams sp = scale_params(s, id);
    double prev = 2.0;
    for (int k = 1; k <= 60; ++k) {
        const double q = sp.xi + 0.4 * k;
        const double b = upper_tail_bound(s, id, q).bound;
        CHECK(b <= prev + 1e-10);
        prev = b;
    }
    prev = 2.0;
    for (int k = 1; k <= 60; ++k) {
        const double q = sp.xi - 0.4 * k;
        const double b = lower_tail_bound(s, id, q).bound;
        CHECK(b <= prev + 1e-10);  // decreasing as q moves away from xi
        prev = b;
    }
}

TEST_CASE("log objective is convex at the returned tilt") {
    const std::vector<Spectrum> specs = {
        new_spectrum({1, 1}, {0, 0}),
        new_spectrum({0.8, 1.2}, {1.0, 0.5}),
        new_spectrum({1, -1, 0.25}, {0.3, 0.1, 2.0}),
    };
    for (const Spectrum& s : specs) {
        for (const FunctionSpec& f :
             {FunctionSpec::identity(), FunctionSpec::power(2), FunctionSpec::power(3)}) {
            const ScaleParams sp = scale_params(s, f);
            for (double dq : {0.5, 2.0, 8.0}) {
                const double q = sp.xi + dq;
                const TailBoundResult r = upper_tail_bound(sp, f, q);
                if (r.regime != BoundRegime::optimized) continue;
                const double h = 1e-5 * r.t_opt;
                if (r.t_opt - h <= 0.0) continue;
                const double gap = q - sp.xi;
                const double second =
                    tilt_objective(sp, f, gap, r.t_opt + h) -
                    2.0 * tilt_objective(sp, f, gap, r.t_opt) +
                    tilt_objective(sp, f, gap, r.t_opt - h);
                CHECK(second / (h * h) >= -1e-8);
            }
        }
    }
}

TEST_CASE("degenerate scale (d = 0) is rejected") {
    ScaleParams sp;
    sp.L = 1.0;
    sp.d = 0.0;
    sp.xi = 0.0;
    sp.s2 = 1.0;
    CHECK_THROWS_AS(upper_tail_bound(sp, FunctionSpec::identity(), 3.0),
                    std::invalid_argument);
}

TEST_CASE("bound tends to 1 as q approaches xi from above") {
    const Spectrum s = new_spectrum({1, 1}, {0, 0});
    const FunctionSpec id = FunctionSpec::identity();
    const ScaleParams sp = scale_params(s, id);
    const TailBoundResult r = upper_tail_bound(sp, id, sp.xi + 1e-8);
    CHECK(r.bound > 0.999);
    CHECK(r.bound <= 1.0);
}

TEST_CASE("validity against a quick Monte Carlo estimate") {
    const Spectrum s = new_spectrum({1.0, 0.6, 0.2}, {0.5, 0.0, 1.0});
    const FunctionSpec id = FunctionSpec::identity();
    const std::vector<double> sample = sample_qf(s, id, 31, 200000);
    for (double q : {4.0, 7.0, 10.0}) {
        const OracleEstimate est = mc_tail_from_sample(sample, q, 31);
        const double bound = upper_tail_bound(s, id, q).bound;
        CHECK(bound >= est.p_hat - 3.0 * est.se);
    }
}
