// Timings of the OpenMP kernels against their serial reference
// implementations. The parallel paths are required to be bit-identical to
// the serial ones; this target reports the speedup actually obtained.
//
//   ./bench_kernels [draws] [spectrum_size] [matrix_dim]

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qfb/matrixops.hpp"
#include "qfb/oracle.hpp"
#include "qfb/rng.hpp"
#include "qfb/spectrum.hpp"

namespace {

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <class F>
double time_once(F&& fn) {
    const double t0 = now_s();
    fn();
    return now_s() - t0;
}

}  // namespace

int main(int argc, char** argv) {
    const std::int64_t draws = argc > 1 ? std::atoll(argv[1]) : 500000;
    const std::size_t dim = argc > 2 ? static_cast<std::size_t>(std::atoll(argv[2])) : 50;
    const std::size_t mdim = argc > 3 ? static_cast<std::size_t>(std::atoll(argv[3])) : 1200;

#ifdef _OPENMP
    std::printf("OpenMP max threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled\n");
#endif

    std::vector<double> etas(dim), deltas(dim, 0.25);
    for (std::size_t i = 0; i < dim; ++i) {
        etas[i] = std::exp(-0.05 * static_cast<double>(i + 1));
    }
    const qfb::Spectrum spec(etas, deltas);
    const qfb::FunctionSpec f = qfb::FunctionSpec::identity();

    std::vector<double> serial_sample, parallel_sample;
    const double t_serial =
        time_once([&] { serial_sample = qfb::sample_qf_serial(spec, f, 7, draws); });
    const double t_parallel =
        time_once([&] { parallel_sample = qfb::sample_qf(spec, f, 7, draws); });
    const bool identical = serial_sample == parallel_sample;
    std::printf("sample_qf   n=%lld dim=%zu   serial %.3fs   parallel %.3fs   speedup %.2fx   %s\n",
                static_cast<long long>(draws), dim, t_serial, t_parallel,
                t_serial / t_parallel, identical ? "bit-identical" : "MISMATCH");

    std::vector<double> m(mdim * mdim, 0.0);
    for (std::size_t i = 0; i < mdim; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = qfb::uniform01(99, qfb::RngDomain::generic,
                                            static_cast<std::uint64_t>(i * mdim + j), 0) -
                             0.5;
            m[i * mdim + j] = v;
            m[j * mdim + i] = v;
        }
    }
    const qfb::SymMatrix sym(mdim, std::move(m));
    std::vector<double> mu(mdim, 0.5);

    qfb::MatrixSummary s_serial, s_parallel;
    const double ts = time_once([&] { s_serial = qfb::summarize_serial(sym, mu); });
    const double tp = time_once([&] { s_parallel = qfb::summarize(sym, mu); });
    const bool same = s_serial.trace == s_parallel.trace &&
                      s_serial.hs_norm2 == s_parallel.hs_norm2 &&
                      s_serial.mmu_norm2 == s_parallel.mmu_norm2 &&
                      s_serial.mu_quad == s_parallel.mu_quad &&
                      s_serial.spec_bound == s_parallel.spec_bound;
    std::printf("summarize   n=%zu           serial %.3fs   parallel %.3fs   speedup %.2fx   %s\n",
                mdim, ts, tp, ts / tp, same ? "bit-identical" : "MISMATCH");
    return 0;
}
