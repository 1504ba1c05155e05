#pragma once
// Bound inputs derived from a symmetric matrix M and mean vector mu without
// a full eigendecomposition: traces, norms, and a spectral bound on
// max |lambda_i|. A dense Jacobi eigensolver is kept as the exact path for
// cross-validation and for the simulation oracle.
//
// The trace identities behind the trace-only bound path:
//   sum eta^2         = ||M||_HS^2
//   sum eta^2 delta^2 = ||M mu||_2^2
//   sum eta delta^2   = mu^T M mu
//   sum eta           = tr M

#include <cstdint>
#include <vector>

#include "qfb/bounds.hpp"
#include "qfb/spectrum.hpp"

namespace qfb {

class SymMatrix {
  public:
    // Entries in row-major order; symmetry is enforced at ingestion:
    // |M_ij - M_ji| <= 1e-12 max |M|, then the two are averaged.
    SymMatrix(std::size_t n, std::vector<double> entries);

    std::size_t dim() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    const std::vector<double>& data() const { return a_; }

  private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

struct MatrixSummary {
    double trace = 0.0;
    double mu_quad = 0.0;    // mu^T M mu
    double mmu_norm2 = 0.0;  // ||M mu||_2^2
    double hs_norm2 = 0.0;   // ||M||_HS^2
    double spec_bound = 0.0; // (1 + tol)-inflated estimate of max |lambda|
};

// O(n^2) exact traces plus the power-iteration spectral bound. Row loops are
// OpenMP-parallel with a fixed-order reduction, so results are identical
// across thread counts.
MatrixSummary summarize(const SymMatrix& m, const std::vector<double>& mu,
                        double spec_tol = 1e-10, std::uint64_t seed = 1);
// Single-threaded reference implementation (same results bit for bit).
MatrixSummary summarize_serial(const SymMatrix& m, const std::vector<double>& mu,
                               double spec_tol = 1e-10, std::uint64_t seed = 1);

// Estimate of max_i |lambda_i| with relative error <= tol, inflated by
// (1 + tol) so it over-estimates: a larger L only loosens the bound, an
// under-estimate would invalidate it. Power iteration on M with a seeded
// random start; near-degenerate +/- lambda pairs fall back to iteration
// on M^2.
double spectral_bound(const SymMatrix& m, double tol, std::uint64_t seed = 1);

// Full eigendecomposition by cyclic Jacobi sweeps (off-diagonal norm
// <= 1e-12 ||M||_HS), paired with delta_i = (V^T mu)_i. Exact oracle path;
// dimension capped because it is O(n^3).
Spectrum full_spectrum(const SymMatrix& m, const std::vector<double>& mu,
                       std::size_t dim_cap = 2000);
// Eigenvalues only.
std::vector<double> jacobi_eigenvalues(const SymMatrix& m, std::size_t dim_cap = 2000);

// Trace-only bound inputs: L from spec_bound, d from the endpoint values of
// f, xi and the nu_f sums from the trace identities above.
ScaleParams scale_params(const MatrixSummary& s, const FunctionSpec& f);
LegacyParams legacy_params(const MatrixSummary& s);

}  // namespace qfb
