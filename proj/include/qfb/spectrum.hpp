#pragma once
// Problem definition for the quadratic form Q_f = sum_i f(eta_i)(Z_i + delta_i)^2:
// the (eta, delta) pairs, the derived scale parameters the tail bounds need,
// and the exact first two moments of Q_f.
//
// Spectrum is immutable after construction and safe for unrestricted
// concurrent reads.

#include <vector>

#include "qfb/function_spec.hpp"

namespace qfb {

class Spectrum {
  public:
    // Validates lengths, finiteness and non-degeneracy, and caches the trace
    // sums (compensated) used by the bounds.
    Spectrum(std::vector<double> etas, std::vector<double> deltas);

    std::size_t size() const { return etas_.size(); }
    const std::vector<double>& etas() const { return etas_; }
    const std::vector<double>& deltas() const { return deltas_; }

    double sum_eta() const { return sum_eta_; }               // sum eta_i
    double sum_eta_sq() const { return sum_eta_sq_; }         // sum eta_i^2
    double sum_eta_delta_sq() const { return sum_eta_dsq_; }  // sum eta_i delta_i^2
    double sum_eta_sq_delta_sq() const { return sum_etasq_dsq_; }  // sum eta_i^2 delta_i^2
    double max_abs_eta() const { return max_abs_eta_; }

  private:
    std::vector<double> etas_;
    std::vector<double> deltas_;
    double sum_eta_ = 0.0;
    double sum_eta_sq_ = 0.0;
    double sum_eta_dsq_ = 0.0;
    double sum_etasq_dsq_ = 0.0;
    double max_abs_eta_ = 0.0;
};

// Scale parameters of the bound for a given (spectrum, f):
//   L  = max_i |eta_i|
//   d  = max_i |f(eta_i)|
//   xi = c (sum eta_i delta_i^2 + sum eta_i), c = f'(0)
struct ScaleParams {
    double L = 0.0;
    double d = 0.0;
    double xi = 0.0;
    double s2 = 0.0;   // sum eta_i^2
    double s2d = 0.0;  // sum eta_i^2 delta_i^2
    double c = 0.0;    // f'(0)
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

Spectrum new_spectrum(std::vector<double> etas, std::vector<double> deltas);

// f must be evaluable on [-L, L].
ScaleParams scale_params(const Spectrum& spec, const FunctionSpec& f);

// mean = sum f(eta) delta^2 + sum f(eta)
// variance = 2 sum f(eta)^2 + 4 sum f(eta)^2 delta^2,
// i.e. sum_i f(eta_i)^2 Var((Z + delta_i)^2) with Var((Z+d)^2) = 2 + 4d^2.
Moments moments(const Spectrum& spec, const FunctionSpec& f);

}  // namespace qfb
