#include "qfb/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qfb/summation.hpp"

namespace qfb {

Spectrum::Spectrum(std::vector<double> etas, std::vector<double> deltas)
    : etas_(std::move(etas)), deltas_(std::move(deltas)) {
    if (etas_.empty()) {
        throw std::invalid_argument("spectrum: need at least one (eta, delta) pair");
    }
    if (etas_.size() != deltas_.size()) {
        throw std::invalid_argument("spectrum: eta and delta lengths differ");
    }
    bool any_nonzero = false;
    CompensatedSum se, se2, sed2, se2d2;
    for (std::size_t i = 0; i < etas_.size(); ++i) {
        const double e = etas_[i];
        const double d = deltas_[i];
        if (!std::isfinite(e) || !std::isfinite(d)) {
            throw std::invalid_argument("spectrum: non-finite entry");
        }
        any_nonzero = any_nonzero || e != 0.0;
        se.add(e);
        se2.add(e * e);
        sed2.add(e * d * d);
        se2d2.add(e * e * d * d);
        max_abs_eta_ = std::max(max_abs_eta_, std::abs(e));
    }
    if (!any_nonzero) {
        throw std::invalid_argument("spectrum: all eta are zero (Q_f is degenerate at 0)");
    }
    sum_eta_ = se.value();
    sum_eta_sq_ = se2.value();
    sum_eta_dsq_ = sed2.value();
    sum_etasq_dsq_ = se2d2.value();
}

Spectrum new_spectrum(std::vector<double> etas, std::vector<double> deltas) {
    return Spectrum(std::move(etas), std::move(deltas));
}

ScaleParams scale_params(const Spectrum& spec, const FunctionSpec& f) {
    const double L = spec.max_abs_eta();
    if (!f.covers(-L, L)) {
        throw std::domain_error("scale_params: f is not defined on [-L, L]");
    }
    double d = 0.0;
    for (double e : spec.etas()) {
        d = std::max(d, std::abs(f(e)));
    }
    const double c = f.deriv0();
    ScaleParams sp;
    sp.L = L;
    sp.d = d;
    sp.c = c;
    sp.xi = c * (spec.sum_eta_delta_sq() + spec.sum_eta());
    sp.s2 = spec.sum_eta_sq();
    sp.s2d = spec.sum_eta_sq_delta_sq();
    return sp;
}

Moments moments(const Spectrum& spec, const FunctionSpec& f) {
    CompensatedSum mean, var;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        const double fe = f(spec.etas()[i]);
        const double d2 = spec.deltas()[i] * spec.deltas()[i];
        mean.add(fe * d2 + fe);
        var.add(fe * fe * (2.0 + 4.0 * d2));
    }
    return Moments{mean.value(), var.value()};
}

}  // namespace qfb
