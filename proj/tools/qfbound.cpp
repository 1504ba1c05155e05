// qfbound: tail bounds, oracles and diagnostics for Gaussian quadratic forms
// Q_f = sum_i f(eta_i) (Z_i + delta_i)^2.
//
// Exit codes: 0 ok; 2 input/parse error; 3 admissibility verification
// failure for tabulated f; 4 requested Q-Q level beyond oracle resolution.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qfb/bounds.hpp"
#include "qfb/coeffs.hpp"
#include "qfb/io.hpp"
#include "qfb/matrixops.hpp"
#include "qfb/oracle.hpp"
#include "qfb/rng.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;

struct CliError {
    int code;
    std::string message;
};

std::vector<double> parse_grid(const std::string& s) {
    // LO:HI:STEPS[:log]
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() != 3 && parts.size() != 4) {
        throw CliError{2, "grid must be LO:HI:STEPS or LO:HI:STEPS:log, got '" + s + "'"};
    }
    double lo = 0, hi = 0;
    long steps = 0;
    try {
        lo = std::stod(parts[0]);
        hi = std::stod(parts[1]);
        steps = std::stol(parts[2]);
    } catch (const std::exception&) {
        throw CliError{2, "bad grid '" + s + "'"};
    }
    bool logspace = false;
    if (parts.size() == 4) {
        if (parts[3] != "log" && parts[3] != "linear") {
            throw CliError{2, "grid spacing must be 'log' or 'linear'"};
        }
        logspace = parts[3] == "log";
    }
    if (steps < 1 || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw CliError{2, "bad grid '" + s + "'"};
    }
    if (logspace && (lo <= 0 || hi <= 0)) {
        throw CliError{2, "log grid needs positive endpoints"};
    }
    std::vector<double> g(static_cast<std::size_t>(steps));
    if (steps == 1) {
        g[0] = lo;
        return g;
    }
    for (long i = 0; i < steps; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(steps - 1);
        g[static_cast<std::size_t>(i)] =
            logspace ? lo * std::pow(hi / lo, u) : lo + (hi - lo) * u;
    }
    return g;
}

// Everything a command needs about its (input, f) pair.
struct Problem {
    qfb::FunctionSpec f = qfb::FunctionSpec::identity();
    qfb::ScaleParams sp;
    std::optional<qfb::LegacyParams> legacy;
    std::optional<qfb::Spectrum> spectrum;  // present for spectrum input or exact path
    json meta;
};

struct InputOptions {
    std::string spectrum_path;
    std::string matrix_path;
    std::string mu_path;
    bool exact_spectrum = false;
    std::string f_arg = "identity";
    double fprime0 = std::numeric_limits<double>::quiet_NaN();
    double tol = 1e-10;
    int verify_grid = 200;
};

void add_input_options(CLI::App* cmd, InputOptions& in, bool need_f = true) {
    auto* spectrum =
        cmd->add_option("--spectrum", in.spectrum_path, "spectrum file (CSV 'eta,delta' or JSON)");
    auto* matrix = cmd->add_option("--matrix", in.matrix_path,
                                   "symmetric matrix file (Matrix Market .mtx or dense CSV)");
    spectrum->excludes(matrix);
    matrix->excludes(spectrum);
    cmd->add_option("--mu", in.mu_path, "mean vector (one value per line; default 0)")
        ->needs(matrix);
    cmd->add_flag("--exact-spectrum", in.exact_spectrum,
                  "diagonalize the matrix instead of using the trace summary")
        ->needs(matrix);
    if (need_f) {
        cmd->add_option("--f", in.f_arg,
                        "function applied to the spectrum: identity | power:P | tabulated:PATH "
                        "(power:1 is the identity)");
        cmd->add_option("--fprime0", in.fprime0,
                        "f'(0) for tabulated f (omit for a finite-difference estimate, "
                        "which is flagged in the metadata)");
    }
    cmd->add_option("--tol", in.tol, "optimizer/spectral tolerance");
    cmd->add_option("--verify-grid", in.verify_grid,
                    "grid size for the tabulated-f admissibility check");
}

qfb::FunctionSpec parse_f(const InputOptions& in) {
    const std::string& s = in.f_arg;
    if (s == "identity") return qfb::FunctionSpec::identity();
    if (s.rfind("power:", 0) == 0) {
        int p = 0;
        try {
            p = std::stoi(s.substr(6));
        } catch (const std::exception&) {
            throw CliError{2, "bad --f '" + s + "'"};
        }
        if (p < 1) throw CliError{2, "--f power exponent must be >= 1"};
        return qfb::FunctionSpec::power(p);
    }
    if (s.rfind("tabulated:", 0) == 0) {
        const std::string path = s.substr(10);
        if (path.empty()) throw CliError{2, "--f tabulated needs a path"};
        return qfb::read_tabulated_f(path, in.fprime0);
    }
    throw CliError{2, "bad --f '" + s + "' (identity | power:P | tabulated:PATH)"};
}

// needs_sampling: oracle-style commands must have eigenvalues, so a matrix
// input is diagonalized for them regardless of --exact-spectrum.
Problem load_problem(const InputOptions& in, bool needs_sampling, bool needs_bound) {
    Problem prob;
    prob.f = parse_f(in);
    prob.meta["f"] = prob.f.name();
    if (prob.f.deriv0_estimated()) {
        std::cerr << "warning: f'(0) estimated by finite differences from the grid\n";
        prob.meta["fprime0_estimated"] = true;
    }

    if (!in.spectrum_path.empty()) {
        prob.spectrum = qfb::read_spectrum(in.spectrum_path);
        prob.sp = qfb::scale_params(*prob.spectrum, prob.f);
        if (prob.f.is_identity()) prob.legacy = qfb::legacy_params(*prob.spectrum);
        prob.meta["input"] = in.spectrum_path;
        prob.meta["input_kind"] = "spectrum";
        prob.meta["n"] = prob.spectrum->size();
    } else if (!in.matrix_path.empty()) {
        const qfb::SymMatrix m = qfb::read_matrix(in.matrix_path);
        std::vector<double> mu(m.dim(), 0.0);
        if (!in.mu_path.empty()) {
            mu = qfb::read_vector(in.mu_path);
            if (mu.size() != m.dim()) throw CliError{2, "--mu length != matrix dimension"};
        }
        prob.meta["input"] = in.matrix_path;
        prob.meta["n"] = m.dim();
        if (in.exact_spectrum || needs_sampling) {
            prob.spectrum = qfb::full_spectrum(m, mu);
        }
        if (in.exact_spectrum) {
            prob.sp = qfb::scale_params(*prob.spectrum, prob.f);
            if (prob.f.is_identity()) prob.legacy = qfb::legacy_params(*prob.spectrum);
            prob.meta["input_kind"] = "matrix-exact";
        } else {
            const qfb::MatrixSummary s = qfb::summarize(m, mu, in.tol);
            prob.sp = qfb::scale_params(s, prob.f);
            if (prob.f.is_identity()) prob.legacy = qfb::legacy_params(s);
            prob.meta["input_kind"] = "matrix-summary";
            prob.meta["spec_bound_tol"] = in.tol;
        }
    } else {
        throw CliError{2, "need --spectrum or --matrix"};
    }

    // Tabulated f goes through the admissibility grid before any bound is
    // trusted; passing marks the result grid-verified, it is not a proof.
    if (needs_bound && prob.f.kind() == qfb::FunctionKind::tabulated) {
        const qfb::ConditionReport rep =
            qfb::verify_majorant_conditions(prob.f, prob.sp.L, in.verify_grid);
        if (!rep.pass) {
            throw CliError{3, "tabulated f failed the admissibility grid check: " + rep.detail};
        }
        prob.meta["grid_verified"] = true;
        prob.meta["verify_grid"] = in.verify_grid;
    }

    prob.meta["L"] = prob.sp.L;
    prob.meta["d"] = prob.sp.d;
    prob.meta["xi"] = prob.sp.xi;
    prob.meta["t_star"] = qfb::t_star(prob.f, prob.sp.L);
    if (prob.spectrum) {
        const qfb::Moments mom = qfb::moments(*prob.spectrum, prob.f);
        prob.meta["mean"] = mom.mean;
        prob.meta["variance"] = mom.variance;
    }
    if (prob.legacy) {
        prob.meta["nu"] = prob.legacy->nu;
        prob.meta["b"] = prob.legacy->b;
        prob.meta["legacy_mean"] = prob.legacy->mean;
    }
    return prob;
}

// CSV + metadata sidecar emission. Stdout is used when no --out is given
// (and no sidecar is written).
struct Output {
    std::string out_path;
    std::ostringstream csv;
    json meta;

    void finish() {
        if (out_path.empty()) {
            std::cout << csv.str();
            return;
        }
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw CliError{2, "cannot write '" + out_path + "'"};
        f << csv.str();
        f.close();
        std::ofstream m(out_path + ".meta.json");
        if (!m) throw CliError{2, "cannot write '" + out_path + ".meta.json'"};
        m << meta.dump(2) << '\n';
    }
};

std::string g17(double x) { return qfb::format_g17(x); }

double log10_of(double log_e) { return log_e / 2.302585092994045684; }

json base_meta(const std::string& command, const Problem& prob) {
    json meta = prob.meta;
    meta["command"] = command;
    meta["version"] = kVersion;
    meta["generator"] = qfb::kGeneratorName;
    return meta;
}

int threads_flag = 0;

void apply_threads() {
#ifdef _OPENMP
    if (threads_flag > 0) omp_set_num_threads(threads_flag);
#endif
}

std::vector<double> q_values(double q_single, const std::string& q_grid, bool have_q) {
    if (have_q && !q_grid.empty()) throw CliError{2, "give exactly one of --q / --q-grid"};
    if (have_q) return {q_single};
    if (!q_grid.empty()) return parse_grid(q_grid);
    throw CliError{2, "give exactly one of --q / --q-grid"};
}

// ---------------------------------------------------------------------------

int run_bound(const InputOptions& in, bool have_q, double q_single, const std::string& q_grid,
              const std::string& tail_arg, const std::string& out_path) {
    apply_threads();
    const Problem prob = load_problem(in, /*needs_sampling=*/false, /*needs_bound=*/true);
    const std::vector<double> qs = q_values(q_single, q_grid, have_q);
    const qfb::Tail tail = tail_arg == "lower" ? qfb::Tail::lower : qfb::Tail::upper;

    Output out;
    out.out_path = out_path;
    out.meta = base_meta("bound", prob);
    out.meta["tail"] = tail_arg;
    out.meta["tol"] = in.tol;
    out.csv << "q,bound_new,log10_bound_new,t_opt,regime\n";
    for (double q : qs) {
        const qfb::TailBoundResult r =
            tail == qfb::Tail::upper ? qfb::upper_tail_bound(prob.sp, prob.f, q, in.tol)
                                     : qfb::lower_tail_bound(prob.sp, prob.f, q, in.tol);
        out.csv << g17(q) << ',' << g17(r.bound) << ',' << g17(log10_of(r.log_bound)) << ','
                << g17(r.t_opt) << ',' << qfb::to_string(r.regime) << '\n';
    }
    out.finish();
    std::cerr << "bound: " << qs.size() << " row(s), f = " << prob.f.name()
              << ", xi = " << prob.sp.xi << ", L = " << prob.sp.L << "\n";
    return 0;
}

int run_legacy(const InputOptions& in, bool have_q, double q_single, const std::string& q_grid,
               const std::string& tail_arg, const std::string& out_path) {
    apply_threads();
    const Problem prob = load_problem(in, false, false);
    if (!prob.legacy) throw CliError{2, "the legacy bound is defined for identity f only"};
    const std::vector<double> qs = q_values(q_single, q_grid, have_q);
    const qfb::Tail tail = tail_arg == "lower" ? qfb::Tail::lower : qfb::Tail::upper;

    Output out;
    out.out_path = out_path;
    out.meta = base_meta("legacy", prob);
    out.meta["tail"] = tail_arg;
    out.csv << "q,bound_legacy,log10_bound_legacy,regime\n";
    for (double q : qs) {
        const qfb::TailBoundResult r = qfb::legacy_bound(*prob.legacy, q, tail);
        out.csv << g17(q) << ',' << g17(r.bound) << ',' << g17(log10_of(r.log_bound)) << ','
                << qfb::to_string(r.regime) << '\n';
    }
    out.finish();
    std::cerr << "legacy: " << qs.size() << " row(s), nu = " << prob.legacy->nu
              << ", b = " << prob.legacy->b << ", mean = " << prob.legacy->mean << "\n";
    return 0;
}

int run_compare(const InputOptions& in, bool have_q, double q_single, const std::string& q_grid,
                const std::string& out_path) {
    apply_threads();
    const Problem prob = load_problem(in, false, true);
    const std::vector<double> qs = q_values(q_single, q_grid, have_q);

    Output out;
    out.out_path = out_path;
    out.meta = base_meta("compare", prob);
    out.meta["tol"] = in.tol;
    const bool with_legacy = prob.legacy.has_value();
    if (with_legacy) {
        out.csv << "q,bound_new,t_opt,bound_legacy,ratio,log10_bound_new,log10_bound_legacy\n";
    } else {
        out.csv << "q,bound_new,t_opt,log10_bound_new\n";
    }
    for (double q : qs) {
        const qfb::TailBoundResult nb = qfb::upper_tail_bound(prob.sp, prob.f, q, in.tol);
        if (with_legacy) {
            const qfb::TailBoundResult lb = qfb::legacy_bound(*prob.legacy, q, qfb::Tail::upper);
            out.csv << g17(q) << ',' << g17(nb.bound) << ',' << g17(nb.t_opt) << ','
                    << g17(lb.bound) << ',' << g17(nb.bound / lb.bound) << ','
                    << g17(log10_of(nb.log_bound)) << ',' << g17(log10_of(lb.log_bound)) << '\n';
        } else {
            out.csv << g17(q) << ',' << g17(nb.bound) << ',' << g17(nb.t_opt) << ','
                    << g17(log10_of(nb.log_bound)) << '\n';
        }
    }
    out.finish();
    std::cerr << "compare: " << qs.size() << " row(s)"
              << (with_legacy ? "" : " (no legacy column for non-identity f)") << "\n";
    return 0;
}

int run_oracle(const InputOptions& in, bool have_q, double q_single, const std::string& q_grid,
               const std::string& tail_arg, std::int64_t samples, std::uint64_t seed,
               const std::string& tilt_arg, const std::string& out_path) {
    apply_threads();
    const Problem prob = load_problem(in, /*needs_sampling=*/true, /*needs_bound=*/false);
    const std::vector<double> qs = q_values(q_single, q_grid, have_q);
    const bool lower = tail_arg == "lower";
    if (lower && tilt_arg != "off") {
        throw CliError{2, "--tilt applies to the upper tail only"};
    }

    Output out;
    out.out_path = out_path;
    out.meta = base_meta("oracle", prob);
    out.meta["samples"] = samples;
    out.meta["seed"] = seed;
    out.meta["tail"] = tail_arg;
    out.meta["tilt"] = tilt_arg;
    out.csv << "q,oracle_p,oracle_ci_lo,oracle_ci_hi,method\n";

    if (tilt_arg == "off") {
        // One shared sample serves the whole grid.
        const std::vector<double> sample = qfb::sample_qf(*prob.spectrum, prob.f, seed, samples);
        for (double q : qs) {
            const qfb::OracleEstimate est = lower
                                                ? qfb::mc_lower_tail_from_sample(sample, q, seed)
                                                : qfb::mc_tail_from_sample(sample, q, seed);
            out.csv << g17(q) << ',' << g17(est.p_hat) << ',' << g17(est.ci_lo) << ','
                    << g17(est.ci_hi) << ',' << qfb::to_string(est.method) << '\n';
        }
    } else {
        double t_tilt = -1.0;  // auto
        if (tilt_arg != "auto") {
            try {
                t_tilt = std::stod(tilt_arg);
            } catch (const std::exception&) {
                throw CliError{2, "--tilt must be off | auto | a tilt value"};
            }
            if (t_tilt < 0.0) throw CliError{2, "--tilt value must be >= 0"};
        }
        for (double q : qs) {
            const qfb::OracleEstimate est =
                qfb::tilted_tail(*prob.spectrum, prob.f, q, samples, seed, t_tilt);
            if (est.low_quality) {
                std::cerr << "warning: tilted estimate at q = " << q
                          << " has effective sample size " << est.ess << " (< 50)\n";
            }
            out.csv << g17(q) << ',' << g17(est.p_hat) << ',' << g17(est.ci_lo) << ','
                    << g17(est.ci_hi) << ',' << qfb::to_string(est.method) << '\n';
        }
    }
    out.finish();
    std::cerr << "oracle: " << qs.size() << " row(s) at " << samples << " samples\n";
    return 0;
}

int run_qq(const InputOptions& in, const std::string& z_grid_arg, std::int64_t samples,
           std::uint64_t seed, const std::string& bound_arg, const std::string& out_path) {
    apply_threads();
    const bool use_legacy = bound_arg == "legacy";
    const Problem prob = load_problem(in, /*needs_sampling=*/true, /*needs_bound=*/!use_legacy);
    if (use_legacy && !prob.legacy) {
        throw CliError{2, "--bound legacy requires identity f"};
    }
    const std::vector<double> zs = parse_grid(z_grid_arg);

    const auto tail_bound = [&](double q) {
        if (use_legacy) return qfb::legacy_bound(*prob.legacy, q, qfb::Tail::upper).bound;
        return qfb::upper_tail_bound(prob.sp, prob.f, q, in.tol).bound;
    };
    const std::vector<qfb::QqRow> rows =
        qfb::qq_data(*prob.spectrum, prob.f, tail_bound, zs, samples, seed);

    // Refuse under-resolved levels outright instead of emitting noise.
    for (const auto& row : rows) {
        if (!row.ok) {
            throw CliError{4, "z = " + std::to_string(row.z) +
                                  " is beyond the oracle resolution at " +
                                  std::to_string(samples) +
                                  " samples (need 10^-z >= 10/n); raise --samples"};
        }
    }

    Output out;
    out.out_path = out_path;
    out.meta = base_meta("qq", prob);
    out.meta["samples"] = samples;
    out.meta["seed"] = seed;
    out.meta["bound"] = bound_arg;
    out.csv << "z,q_hat,omega,gap\n";
    for (const auto& row : rows) {
        out.csv << g17(row.z) << ',' << g17(row.q_hat) << ',' << g17(row.omega) << ','
                << g17(row.gap) << '\n';
    }
    out.finish();
    std::cerr << "qq: " << rows.size() << " row(s)\n";
    return 0;
}

int run_matrix_info(const InputOptions& in, const std::string& out_path) {
    apply_threads();
    if (in.matrix_path.empty()) throw CliError{2, "matrix-info needs --matrix"};
    const qfb::SymMatrix m = qfb::read_matrix(in.matrix_path);
    std::vector<double> mu(m.dim(), 0.0);
    if (!in.mu_path.empty()) {
        mu = qfb::read_vector(in.mu_path);
        if (mu.size() != m.dim()) throw CliError{2, "--mu length != matrix dimension"};
    }
    const qfb::MatrixSummary s = qfb::summarize(m, mu, in.tol);

    Output out;
    out.out_path = out_path;
    out.meta["command"] = "matrix-info";
    out.meta["version"] = kVersion;
    out.meta["input"] = in.matrix_path;
    out.meta["n"] = m.dim();
    out.meta["spec_bound_tol"] = in.tol;
    out.meta["generator"] = qfb::kGeneratorName;
    if (in.exact_spectrum) {
        const qfb::Spectrum spec = qfb::full_spectrum(m, mu);
        out.csv << "n,trace,mu_quad,mmu_norm2,hs_norm2,spec_bound,"
                   "sum_eta,sum_eta_sq,sum_eta_delta_sq,sum_eta_sq_delta_sq,max_abs_eta\n";
        out.csv << m.dim() << ',' << g17(s.trace) << ',' << g17(s.mu_quad) << ','
                << g17(s.mmu_norm2) << ',' << g17(s.hs_norm2) << ',' << g17(s.spec_bound) << ','
                << g17(spec.sum_eta()) << ',' << g17(spec.sum_eta_sq()) << ','
                << g17(spec.sum_eta_delta_sq()) << ',' << g17(spec.sum_eta_sq_delta_sq()) << ','
                << g17(spec.max_abs_eta()) << '\n';
    } else {
        out.csv << "n,trace,mu_quad,mmu_norm2,hs_norm2,spec_bound\n";
        out.csv << m.dim() << ',' << g17(s.trace) << ',' << g17(s.mu_quad) << ','
                << g17(s.mmu_norm2) << ',' << g17(s.hs_norm2) << ',' << g17(s.spec_bound) << '\n';
    }
    out.finish();
    std::cerr << "matrix-info: n = " << m.dim() << ", spec_bound = " << s.spec_bound << "\n";
    return 0;
}

int run_generate(const std::string& kind, long n, double rate, double delta,
                 const std::string& out_path) {
    if (kind != "expdecay") throw CliError{2, "unknown generator kind '" + kind + "'"};
    if (n < 1) throw CliError{2, "--n must be >= 1"};
    if (!(rate > 0.0)) throw CliError{2, "--rate must be > 0"};
    std::vector<double> etas(static_cast<std::size_t>(n));
    std::vector<double> deltas(static_cast<std::size_t>(n), delta);
    for (long i = 1; i <= n; ++i) {
        etas[static_cast<std::size_t>(i - 1)] = std::exp(-rate * static_cast<double>(i));
    }
    const qfb::Spectrum spec(std::move(etas), std::move(deltas));
    qfb::write_spectrum_csv(out_path, spec);

    json meta;
    meta["command"] = "generate";
    meta["version"] = kVersion;
    meta["kind"] = kind;
    meta["n"] = n;
    meta["rate"] = rate;
    meta["delta"] = delta;
    std::ofstream m(out_path + ".meta.json");
    if (!m) throw CliError{2, "cannot write '" + out_path + ".meta.json'"};
    m << meta.dump(2) << '\n';
    std::cerr << "generate: wrote " << n << " pairs to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tail bounds for Gaussian quadratic forms Q_f = sum f(eta_i)(Z_i+delta_i)^2"};
    app.require_subcommand(1);
    app.add_option("--threads", threads_flag, "cap OpenMP worker count (results are identical)");

    InputOptions in_bound, in_legacy, in_compare, in_oracle, in_qq, in_minfo;
    double q_bound = 0, q_legacy = 0, q_compare = 0, q_oracle = 0;
    std::string qg_bound, qg_legacy, qg_compare, qg_oracle;
    std::string tail_bound = "upper", tail_legacy = "upper", tail_oracle = "upper";
    std::string out_bound, out_legacy, out_compare, out_oracle, out_qq, out_minfo, out_gen;
    std::int64_t samples_oracle = 1000000, samples_qq = 1000000;
    std::uint64_t seed_oracle = 42, seed_qq = 42;
    std::string tilt_oracle = "off";
    std::string zgrid_qq;
    std::string qq_bound_kind = "optimized";
    std::string gen_kind = "expdecay";
    long gen_n = 200;
    double gen_rate = 0.1, gen_delta = 0.0;
    std::uint64_t gen_seed = 42;

    auto* c_bound = app.add_subcommand("bound", "optimized Chernoff tail bound");
    add_input_options(c_bound, in_bound);
    auto* qopt = c_bound->add_option("--q", q_bound, "query point");
    c_bound->add_option("--q-grid", qg_bound, "LO:HI:STEPS[:log]")->excludes(qopt);
    c_bound->add_option("--tail", tail_bound, "upper | lower")
        ->check(CLI::IsMember({"upper", "lower"}));
    c_bound->add_option("--out", out_bound, "output CSV (+ .meta.json sidecar)");

    auto* c_legacy = app.add_subcommand("legacy", "legacy sub-gamma tail bound (identity f)");
    add_input_options(c_legacy, in_legacy, /*need_f=*/false);
    auto* qopt_l = c_legacy->add_option("--q", q_legacy, "query point");
    c_legacy->add_option("--q-grid", qg_legacy, "LO:HI:STEPS[:log]")->excludes(qopt_l);
    c_legacy->add_option("--tail", tail_legacy, "upper | lower")
        ->check(CLI::IsMember({"upper", "lower"}));
    c_legacy->add_option("--out", out_legacy, "output CSV (+ .meta.json sidecar)");

    auto* c_compare = app.add_subcommand("compare", "optimized vs legacy bound over a q grid");
    add_input_options(c_compare, in_compare);
    auto* qopt_c = c_compare->add_option("--q", q_compare, "query point");
    c_compare->add_option("--q-grid", qg_compare, "LO:HI:STEPS[:log]")->excludes(qopt_c);
    c_compare->add_option("--out", out_compare, "output CSV (+ .meta.json sidecar)");

    auto* c_oracle = app.add_subcommand("oracle", "Monte Carlo / tilted tail estimates");
    add_input_options(c_oracle, in_oracle);
    auto* qopt_o = c_oracle->add_option("--q", q_oracle, "query point");
    c_oracle->add_option("--q-grid", qg_oracle, "LO:HI:STEPS[:log]")->excludes(qopt_o);
    c_oracle->add_option("--tail", tail_oracle, "upper | lower")
        ->check(CLI::IsMember({"upper", "lower"}));
    c_oracle->add_option("--samples", samples_oracle, "Monte Carlo draws");
    c_oracle->add_option("--seed", seed_oracle, "generator seed");
    c_oracle->add_option("--tilt", tilt_oracle, "off | auto | tilt value (upper tail only)");
    c_oracle->add_option("--out", out_oracle, "output CSV (+ .meta.json sidecar)");

    auto* c_qq = app.add_subcommand("qq", "modified Q-Q data: z - omega(z) per level z");
    add_input_options(c_qq, in_qq);
    c_qq->add_option("--z-grid", zgrid_qq, "LO:HI:STEPS of -log10 tail levels")->required();
    c_qq->add_option("--samples", samples_qq, "Monte Carlo draws");
    c_qq->add_option("--seed", seed_qq, "generator seed");
    c_qq->add_option("--bound", qq_bound_kind, "optimized | legacy")
        ->check(CLI::IsMember({"optimized", "legacy"}));
    c_qq->add_option("--out", out_qq, "output CSV (+ .meta.json sidecar)");

    auto* c_minfo = app.add_subcommand("matrix-info", "traces, norms and spectral bound");
    add_input_options(c_minfo, in_minfo, /*need_f=*/false);
    c_minfo->add_option("--out", out_minfo, "output CSV (+ .meta.json sidecar)");

    auto* c_gen = app.add_subcommand("generate", "write a synthetic spectrum file");
    c_gen->add_option("--kind", gen_kind, "expdecay: eta_i = exp(-rate*i), i = 1..n");
    c_gen->add_option("--n", gen_n, "number of pairs");
    c_gen->add_option("--rate", gen_rate, "decay rate (> 0)");
    c_gen->add_option("--delta", gen_delta, "constant noncentrality (default 0)");
    c_gen->add_option("--seed", gen_seed, "reserved for randomized kinds");
    c_gen->add_option("--out", out_gen, "output spectrum CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return 2;
    }

    try {
        if (c_bound->parsed()) {
            return run_bound(in_bound, qopt->count() > 0, q_bound, qg_bound, tail_bound,
                             out_bound);
        }
        if (c_legacy->parsed()) {
            return run_legacy(in_legacy, qopt_l->count() > 0, q_legacy, qg_legacy, tail_legacy,
                              out_legacy);
        }
        if (c_compare->parsed()) {
            return run_compare(in_compare, qopt_c->count() > 0, q_compare, qg_compare,
                               out_compare);
        }
        if (c_oracle->parsed()) {
            return run_oracle(in_oracle, qopt_o->count() > 0, q_oracle, qg_oracle, tail_oracle,
                              samples_oracle, seed_oracle, tilt_oracle, out_oracle);
        }
        if (c_qq->parsed()) {
            return run_qq(in_qq, zgrid_qq, samples_qq, seed_qq, qq_bound_kind, out_qq);
        }
        if (c_minfo->parsed()) {
            return run_matrix_info(in_minfo, out_minfo);
        }
        if (c_gen->parsed()) {
            return run_generate(gen_kind, gen_n, gen_rate, gen_delta, out_gen);
        }
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const qfb::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
