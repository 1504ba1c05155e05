#pragma once
// File ingestion and emission for the library's external formats:
//   spectrum      CSV with header "eta,delta", or JSON {"eta":[...],"delta":[...]}
//   tabulated f   CSV with header "x,fx"
//   matrix        Matrix Market (coordinate symmetric / array) or dense CSV
//   mean vector   one value per line
// All readers reject NaN/Inf tokens.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfb/matrixops.hpp"
#include "qfb/spectrum.hpp"

namespace qfb {

// Thrown for malformed or unreadable inputs (the CLI maps it to exit 2).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

Spectrum read_spectrum_csv(const std::string& path);
Spectrum read_spectrum_json(const std::string& path);
// Dispatch on extension: .json -> JSON, anything else -> CSV.
Spectrum read_spectrum(const std::string& path);

void write_spectrum_csv(const std::string& path, const Spectrum& spec);

// Tabulated f grid; fprime0 is required by the CLI (NaN selects the
// finite-difference fallback and flags the result).
FunctionSpec read_tabulated_f(const std::string& path, double fprime0);

SymMatrix read_matrix_market(const std::string& path);
SymMatrix read_matrix_csv(const std::string& path);
// Dispatch: .mtx -> Matrix Market, anything else -> dense CSV.
SymMatrix read_matrix(const std::string& path);

std::vector<double> read_vector(const std::string& path);

// Fixed-format serialization used for all emitted numbers: shortest form
// preserving 17 significant digits, so re-parsing is exact.
std::string format_g17(double x);

}  // namespace qfb
