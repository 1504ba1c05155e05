#include "qfb/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qfb {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_number(const std::string& token, const std::string& where) {
    const std::string t = trim(token);
    if (t.empty()) throw ParseError(where + ": empty numeric field");
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &pos);
    } catch (const std::exception&) {
        throw ParseError(where + ": not a number: '" + t + "'");
    }
    if (pos != t.size()) throw ParseError(where + ": trailing garbage in '" + t + "'");
    if (!std::isfinite(v)) throw ParseError(where + ": non-finite value '" + t + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return in;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Two-column CSV with a mandatory header naming the columns.
void read_two_column_csv(const std::string& path, const std::string& col_a,
                         const std::string& col_b, std::vector<double>& a,
                         std::vector<double>& b) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    const auto header = split_csv(line);
    if (header.size() != 2 || lower(trim(header[0])) != col_a || lower(trim(header[1])) != col_b) {
        throw ParseError(path + ": expected header '" + col_a + "," + col_b + "'");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 2) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected 2 fields");
        }
        const std::string where = path + ":" + std::to_string(lineno);
        a.push_back(parse_number(fields[0], where));
        b.push_back(parse_number(fields[1], where));
    }
}

}  // namespace

Spectrum read_spectrum_csv(const std::string& path) {
    std::vector<double> etas, deltas;
    read_two_column_csv(path, "eta", "delta", etas, deltas);
    try {
        return Spectrum(std::move(etas), std::move(deltas));
    } catch (const std::invalid_argument& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Spectrum read_spectrum_json(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(path + ": invalid JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("eta") || !j["eta"].is_array()) {
        throw ParseError(path + ": expected an object with an 'eta' array");
    }
    std::vector<double> etas, deltas;
    for (const auto& v : j["eta"]) {
        if (!v.is_number()) throw ParseError(path + ": non-numeric eta entry");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ParseError(path + ": non-finite eta entry");
        etas.push_back(x);
    }
    if (j.contains("delta")) {
        if (!j["delta"].is_array()) throw ParseError(path + ": 'delta' must be an array");
        for (const auto& v : j["delta"]) {
            if (!v.is_number()) throw ParseError(path + ": non-numeric delta entry");
            const double x = v.get<double>();
            if (!std::isfinite(x)) throw ParseError(path + ": non-finite delta entry");
            deltas.push_back(x);
        }
    } else {
        deltas.assign(etas.size(), 0.0);
    }
    try {
        return Spectrum(std::move(etas), std::move(deltas));
    } catch (const std::invalid_argument& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Spectrum read_spectrum(const std::string& path) {
    if (ends_with(lower(path), ".json")) return read_spectrum_json(path);
    return read_spectrum_csv(path);
}

void write_spectrum_csv(const std::string& path, const Spectrum& spec) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "eta,delta\n";
    for (std::size_t i = 0; i < spec.size(); ++i) {
        out << format_g17(spec.etas()[i]) << ',' << format_g17(spec.deltas()[i]) << '\n';
    }
}

FunctionSpec read_tabulated_f(const std::string& path, double fprime0) {
    std::vector<double> xs, ys;
    read_two_column_csv(path, "x", "fx", xs, ys);
    try {
        if (std::isnan(fprime0)) return FunctionSpec::tabulated_fd(std::move(xs), std::move(ys));
        return FunctionSpec::tabulated(std::move(xs), std::move(ys), fprime0);
    } catch (const std::invalid_argument& e) {
        throw ParseError(path + ": " + e.what());
    }
}

SymMatrix read_matrix_market(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    std::istringstream banner(lower(line));
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%matrixmarket" || object != "matrix") {
        throw ParseError(path + ": missing MatrixMarket banner");
    }
    if (field != "real" && field != "integer") {
        throw ParseError(path + ": only real-valued matrices are supported");
    }
    const bool coordinate = format == "coordinate";
    const bool symmetric = symmetry == "symmetric";
    if (!coordinate && format != "array") {
        throw ParseError(path + ": format must be coordinate or array");
    }
    if (coordinate && !symmetric) {
        throw ParseError(path + ": coordinate input must declare 'symmetric'");
    }
    if (!symmetric && symmetry != "general") {
        throw ParseError(path + ": symmetry must be symmetric or general");
    }

    while (std::getline(in, line)) {
        if (!trim(line).empty() && trim(line)[0] != '%') break;
    }
    std::istringstream sz(line);
    std::size_t rows = 0, cols = 0, nnz = 0;
    if (coordinate) {
        if (!(sz >> rows >> cols >> nnz)) throw ParseError(path + ": bad size line");
    } else {
        if (!(sz >> rows >> cols)) throw ParseError(path + ": bad size line");
    }
    if (rows != cols || rows == 0) throw ParseError(path + ": matrix must be square");
    std::vector<double> a(rows * cols, 0.0);

    if (coordinate) {
        std::size_t seen = 0;
        while (seen < nnz) {
            if (!std::getline(in, line)) throw ParseError(path + ": truncated entries");
            if (trim(line).empty()) continue;
            std::istringstream es(line);
            std::size_t i = 0, j = 0;
            std::string tok;
            if (!(es >> i >> j >> tok)) throw ParseError(path + ": bad coordinate entry");
            if (i < 1 || j < 1 || i > rows || j > cols) {
                throw ParseError(path + ": coordinate out of range");
            }
            const double v = parse_number(tok, path);
            a[(i - 1) * cols + (j - 1)] = v;
            a[(j - 1) * cols + (i - 1)] = v;
            ++seen;
        }
    } else {
        // Array format is column-major; symmetric arrays store the lower triangle.
        std::vector<double> vals;
        std::string tok;
        while (in >> tok) vals.push_back(parse_number(tok, path));
        if (symmetric) {
            const std::size_t expect = rows * (rows + 1) / 2;
            if (vals.size() != expect) {
                throw ParseError(path + ": expected " + std::to_string(expect) + " entries");
            }
            std::size_t k = 0;
            for (std::size_t j = 0; j < cols; ++j) {
                for (std::size_t i = j; i < rows; ++i) {
                    a[i * cols + j] = vals[k];
                    a[j * cols + i] = vals[k];
                    ++k;
                }
            }
        } else {
            if (vals.size() != rows * cols) {
                throw ParseError(path + ": expected " + std::to_string(rows * cols) + " entries");
            }
            std::size_t k = 0;
            for (std::size_t j = 0; j < cols; ++j) {
                for (std::size_t i = 0; i < rows; ++i) {
                    a[i * cols + j] = vals[k++];
                }
            }
        }
    }
    try {
        return SymMatrix(rows, std::move(a));
    } catch (const std::invalid_argument& e) {
        throw ParseError(path + ": " + e.what());
    }
}

SymMatrix read_matrix_csv(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& fld : fields) {
            row.push_back(parse_number(fld, path + ":" + std::to_string(lineno)));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": ragged row");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": empty matrix");
    if (rows.size() != rows.front().size()) {
        throw ParseError(path + ": matrix must be square");
    }
    const std::size_t n = rows.size();
    std::vector<double> a(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] = rows[i][j];
    }
    try {
        return SymMatrix(n, std::move(a));
    } catch (const std::invalid_argument& e) {
        throw ParseError(path + ": " + e.what());
    }
}

SymMatrix read_matrix(const std::string& path) {
    if (ends_with(lower(path), ".mtx")) return read_matrix_market(path);
    return read_matrix_csv(path);
}

std::vector<double> read_vector(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        out.push_back(parse_number(line, path + ":" + std::to_string(lineno)));
    }
    if (out.empty()) throw ParseError(path + ": empty vector");
    return out;
}

std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace qfb
