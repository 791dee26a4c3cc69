#ifndef SPOC_IO_HPP
#define SPOC_IO_HPP

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "spoc/errors.hpp"
#include "spoc/linalg.hpp"

namespace spoc::io {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline double parse_number(const std::string& tok, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument(where + ": cannot parse '" + tok + "' as a number");
    }
}

inline std::string cell(Index row, Index col) {
    return "row " + std::to_string(row + 1) + ", col " + std::to_string(col + 1);
}

inline void check_count(double v, Index row, Index col, const std::string& path) {
    if (!std::isfinite(v) || v < 0.0)
        throw InvalidArgument(path + ": negative or non-finite count at " + cell(row, col));
    if (v != std::floor(v)) throw InvalidArgument(path + ": fractional count at " + cell(row, col));
}

inline std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    return in;
}

} // namespace detail

/// Reads `%%MatrixMarket matrix coordinate integer general` (1-based indices).
/// Duplicate entries are summed.
inline DenseMatrix read_matrix_market(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument(name + ": empty file");
    std::istringstream banner(detail::lower(line));
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%matrixmarket" || object != "matrix" || format != "coordinate")
        throw InvalidArgument(name + ": expected a MatrixMarket coordinate header");
    if (field != "integer" && field != "real")
        throw InvalidArgument(name + ": unsupported MatrixMarket field '" + field + "'");
    if (symmetry != "general") throw InvalidArgument(name + ": only general MatrixMarket matrices are supported");

    do {
        if (!std::getline(in, line)) throw InvalidArgument(name + ": missing size line");
        line = detail::trim(line);
    } while (line.empty() || line[0] == '%');
    long long rows = 0, cols = 0, entries = 0;
    {
        std::istringstream sz(line);
        if (!(sz >> rows >> cols >> entries) || rows <= 0 || cols <= 0 || entries < 0)
            throw InvalidArgument(name + ": malformed size line '" + line + "'");
    }
    DenseMatrix m = DenseMatrix::Zero(rows, cols);
    long long seen = 0;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        std::string si, sj, sv;
        if (!(ls >> si >> sj >> sv)) throw InvalidArgument(name + ": malformed entry '" + line + "'");
        const double fi = detail::parse_number(si, name);
        const double fj = detail::parse_number(sj, name);
        if (fi < 1 || fi > static_cast<double>(rows) || fj < 1 || fj > static_cast<double>(cols) ||
            fi != std::floor(fi) || fj != std::floor(fj))
            throw InvalidArgument(name + ": index out of range in '" + line + "'");
        const auto i = static_cast<Index>(fi) - 1;
        const auto j = static_cast<Index>(fj) - 1;
        const double v = detail::parse_number(sv, name);
        detail::check_count(v, i, j, name);
        m(i, j) += v;
        ++seen;
    }
    if (seen != entries)
        throw InvalidArgument(name + ": header announces " + std::to_string(entries) + " entries, found " +
                              std::to_string(seen));
    return m;
}

/// Dense comma-separated matrix, one row per line. Blank lines and lines
/// starting with '#' are skipped.
inline DenseMatrix read_dense_csv(std::istream& in, const std::string& name = "<stream>") {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ','))
            row.push_back(detail::parse_number(detail::trim(tok),
                                               name + " " + detail::cell(static_cast<Index>(rows.size()),
                                                                         static_cast<Index>(row.size()))));
        if (!rows.empty() && row.size() != rows.front().size())
            throw InvalidArgument(name + ": row " + std::to_string(rows.size() + 1) + " has " +
                                  std::to_string(row.size()) + " columns, expected " +
                                  std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidArgument(name + ": no data");
    DenseMatrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Document-term count matrix from MatrixMarket (detected by its banner)
/// or dense CSV. Counts must be nonnegative integers.
inline DenseMatrix read_count_matrix(const std::string& path) {
    std::ifstream in = detail::open(path);
    const int first = in.peek();
    if (first == '%') return read_matrix_market(in, path);
    DenseMatrix m = read_dense_csv(in, path);
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) detail::check_count(m(i, j), i, j, path);
    return m;
}

inline DenseMatrix read_dense_csv(const std::string& path) {
    std::ifstream in = detail::open(path);
    return read_dense_csv(in, path);
}

/// One token per line; blank lines are kept as empty tokens so line
/// numbers match column indices.
inline std::vector<std::string> read_vocab(const std::string& path) {
    std::ifstream in = detail::open(path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) out.push_back(detail::trim(line));
    while (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

inline void write_matrix_market(std::ostream& out, const DenseMatrix& counts) {
    Index nnz = 0;
    for (Index i = 0; i < counts.rows(); ++i)
        for (Index j = 0; j < counts.cols(); ++j) nnz += counts(i, j) != 0.0;
    out << "%%MatrixMarket matrix coordinate integer general\n";
    out << counts.rows() << ' ' << counts.cols() << ' ' << nnz << '\n';
    for (Index i = 0; i < counts.rows(); ++i)
        for (Index j = 0; j < counts.cols(); ++j)
            if (counts(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << static_cast<long long>(counts(i, j)) << '\n';
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline void write_csv(std::ostream& out, const DenseMatrix& m) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

/// Frequencies X (rows divided by their sums) from a count matrix, after
/// dropping documents shorter than `min_words`.
struct NormalizedCorpus {
    DenseMatrix x;
    std::vector<double> doc_lengths;
    std::vector<Index> kept;    ///< original row index of each row of x
    std::vector<Index> dropped; ///< rows removed for being too short

    /// Harmonic mean of the kept document lengths.
    [[nodiscard]] double effective_length() const {
        double inv = 0.0;
        for (double n : doc_lengths) inv += 1.0 / n;
        return static_cast<double>(doc_lengths.size()) / inv;
    }
};

/// With min_words == 0 an empty document is an error; otherwise documents
/// with fewer than min_words words are dropped.
inline NormalizedCorpus normalize_counts(const DenseMatrix& counts, double min_words = 0.0) {
    NormalizedCorpus out;
    const Vector lengths = counts.rowwise().sum();
    for (Index i = 0; i < counts.rows(); ++i) {
        if (min_words <= 0.0 && lengths(i) == 0.0)
            throw InvalidArgument("document " + std::to_string(i + 1) + " is empty");
        if (lengths(i) < min_words || lengths(i) == 0.0)
            out.dropped.push_back(i);
        else
            out.kept.push_back(i);
    }
    if (out.kept.empty()) throw InvalidArgument("no documents left after filtering");
    out.x.resize(static_cast<Index>(out.kept.size()), counts.cols());
    for (std::size_t r = 0; r < out.kept.size(); ++r) {
        const Index i = out.kept[r];
        out.x.row(static_cast<Index>(r)) = counts.row(i) / lengths(i);
        out.doc_lengths.push_back(lengths(i));
    }
    return out;
}

} // namespace spoc::io

#endif // SPOC_IO_HPP
