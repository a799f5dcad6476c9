#include "resim/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace resim {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
    fail(Errc::parse_error, source + ":" + std::to_string(line) + ": " + what);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_error, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_error, "cannot write " + path);
    out << text;
}

struct Header {
    std::string format;
    std::string field;
    std::string symmetry;
};

class LineReader {
public:
    LineReader(const std::string& text, std::string source) : in_(text), source_(std::move(source)) {}

    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++number_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (number_ == 1) return true;
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '%') continue;
            return true;
        }
        return false;
    }

    std::size_t line() const noexcept { return number_; }
    const std::string& source() const noexcept { return source_; }

private:
    std::istringstream in_;
    std::string source_;
    std::size_t number_ = 0;
};

Header read_header(LineReader& r, const char* expected_object) {
    std::string line;
    if (!r.next(line)) parse_fail(r.source(), 1, "empty file");
    std::istringstream h(line);
    std::string banner, object;
    Header out;
    h >> banner >> object >> out.format >> out.field >> out.symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != expected_object) {
        parse_fail(r.source(), 1, "missing '%%MatrixMarket " + std::string(expected_object) + "' banner");
    }
    out.format = lower(out.format);
    out.field = lower(out.field);
    out.symmetry = lower(out.symmetry);
    return out;
}

template <class T>
T number(const std::string& tok, LineReader& r) {
    T v{};
    const char* b = tok.data();
    const char* e = b + tok.size();
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) parse_fail(r.source(), r.line(), "bad number '" + tok + "'");
    return v;
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> t;
    std::string s;
    while (in >> s) t.push_back(s);
    return t;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

CsrMatrix mm_parse(const std::string& text, const std::string& source) {
    LineReader r(text, source);
    const auto h = read_header(r, "matrix");
    if (h.format != "coordinate") parse_fail(source, 1, "only coordinate matrices are supported");
    if (h.field != "real" && h.field != "integer" && h.field != "pattern" && h.field != "double") {
        parse_fail(source, 1, "unsupported field '" + h.field + "'");
    }
    if (h.symmetry != "general" && h.symmetry != "symmetric") {
        parse_fail(source, 1, "unsupported symmetry '" + h.symmetry + "'");
    }
    const bool pattern = h.field == "pattern";
    const bool symmetric = h.symmetry == "symmetric";

    std::string line;
    if (!r.next(line)) parse_fail(source, r.line() + 1, "missing size line");
    auto t = tokens(line);
    if (t.size() != 3) parse_fail(source, r.line(), "size line needs rows, cols, nonzeros");
    const auto rows = number<Index>(t[0], r);
    const auto cols = number<Index>(t[1], r);
    const auto nnz = number<Index>(t[2], r);
    if (rows < 0 || cols < 0 || nnz < 0) parse_fail(source, r.line(), "negative dimensions");

    std::vector<Triplet> entries;
    entries.reserve(symmetric ? 2 * nnz : nnz);
    for (Index k = 0; k < nnz; ++k) {
        if (!r.next(line)) parse_fail(source, r.line() + 1, "expected " + std::to_string(nnz) + " entries, got " + std::to_string(k));
        t = tokens(line);
        if (t.size() != (pattern ? 2u : 3u)) parse_fail(source, r.line(), "malformed entry");
        const auto i = number<Index>(t[0], r);
        const auto j = number<Index>(t[1], r);
        if (i < 1 || i > rows || j < 1 || j > cols) parse_fail(source, r.line(), "entry index out of range");
        const double v = pattern ? 1.0 : number<double>(t[2], r);
        entries.push_back({i - 1, j - 1, v});
        if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
    }
    if (r.next(line)) parse_fail(source, r.line(), "unexpected data after the last entry");
    return CsrMatrix::from_triplets(rows, cols, std::move(entries));
}

CsrMatrix mm_read(const std::string& path) { return mm_parse(slurp(path), path); }

std::vector<double> mm_parse_vector(const std::string& text, const std::string& source) {
    LineReader r(text, source);
    const auto h = read_header(r, "matrix");
    if (h.format != "array") parse_fail(source, 1, "vectors must use the array format");
    if (h.field != "real" && h.field != "integer" && h.field != "double") {
        parse_fail(source, 1, "unsupported field '" + h.field + "'");
    }
    std::string line;
    if (!r.next(line)) parse_fail(source, r.line() + 1, "missing size line");
    auto t = tokens(line);
    if (t.size() != 2) parse_fail(source, r.line(), "array size line needs rows and cols");
    const auto rows = number<Index>(t[0], r);
    const auto cols = number<Index>(t[1], r);
    if (cols != 1 || rows < 0) parse_fail(source, r.line(), "vector must have exactly one column");
    std::vector<double> v;
    v.reserve(rows);
    for (Index k = 0; k < rows; ++k) {
        if (!r.next(line)) parse_fail(source, r.line() + 1, "expected " + std::to_string(rows) + " values");
        t = tokens(line);
        if (t.size() != 1) parse_fail(source, r.line(), "expected one value per line");
        v.push_back(number<double>(t[0], r));
    }
    if (r.next(line)) parse_fail(source, r.line(), "unexpected data after the last value");
    return v;
}

std::vector<double> mm_read_vector(const std::string& path) { return mm_parse_vector(slurp(path), path); }

std::string mm_format(const CsrMatrix& a) {
    std::string out = "%%MatrixMarket matrix coordinate real general\n";
    out += std::to_string(a.nrows) + " " + std::to_string(a.ncols) + " " + std::to_string(a.nnz()) + "\n";
    for (Index i = 0; i < a.nrows; ++i) {
        for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            out += std::to_string(i + 1) + " " + std::to_string(a.col_idx[k] + 1) + " " + fmt(a.values[k]) + "\n";
        }
    }
    return out;
}

std::string mm_format(const std::vector<double>& v) {
    std::string out = "%%MatrixMarket matrix array real general\n";
    out += std::to_string(v.size()) + " 1\n";
    for (double x : v) out += fmt(x) + "\n";
    return out;
}

void mm_write(const std::string& path, const CsrMatrix& a) { spit(path, mm_format(a)); }
void mm_write(const std::string& path, const std::vector<double>& v) { spit(path, mm_format(v)); }

}  // namespace resim
