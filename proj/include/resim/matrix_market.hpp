#pragma once

#include <string>
#include <vector>

#include "resim/csr.hpp"

namespace resim {

/// Reads a coordinate-format Matrix Market file (real, integer or pattern;
/// general or symmetric). Errors carry the offending line number.
CsrMatrix mm_read(const std::string& path);
CsrMatrix mm_parse(const std::string& text, const std::string& source = "<string>");

/// Reads a dense array-format vector (one column).
std::vector<double> mm_read_vector(const std::string& path);
std::vector<double> mm_parse_vector(const std::string& text, const std::string& source = "<string>");

/// Writes "coordinate real general" with full precision.
void mm_write(const std::string& path, const CsrMatrix& a);
std::string mm_format(const CsrMatrix& a);
/// Writes "array real general" with one column.
void mm_write(const std::string& path, const std::vector<double>& v);
std::string mm_format(const std::vector<double>& v);

}  // namespace resim
