#pragma once

// Plain-text matrix format.
//
//   # optional comment lines anywhere
//   rows cols
//   re im        (rows*cols lines, row-major)
//
// Writers emit 17 significant digits so write -> read -> write is
// byte-identical.

#include <iosfwd>
#include <string>

#include "qmatfun/common.hpp"

namespace qmatfun {

CMat read_matrix(std::istream& in);
CMat read_matrix_file(const std::string& path);

void write_matrix(std::ostream& out, const CMat& m);
void write_matrix_file(const std::string& path, const CMat& m);

std::string matrix_to_string(const CMat& m);
CMat matrix_from_string(const std::string& text);

}  // namespace qmatfun
