#include "qmatfun/matrix_io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace qmatfun {

namespace {

// Next line that is neither blank nor a '#' comment.  False at EOF.
bool next_data_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    std::size_t i = line.find_first_not_of(" \t\r");
    if (i == std::string::npos) continue;
    if (line[i] == '#') continue;
    return true;
  }
  return false;
}

double parse_double(const char* s, char** end, const std::string& line) {
  const double v = std::strtod(s, end);
  if (*end == s) {
    throw IoError("matrix parse: expected a number in line '" + line + "'");
  }
  return v;
}

}  // namespace

CMat read_matrix(std::istream& in) {
  std::string line;
  if (!next_data_line(in, line)) {
    throw IoError("matrix parse: missing header line");
  }
  char* end = nullptr;
  const char* s = line.c_str();
  const long rows = std::strtol(s, &end, 10);
  if (end == s) throw IoError("matrix parse: bad header '" + line + "'");
  s = end;
  const long cols = std::strtol(s, &end, 10);
  if (end == s) throw IoError("matrix parse: bad header '" + line + "'");
  if (rows < 1 || cols < 1 || rows > 4096 || cols > 4096) {
    throw IoError("matrix parse: unreasonable dimensions in '" + line + "'");
  }
  CMat m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (!next_data_line(in, line)) {
        throw IoError("matrix parse: truncated entry list");
      }
      const char* p = line.c_str();
      const double re = parse_double(p, &end, line);
      p = end;
      const double im = parse_double(p, &end, line);
      m(r, c) = Complex(re, im);
    }
  }
  return m;
}

CMat read_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open matrix file: " + path);
  return read_matrix(f);
}

void write_matrix(std::ostream& out, const CMat& m) {
  out << m.rows() << " " << m.cols() << "\n";
  for (long r = 0; r < m.rows(); ++r) {
    for (long c = 0; c < m.cols(); ++c) {
      out << format_g17(m(r, c).real()) << " " << format_g17(m(r, c).imag())
          << "\n";
    }
  }
}

void write_matrix_file(const std::string& path, const CMat& m) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open matrix file for write: " + path);
  write_matrix(f, m);
  if (!f) throw IoError("write failed for matrix file: " + path);
}

std::string matrix_to_string(const CMat& m) {
  std::ostringstream os;
  write_matrix(os, m);
  return os.str();
}

CMat matrix_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_matrix(is);
}

}  // namespace qmatfun
