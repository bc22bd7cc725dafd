#include "qcorr/cli/matrix_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "qcorr/error.hpp"

namespace qcorr::cli {

namespace {

using numkernel::Complex;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw ParseError("non-numeric token '" + tok + "'", line);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + tok + "'", line);
  return v;
}

std::size_t to_index(const std::string& tok, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("expected a non-negative integer, got '" + tok + "'", line);
  }
  return v;
}

struct Banner {
  bool coordinate = false;
  bool complex = false;
  std::string symmetry;
};

Banner parse_banner(const std::string& line) {
  const auto toks = split_ws(line);
  if (toks.size() != 5 || lower(toks[0]) != "%%matrixmarket") {
    throw ParseError("malformed Matrix Market header", 1);
  }
  if (lower(toks[1]) != "matrix") throw ParseError("unsupported object '" + toks[1] + "'", 1);
  Banner b;
  const std::string layout = lower(toks[2]);
  if (layout == "coordinate") {
    b.coordinate = true;
  } else if (layout != "array") {
    throw ParseError("unsupported layout '" + toks[2] + "'", 1);
  }
  const std::string field = lower(toks[3]);
  if (field == "complex") {
    b.complex = true;
  } else if (field != "real" && field != "integer" && field != "double") {
    throw ParseError("unsupported field '" + toks[3] + "'", 1);
  }
  b.symmetry = lower(toks[4]);
  if (b.symmetry != "general" && b.symmetry != "symmetric" && b.symmetry != "skew-symmetric" &&
      b.symmetry != "hermitian") {
    throw ParseError("unsupported symmetry '" + toks[4] + "'", 1);
  }
  if (b.symmetry == "hermitian" && !b.complex) {
    throw ParseError("hermitian symmetry needs a complex field", 1);
  }
  return b;
}

class LineReader {
public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next line that is neither blank nor a comment.
  bool next(std::string& out) {
    while (std::getline(in_, out)) {
      ++line_;
      const std::string t = trim(out);
      if (t.empty() || t[0] == '%') continue;
      out = t;
      return true;
    }
    return false;
  }
  std::size_t line() const { return line_; }

private:
  std::istream& in_;
  std::size_t line_ = 1;  // the banner
};

DenseMatrix read_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input", 1);
  const Banner banner = parse_banner(trim(line));
  LineReader reader(in);
  if (!reader.next(line)) throw ParseError("missing size line", reader.line() + 1);
  const auto size = split_ws(line);
  const std::size_t want = banner.coordinate ? 3 : 2;
  if (size.size() != want) {
    throw ParseError("size line needs " + std::to_string(want) + " integers", reader.line());
  }
  const std::size_t rows = to_index(size[0], reader.line());
  const std::size_t cols = to_index(size[1], reader.line());
  if (rows == 0 || cols == 0) throw ParseError("empty matrix", reader.line());
  const bool symmetric = banner.symmetry != "general";
  if (symmetric && rows != cols) {
    throw ParseError(banner.symmetry + " matrix must be square", reader.line());
  }
  const std::size_t per_entry = banner.complex ? 2 : 1;

  std::vector<Complex> a(rows * cols, Complex{});
  const auto place = [&](std::size_t r, std::size_t c, Complex v) {
    a[r * cols + c] = v;
    if (!symmetric || r == c) return;
    if (banner.symmetry == "symmetric") a[c * cols + r] = v;
    if (banner.symmetry == "skew-symmetric") a[c * cols + r] = -v;
    if (banner.symmetry == "hermitian") a[c * cols + r] = std::conj(v);
  };
  const auto value = [&](const std::vector<std::string>& toks, std::size_t at) {
    const double re = to_double(toks[at], reader.line());
    const double im = banner.complex ? to_double(toks[at + 1], reader.line()) : 0.0;
    return Complex{re, im};
  };

  if (banner.coordinate) {
    const std::size_t nnz = to_index(size[2], reader.line());
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
    for (std::size_t k = 0; k < nnz; ++k) {
      if (!reader.next(line)) {
        throw ParseError("expected " + std::to_string(nnz) + " entries, found " +
                             std::to_string(k),
                         reader.line());
      }
      const auto toks = split_ws(line);
      if (toks.size() != 2 + per_entry) {
        throw ParseError("entry needs " + std::to_string(2 + per_entry) + " fields", reader.line());
      }
      const std::size_t r = to_index(toks[0], reader.line());
      const std::size_t c = to_index(toks[1], reader.line());
      if (r < 1 || r > rows || c < 1 || c > cols) {
        throw ParseError("index (" + toks[0] + ", " + toks[1] + ") outside " +
                             std::to_string(rows) + "x" + std::to_string(cols),
                         reader.line());
      }
      if (symmetric && c > r) {
        throw ParseError(banner.symmetry + " storage holds the lower triangle only", reader.line());
      }
      if (const auto [it, fresh] = seen.try_emplace({r, c}, reader.line()); !fresh) {
        throw ParseError("duplicate entry (" + toks[0] + ", " + toks[1] + "), first on line " +
                             std::to_string(it->second),
                         reader.line());
      }
      place(r - 1, c - 1, value(toks, 2));
    }
  } else {
    // Column-major; symmetric storage lists the lower triangle by columns.
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t first = !symmetric ? 0 : (banner.symmetry == "skew-symmetric" ? c + 1 : c);
      for (std::size_t r = first; r < rows; ++r) {
        if (!reader.next(line)) throw ParseError("too few entries", reader.line());
        const auto toks = split_ws(line);
        if (toks.size() != per_entry) {
          throw ParseError("entry needs " + std::to_string(per_entry) + " fields", reader.line());
        }
        place(r, c, value(toks, 0));
      }
    }
  }
  if (reader.next(line)) throw ParseError("more entries than the size line declares", reader.line());
  return DenseMatrix(rows, cols, std::move(a));
}

DenseMatrix read_csv(std::istream& in) {
  std::vector<Complex> a;
  std::size_t cols = 0, rows = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = t.find(',', start);
      fields.push_back(trim(t.substr(start, comma == std::string::npos ? comma : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = fields.size();
    } else if (fields.size() != cols) {
      throw ParseError("row has " + std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(cols),
                       line_no);
    }
    for (const std::string& f : fields) a.emplace_back(to_double(f, line_no), 0.0);
    ++rows;
  }
  if (rows == 0) throw ParseError("empty input", 0);
  return DenseMatrix(rows, cols, std::move(a));
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

MatrixFormat parse_format(const std::string& name) {
  const std::string n = lower(name);
  if (n == "auto") return MatrixFormat::Auto;
  if (n == "mm" || n == "mtx" || n == "matrixmarket") return MatrixFormat::MatrixMarket;
  if (n == "csv") return MatrixFormat::Csv;
  throw ParseError("unknown matrix format '" + name + "'", 0);
}

DenseMatrix read_matrix(std::istream& in, MatrixFormat format) {
  if (format == MatrixFormat::Auto) {
    std::string head;
    const auto pos = in.tellg();
    std::getline(in, head);
    in.clear();
    in.seekg(pos);
    format = lower(trim(head)).rfind("%%matrixmarket", 0) == 0 ? MatrixFormat::MatrixMarket
                                                               : MatrixFormat::Csv;
  }
  return format == MatrixFormat::MatrixMarket ? read_market(in) : read_csv(in);
}

DenseMatrix parse_matrix(const std::string& path, MatrixFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_matrix(in, format);
}

void write_matrix_market(std::ostream& out, const DenseMatrix& m) {
  const bool real = m.is_real();
  out << "%%MatrixMarket matrix array " << (real ? "real" : "complex") << " general\n";
  out << m.rows() << " " << m.cols() << "\n";
  for (std::size_t c = 0; c < m.cols(); ++c) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const Complex v = m(r, c);
      out << g17(v.real());
      if (!real) out << " " << g17(v.imag());
      out << "\n";
    }
  }
}

void write_csv(std::ostream& out, const DenseMatrix& m) {
  if (!m.is_real()) throw PreconditionError("write_csv: CSV holds real matrices only");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? "," : "") << g17(m(r, c).real());
    out << "\n";
  }
}

void write_matrix(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  const bool csv = path.size() >= 4 && lower(path.substr(path.size() - 4)) == ".csv";
  if (csv) {
    write_csv(out, m);
  } else {
    write_matrix_market(out, m);
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace qcorr::cli
