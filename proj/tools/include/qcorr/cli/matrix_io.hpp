#pragma once

// Matrix Market 1.0 text and plain CSV, read into and written from dense
// matrices. Errors are qcorr::ParseError carrying the 1-based line.

#include <iosfwd>
#include <string>

#include "qcorr/numkernel.hpp"

namespace qcorr::cli {

using numkernel::DenseMatrix;

enum class MatrixFormat { Auto, MatrixMarket, Csv };

/// "auto", "mm" or "csv".
MatrixFormat parse_format(const std::string& name);

/// Auto picks Matrix Market when the first line carries the banner, CSV
/// otherwise. Matrix Market accepts array and coordinate layouts with
/// real, integer or complex fields and general, symmetric, skew-symmetric
/// or hermitian symmetry; missing coordinate entries are zero.
DenseMatrix read_matrix(std::istream& in, MatrixFormat format = MatrixFormat::Auto);
DenseMatrix parse_matrix(const std::string& path, MatrixFormat format = MatrixFormat::Auto);

/// Array layout, real field when every imaginary part is zero, entries in
/// %.17g so reals round-trip exactly.
void write_matrix_market(std::ostream& out, const DenseMatrix& m);

/// Rows of %.17g reals. Throws PreconditionError for a complex matrix.
void write_csv(std::ostream& out, const DenseMatrix& m);

/// Format from the extension: ".csv" is CSV, anything else Matrix Market.
void write_matrix(const std::string& path, const DenseMatrix& m);

}  // namespace qcorr::cli
