#pragma once

// Dense complex matrix kernels shared by the portrait and Jordan analyzers:
// norms, resolvent magnitude, eigenvalues and test-matrix constructors.
//
// Everything here is a pure function of its arguments.

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace qcorr::numkernel {

using Complex = std::complex<double>;

/// Finite-entried complex matrix. Shape and finiteness are checked on
/// construction, so a live DenseMatrix is always well-formed.
class DenseMatrix {
public:
  /// Row-major entries; throws PreconditionError on a shape mismatch, an
  /// empty shape or a non-finite entry.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  explicit DenseMatrix(Eigen::MatrixXcd values);

  static DenseMatrix zeros(std::size_t rows, std::size_t cols);
  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const Complex> diag);
  /// Real row-major nested initializer, convenient for fixtures.
  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  bool square() const noexcept { return values_.rows() == values_.cols(); }
  /// True when every imaginary part is exactly zero.
  bool is_real() const noexcept;

  Complex operator()(std::size_t r, std::size_t c) const {
    return values_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  const Eigen::MatrixXcd& values() const noexcept { return values_; }

  /// Entries in row-major order.
  std::vector<Complex> entries() const;

  /// Human-readable dump used in error messages.
  std::string echo() const;

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.values_ == b.values_;
  }

private:
  Eigen::MatrixXcd values_;
};

struct Spectrum {
  std::vector<Complex> values;
  /// max_i ||m v_i - lambda_i v_i|| / (||m||_2 ||v_i||) for the computed pairs.
  double residual_bound = 0.0;
};

struct JordanBlockSpec {
  Complex lambda;
  int rho = 1;
};

/// Root of a polynomial together with its multiplicity.
struct Root {
  Complex value;
  int multiplicity = 1;
};

/// Stand-in for the portrait at an exact eigenvalue.
inline constexpr double kPortraitInfinity = std::numeric_limits<double>::infinity();

double inf_norm(const DenseMatrix& m);
double two_norm(const DenseMatrix& m);
double min_singular(const DenseMatrix& m);

/// log10(||a||_2) + log10(||(a - zI)^{-1}||_2), evaluated through the
/// smallest singular value of a - zI. Returns kPortraitInfinity when that
/// singular value is exactly zero.
double portrait_value(const DenseMatrix& a, Complex z);

/// Same as portrait_value but reuses a precomputed ||a||_2; the hot path for
/// grid sampling.
double portrait_value(const DenseMatrix& a, double a_two_norm, Complex z);

/// All eigenvalues, sorted by (real, imag). Real input goes through the real
/// Schur path so real eigenvalues come back with exactly zero imaginary part.
Spectrum eigenvalues(const DenseMatrix& m);

/// Companion matrix of the monic polynomial with the given roots: negated
/// coefficients along the first row and ones on the subdiagonal.
DenseMatrix companion_matrix(std::span<const Root> roots);

/// B J B^{-1} where J = diag(J_1 .. J_r) and B = I + tG, with G a seeded
/// Gaussian draw and t shrunk until cond_2(B) <= basis_condition_cap.
DenseMatrix synth_jordan(std::span<const JordanBlockSpec> blocks, std::uint64_t basis_seed,
                         double basis_condition_cap);

}  // namespace qcorr::numkernel
