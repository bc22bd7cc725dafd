#include "qcorr/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "qcorr/error.hpp"
#include "qcorr/random.hpp"

namespace qcorr::numkernel {

namespace {

void require_square(const DenseMatrix& m, const char* op) {
  if (!m.square()) {
    throw PreconditionError(std::string(op) + ": matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected square");
  }
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  Eigen::VectorXd s = svd.singularValues();
  if (!s.allFinite()) {
    throw NumericalFailure("singular value decomposition did not converge for matrix\n" +
                           DenseMatrix(m).echo());
  }
  return s;
}

bool lex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries) {
  if (rows == 0 || cols == 0) throw PreconditionError("DenseMatrix: empty shape");
  if (entries.size() != rows * cols) {
    throw PreconditionError("DenseMatrix: " + std::to_string(entries.size()) +
                            " entries for a " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " matrix");
  }
  values_.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const Complex v = entries[r * cols + c];
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw PreconditionError("DenseMatrix: non-finite entry at (" + std::to_string(r) + ", " +
                                std::to_string(c) + ")");
      }
      values_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
}

DenseMatrix::DenseMatrix(Eigen::MatrixXcd values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0) {
    throw PreconditionError("DenseMatrix: empty shape");
  }
  if (!values_.allFinite()) throw PreconditionError("DenseMatrix: non-finite entry");
}

DenseMatrix DenseMatrix::zeros(std::size_t rows, std::size_t cols) {
  return DenseMatrix(rows, cols, std::vector<Complex>(rows * cols));
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  const auto en = static_cast<Eigen::Index>(n);
  return DenseMatrix(Eigen::MatrixXcd::Identity(en, en));
}

DenseMatrix DenseMatrix::diagonal(std::span<const Complex> diag) {
  std::vector<Complex> e(diag.size() * diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) e[i * diag.size() + i] = diag[i];
  return DenseMatrix(diag.size(), diag.size(), std::move(e));
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw PreconditionError("DenseMatrix: empty shape");
  const std::size_t cols = rows.front().size();
  std::vector<Complex> e;
  e.reserve(rows.size() * cols);
  for (const auto& row : rows) {
    if (row.size() != cols) throw PreconditionError("DenseMatrix: ragged rows");
    for (double v : row) e.emplace_back(v, 0.0);
  }
  return DenseMatrix(rows.size(), cols, std::move(e));
}

bool DenseMatrix::is_real() const noexcept { return (values_.imag().array() == 0.0).all(); }

std::vector<Complex> DenseMatrix::entries() const {
  std::vector<Complex> e;
  e.reserve(rows() * cols());
  for (Eigen::Index r = 0; r < values_.rows(); ++r) {
    for (Eigen::Index c = 0; c < values_.cols(); ++c) e.push_back(values_(r, c));
  }
  return e;
}

std::string DenseMatrix::echo() const {
  std::ostringstream os;
  os.precision(17);
  os << rows() << "x" << cols() << " [";
  for (Eigen::Index r = 0; r < values_.rows(); ++r) {
    os << (r ? "; " : "");
    for (Eigen::Index c = 0; c < values_.cols(); ++c) {
      const Complex v = values_(r, c);
      os << (c ? ", " : "") << v.real();
      if (v.imag() != 0.0) os << (v.imag() < 0 ? "" : "+") << v.imag() << "i";
    }
  }
  os << "]";
  return os.str();
}

double inf_norm(const DenseMatrix& m) {
  return m.values().cwiseAbs().rowwise().sum().maxCoeff();
}

double two_norm(const DenseMatrix& m) { return singular_values(m.values())(0); }

double min_singular(const DenseMatrix& m) {
  require_square(m, "min_singular");
  const Eigen::VectorXd s = singular_values(m.values());
  return s(s.size() - 1);
}

double portrait_value(const DenseMatrix& a, Complex z) {
  require_square(a, "portrait_value");
  return portrait_value(a, two_norm(a), z);
}

double portrait_value(const DenseMatrix& a, double a_two_norm, Complex z) {
  require_square(a, "portrait_value");
  Eigen::MatrixXcd shifted = a.values();
  shifted.diagonal().array() -= z;
  const Eigen::VectorXd s = singular_values(shifted);
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return kPortraitInfinity;
  return std::log10(a_two_norm) - std::log10(smin);
}

Spectrum eigenvalues(const DenseMatrix& m) {
  require_square(m, "eigenvalues");
  const auto n = static_cast<Eigen::Index>(m.rows());
  Spectrum out;
  out.values.reserve(m.rows());
  Eigen::VectorXcd lambda;
  Eigen::MatrixXcd vectors;
  if (m.is_real()) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m.values().real(), true);
    if (es.info() != Eigen::Success) {
      throw NumericalFailure("eigensolver did not converge for matrix\n" + m.echo());
    }
    lambda = es.eigenvalues();
    vectors = es.eigenvectors();
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m.values(), true);
    if (es.info() != Eigen::Success) {
      throw NumericalFailure("eigensolver did not converge for matrix\n" + m.echo());
    }
    lambda = es.eigenvalues();
    vectors = es.eigenvectors();
  }

  const double norm = two_norm(m);
  double bound = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values.push_back(lambda(i));
    const Eigen::VectorXcd v = vectors.col(i);
    const double vn = v.norm();
    if (vn == 0.0 || norm == 0.0) continue;
    const double res = (m.values() * v - lambda(i) * v).norm();
    bound = std::max(bound, res / (norm * vn));
  }
  // Bound as reported is relative to ||m||; keep a floor at unit roundoff so
  // callers can scale it without special-casing exact arithmetic.
  out.residual_bound = std::max(bound, std::numeric_limits<double>::epsilon());
  std::sort(out.values.begin(), out.values.end(), lex_less);
  return out;
}

DenseMatrix companion_matrix(std::span<const Root> roots) {
  if (roots.empty()) throw PreconditionError("companion_matrix: empty root list");
  // coeffs[k] is the coefficient of x^k of the monic product.
  std::vector<Complex> coeffs{Complex(1.0, 0.0)};
  for (const Root& r : roots) {
    if (r.multiplicity < 1) {
      throw PreconditionError("companion_matrix: multiplicity must be >= 1");
    }
    for (int k = 0; k < r.multiplicity; ++k) {
      std::vector<Complex> next(coeffs.size() + 1);
      for (std::size_t i = 0; i < coeffs.size(); ++i) {
        next[i + 1] += coeffs[i];
        next[i] -= r.value * coeffs[i];
      }
      coeffs = std::move(next);
    }
  }
  const std::size_t n = coeffs.size() - 1;
  std::vector<Complex> e(n * n);
  for (std::size_t c = 0; c < n; ++c) e[c] = -coeffs[n - 1 - c];
  for (std::size_t r = 1; r < n; ++r) e[r * n + (r - 1)] = 1.0;
  return DenseMatrix(n, n, std::move(e));
}

DenseMatrix synth_jordan(std::span<const JordanBlockSpec> blocks, std::uint64_t basis_seed,
                         double basis_condition_cap) {
  if (blocks.empty()) throw PreconditionError("synth_jordan: no blocks");
  if (!(basis_condition_cap > 1.0)) {
    throw PreconditionError("synth_jordan: basis_condition_cap must exceed 1");
  }
  Eigen::Index n = 0;
  for (const auto& b : blocks) {
    if (b.rho < 1) throw PreconditionError("synth_jordan: block size must be >= 1");
    n += b.rho;
  }

  Eigen::MatrixXcd jordan = Eigen::MatrixXcd::Zero(n, n);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    for (int k = 0; k < b.rho; ++k) {
      jordan(at + k, at + k) = b.lambda;
      if (k + 1 < b.rho) jordan(at + k, at + k + 1) = 1.0;
    }
    at += b.rho;
  }

  Rng rng(derive_seed(basis_seed, {0x5eed}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) g(r, c) = gauss(rng);
  }

  constexpr int kMaxHalvings = 64;
  double t = 1.0;
  for (int attempt = 0; attempt <= kMaxHalvings; ++attempt, t *= 0.5) {
    const Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n) + t * g;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis);
    const Eigen::VectorXd s = svd.singularValues();
    if (s(n - 1) == 0.0) continue;
    if (s(0) / s(n - 1) <= basis_condition_cap) {
      const Eigen::MatrixXcd b = basis.cast<Complex>();
      const Eigen::MatrixXcd a = b * jordan * b.partialPivLu().inverse();
      return DenseMatrix(a);
    }
  }
  throw NumericalFailure("synth_jordan: no basis with condition number <= " +
                         std::to_string(basis_condition_cap) + " after " +
                         std::to_string(kMaxHalvings) + " retries");
}

}  // namespace qcorr::numkernel
