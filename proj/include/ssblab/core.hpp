#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ssblab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// hbar = 1 throughout; kept as a named constant so formulas read as written.
inline constexpr double kHbar = 1.0;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested Hilbert space or grid exceeds a configured cap.
class SizingError : public Error {
 public:
  using Error::Error;
};

/// Operands live on incompatible spaces.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or inputs (bad ranges, malformed lattices, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical identity that the caller promised does not hold.
class ContractError : public Error {
 public:
  ContractError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Frobenius norm of a sparse matrix.
double frobenius_norm(const SparseMatrix& m);

/// Largest |m_ij - conj(m_ji)|.
double hermiticity_defect(const SparseMatrix& m);

/// Commutator AB - BA.
SparseMatrix commutator(const SparseMatrix& a, const SparseMatrix& b);

/// <u|M|v>.
Complex expectation(const SparseMatrix& m, const CVector& u, const CVector& v);
inline Complex expectation(const SparseMatrix& m, const CVector& v) {
  return expectation(m, v, v);
}

/// Sparse complex matrix that equals its conjugate transpose.
///
/// Construction checks the defect against `tolerance` (absolute, scaled by
/// the largest entry when that exceeds one) and throws ValidationError.
class HermitianOperator {
 public:
  static constexpr double kDefaultTolerance = 1e-12;

  HermitianOperator() = default;
  explicit HermitianOperator(SparseMatrix matrix,
                             double tolerance = kDefaultTolerance);

  static HermitianOperator diagonal(const RVector& values);
  static HermitianOperator zero(Eigen::Index dimension);

  Eigen::Index dimension() const noexcept { return matrix_.rows(); }
  const SparseMatrix& matrix() const noexcept { return matrix_; }
  CMatrix dense() const { return CMatrix(matrix_); }
  double frobenius_norm() const { return ssblab::frobenius_norm(matrix_); }
  bool is_diagonal() const;
  RVector diagonal_values() const;

  HermitianOperator scaled(double factor) const;
  HermitianOperator shifted(double offset) const;

 private:
  SparseMatrix matrix_;
};

/// Eigen-decomposition of a Hermitian operator, eigenvalues ascending.
struct Spectrum {
  RVector energies;
  CMatrix vectors;  // columns
};

/// Dense diagonalization; throws SizingError above `max_dimension`.
Spectrum diagonalize(const HermitianOperator& h,
                     Eigen::Index max_dimension = 4096);

}  // namespace ssblab
