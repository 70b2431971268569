#include "ssblab/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssblab {

double frobenius_norm(const SparseMatrix& m) {
  double sum = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      sum += std::norm(it.value());
  return std::sqrt(sum);
}

double hermiticity_defect(const SparseMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  SparseMatrix diff = m - SparseMatrix(m.adjoint());
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

SparseMatrix commutator(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw ShapeError("commutator: operands must be square and equal-sized");
  SparseMatrix c = a * b - b * a;
  c.prune(Complex(0.0, 0.0));
  return c;
}

Complex expectation(const SparseMatrix& m, const CVector& u,
                    const CVector& v) {
  if (m.rows() != u.size() || m.cols() != v.size())
    throw ShapeError("expectation: vector/operator dimension mismatch");
  return u.dot(m * v);
}

HermitianOperator::HermitianOperator(SparseMatrix matrix, double tolerance)
    : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols())
    throw ShapeError("HermitianOperator: matrix is not square");
  matrix_.makeCompressed();
  double scale = 1.0;
  for (int k = 0; k < matrix_.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  const double defect = hermiticity_defect(matrix_);
  if (defect > tolerance * scale)
    throw ValidationError("HermitianOperator: matrix is not Hermitian (defect " +
                          std::to_string(defect) + ")");
}

HermitianOperator HermitianOperator::diagonal(const RVector& values) {
  SparseMatrix m(values.size(), values.size());
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (values[i] != 0.0) t.emplace_back(i, i, Complex(values[i], 0.0));
  m.setFromTriplets(t.begin(), t.end());
  return HermitianOperator(std::move(m));
}

HermitianOperator HermitianOperator::zero(Eigen::Index dimension) {
  return HermitianOperator(SparseMatrix(dimension, dimension));
}

bool HermitianOperator::is_diagonal() const {
  for (int k = 0; k < matrix_.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it)
      if (it.row() != it.col() && it.value() != Complex(0.0, 0.0)) return false;
  return true;
}

RVector HermitianOperator::diagonal_values() const {
  RVector d = RVector::Zero(dimension());
  for (int k = 0; k < matrix_.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it)
      if (it.row() == it.col()) d[it.row()] = it.value().real();
  return d;
}

HermitianOperator HermitianOperator::scaled(double factor) const {
  return HermitianOperator(SparseMatrix(matrix_ * Complex(factor, 0.0)));
}

HermitianOperator HermitianOperator::shifted(double offset) const {
  SparseMatrix id(dimension(), dimension());
  id.setIdentity();
  return HermitianOperator(SparseMatrix(matrix_ + id * Complex(offset, 0.0)));
}

Spectrum diagonalize(const HermitianOperator& h, Eigen::Index max_dimension) {
  if (h.dimension() > max_dimension)
    throw SizingError("diagonalize: dimension " +
                      std::to_string(h.dimension()) + " exceeds dense cap " +
                      std::to_string(max_dimension));
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.dense());
  if (solver.info() != Eigen::Success)
    throw Error("diagonalize: eigensolver failed to converge");
  return Spectrum{solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace ssblab
