#include <doctest.h>

#include "oracles.hpp"
#include "ssblab/io.hpp"

using namespace ssblab;

TEST_CASE("complex and vector round trips") {
  const Complex z(1.25, -3e-17);
  CHECK(io::complex_json(z).dump() == "[1.25,-3e-17]");
  CHECK(io::complex_from_json(io::complex_json(z)) == z);
  const CVector v = oracle::random_vector(7, 3);
  CHECK(io::complex_vector_from_json(io::vector_json(v)) == v);
  const RVector r = (RVector(3) << 0.1, -2.0, 1e300).finished();
  CHECK(io::vector_json(r).dump() == "[0.1,-2.0,1e+300]");
  CHECK_THROWS(io::complex_from_json(io::Json::parse("[1]")));
}

TEST_CASE("matrix round trips") {
  const CMatrix m = oracle::random_hermitian(5, 11);
  const io::Json j = io::matrix_json(m);
  CHECK(j["rows"] == 5);
  CHECK(io::matrix_from_json(j) == m);
  CMatrix rect = CMatrix::Zero(2, 3);
  rect(1, 2) = Complex(0, 1);
  CHECK(io::matrix_from_json(io::matrix_json(rect)) == rect);

  const SparseMatrix s = m.sparseView();
  const SparseMatrix back = io::sparse_from_json(io::sparse_json(s));
  CHECK(back.nonZeros() == s.nonZeros());
  CHECK(CMatrix(back) == m);
  SparseMatrix empty(3, 4);
  CHECK(io::sparse_from_json(io::sparse_json(empty)).cols() == 4);
}

TEST_CASE("states") {
  auto b = FockBasis::create(3, 2);
  const auto s = ManyBodyState::normalized(b, oracle::random_vector(4, 8));
  const io::Json j = io::state_json(s);
  CHECK(j["occupations"][3] == io::Json::array({3, 0}));
  const auto back = io::state_from_json(j);
  CHECK(back.particles() == 3);
  CHECK(back.fock_basis().modes() == 2);
  CHECK(back.amplitudes() == s.amplitudes());
  // Re-serializing is byte-identical.
  CHECK(io::state_json(back).dump() == j.dump());
}
