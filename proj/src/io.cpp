#include "ssblab/io.hpp"

#include <string>
#include <vector>

namespace ssblab::io {

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError("complex value must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json vector_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v[i]));
  return out;
}

Json vector_json(const RVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

CVector complex_vector_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("complex vector must be an array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i]);
  return v;
}

Json matrix_json(const CMatrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    data.push_back(std::move(row));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

CMatrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const Json& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows)
    throw ShapeError("matrix_from_json: row count mismatch");
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = data[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw ShapeError("matrix_from_json: column count mismatch");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

Json sparse_json(const SparseMatrix& m) {
  Json entries = Json::array();
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      entries.push_back(Json::array({it.row(), it.col(), complex_json(it.value())}));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

SparseMatrix sparse_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  std::vector<Triplet> t;
  for (const auto& e : j.at("entries")) {
    const auto r = e.at(0).get<Eigen::Index>();
    const auto c = e.at(1).get<Eigen::Index>();
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw ShapeError("sparse_from_json: entry outside the matrix");
    t.emplace_back(r, c, complex_from_json(e.at(2)));
  }
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Json basis_json(const FockBasis& basis) {
  Json occ = Json::array();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto o = basis.occupation(i);
    occ.push_back(std::vector<int>(o.begin(), o.end()));
  }
  return Json{{"particles", basis.particles()},
              {"modes", basis.modes()},
              {"occupations", std::move(occ)}};
}

Json state_json(const ManyBodyState& state) {
  Json j = basis_json(state.fock_basis());
  j["amplitudes"] = vector_json(state.amplitudes());
  return j;
}

ManyBodyState state_from_json(const Json& j) {
  auto basis = FockBasis::create(j.at("particles").get<int>(), j.at("modes").get<int>());
  const Json& occ = j.at("occupations");
  CVector stored = complex_vector_from_json(j.at("amplitudes"));
  if (occ.size() != static_cast<std::size_t>(stored.size()))
    throw ShapeError("state_from_json: one amplitude per occupation required");
  CVector amps = CVector::Zero(static_cast<Eigen::Index>(basis->size()));
  for (std::size_t i = 0; i < occ.size(); ++i) {
    const auto o = occ[i].get<std::vector<int>>();
    amps[static_cast<Eigen::Index>(basis->index_of(o))] = stored[static_cast<Eigen::Index>(i)];
  }
  return ManyBodyState(std::move(basis), std::move(amps));
}

}  // namespace ssblab::io
