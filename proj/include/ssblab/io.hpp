#pragma once

#include <json.hpp>

#include "ssblab/fock.hpp"

namespace ssblab::io {

using Json = nlohmann::ordered_json;

/// Complex numbers serialize as [re, im].
Json complex_json(Complex z);
Complex complex_from_json(const Json& j);

Json vector_json(const CVector& v);
Json vector_json(const RVector& v);
CVector complex_vector_from_json(const Json& j);

/// {"rows", "cols", "data": [[[re, im], ...], ...]} row-major.
Json matrix_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

/// {"rows", "cols", "entries": [[i, j, [re, im]], ...]} in column-major order.
Json sparse_json(const SparseMatrix& m);
SparseMatrix sparse_from_json(const Json& j);

/// {"particles", "modes", "occupations": [[n_0, ..., n_{M-1}], ...]}.
Json basis_json(const FockBasis& basis);

/// Basis plus amplitudes.
Json state_json(const ManyBodyState& state);
ManyBodyState state_from_json(const Json& j);

}  // namespace ssblab::io
