#include "ssblab/spin.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace ssblab {
namespace {

constexpr Eigen::Index kMaxSpinDimension = Eigen::Index{1} << 22;

// Groups indices 0..n-1 by value within `tol`; values ascending.
std::vector<std::pair<double, std::vector<Eigen::Index>>> cluster_values(
    const RVector& values, double tol) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<std::pair<double, std::vector<Eigen::Index>>> groups;
  for (auto i : order) {
    if (groups.empty() || values[i] - groups.back().first > tol)
      groups.push_back({values[i], {}});
    groups.back().second.push_back(i);
  }
  return groups;
}

// Orthonormal bases of the eigenspaces of R, paired with their eigenvalues.
struct Eigenspace {
  double value;
  CMatrix basis;  // columns
};

std::vector<Eigenspace> observable_eigenspaces(const HermitianOperator& r,
                                               Eigen::Index max_dim) {
  std::vector<Eigenspace> out;
  const Eigen::Index n = r.dimension();
  if (r.is_diagonal()) {
    const RVector d = r.diagonal_values();
    const double range = n ? d.maxCoeff() - d.minCoeff() : 0.0;
    for (auto& [value, idx] : cluster_values(d, 1e-9 * std::max(1.0, range))) {
      CMatrix q = CMatrix::Zero(n, static_cast<Eigen::Index>(idx.size()));
      for (std::size_t c = 0; c < idx.size(); ++c)
        q(idx[c], static_cast<Eigen::Index>(c)) = 1.0;
      out.push_back({value, std::move(q)});
    }
    return out;
  }
  const Spectrum s = diagonalize(r, max_dim);
  const double range = s.energies.maxCoeff() - s.energies.minCoeff();
  for (auto& [value, idx] :
       cluster_values(s.energies, 1e-9 * std::max(1.0, range))) {
    CMatrix q(n, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c)
      q.col(static_cast<Eigen::Index>(c)) = s.vectors.col(idx[c]);
    out.push_back({value, std::move(q)});
  }
  return out;
}

double weighted_spread(const Spectrum& h_spectrum, const CVector& state,
                       double weight_threshold) {
  const CVector coeffs = h_spectrum.vectors.adjoint() * state;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    if (std::norm(coeffs[k]) < weight_threshold) continue;
    lo = std::min(lo, h_spectrum.energies[k]);
    hi = std::max(hi, h_spectrum.energies[k]);
  }
  return hi >= lo ? hi - lo : 0.0;
}

}  // namespace

SpinLattice::SpinLattice(int sites, double spin, std::vector<Coupling> couplings,
                         std::vector<int> sublattice)
    : sites_(sites),
      spin_(spin),
      couplings_(std::move(couplings)),
      sublattice_(std::move(sublattice)) {
  if (sites_ < 1 || sites_ > kMaxSites)
    throw SizingError("SpinLattice: site count " + std::to_string(sites_) +
                      " outside [1, " + std::to_string(kMaxSites) + "]");
  if (spin_ != 0.5 && spin_ != 1.0)
    throw ValidationError("SpinLattice: spin must be 1/2 or 1");
  const double dim = std::pow(static_cast<double>(local_dimension()), sites_);
  if (dim > static_cast<double>(kMaxSpinDimension))
    throw SizingError("SpinLattice: Hilbert dimension " + std::to_string(dim) +
                      " above cap");
  dimension_ = static_cast<Eigen::Index>(dim);

  // Merge (i,j) and (j,i) entries; the coupling table is symmetric.
  std::map<std::pair<int, int>, double> merged;
  for (const auto& c : couplings_) {
    if (c.i < 0 || c.j < 0 || c.i >= sites_ || c.j >= sites_)
      throw ValidationError("SpinLattice: coupling references a missing site");
    if (c.i == c.j) throw ValidationError("SpinLattice: self-coupling");
    merged[{std::min(c.i, c.j), std::max(c.i, c.j)}] += c.strength;
  }
  couplings_.clear();
  for (auto& [key, value] : merged) couplings_.push_back({key.first, key.second, value});

  if (!sublattice_.empty()) {
    if (static_cast<int>(sublattice_.size()) != sites_)
      throw ValidationError("SpinLattice: sublattice label count != sites");
    for (int s : sublattice_)
      if (s != 0 && s != 1)
        throw ValidationError("SpinLattice: sublattice labels must be 0 or 1");
  }
}

SpinLattice SpinLattice::chain(int sites, double coupling, double spin) {
  std::vector<Coupling> bonds;
  for (int i = 0; i + 1 < sites; ++i) bonds.push_back({i, i + 1, coupling});
  std::vector<int> labels;
  for (int i = 0; i < sites; ++i) labels.push_back(i % 2);
  return SpinLattice(sites, spin, std::move(bonds), std::move(labels));
}

double SpinLattice::magnetic_number(Eigen::Index index, int site) const {
  const int d = local_dimension();
  for (int s = sites_ - 1; s > site; --s) index /= d;
  return spin_ - static_cast<double>(index % d);
}

bool SpinLattice::is_bipartite() const {
  if (sublattice_.empty()) return false;
  for (const auto& c : couplings_)
    if (c.strength != 0.0 && sublattice_[static_cast<std::size_t>(c.i)] ==
                                 sublattice_[static_cast<std::size_t>(c.j)])
      return false;
  return true;
}

HermitianOperator build_heisenberg(const SpinLattice& lattice) {
  const Eigen::Index dim = lattice.dimension();
  const int d = lattice.local_dimension();
  const double s = lattice.spin();
  std::vector<Eigen::Index> stride(static_cast<std::size_t>(lattice.sites()));
  {
    Eigen::Index w = 1;
    for (int site = lattice.sites() - 1; site >= 0; --site) {
      stride[static_cast<std::size_t>(site)] = w;
      w *= d;
    }
  }
  auto ladder = [s](double m, int direction) {
    return std::sqrt(s * (s + 1) - m * (m + direction));
  };

  std::vector<Triplet> t;
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    double diag = 0.0;
    for (const auto& c : lattice.couplings()) {
      if (c.strength == 0.0) continue;
      const double mi = lattice.magnetic_number(idx, c.i);
      const double mj = lattice.magnetic_number(idx, c.j);
      diag += c.strength * mi * mj;
      // S+_i S-_j / 2 and its conjugate S-_i S+_j / 2. Raising m lowers the
      // local index by one.
      if (mi < s && mj > -s) {
        const Eigen::Index target = idx - stride[static_cast<std::size_t>(c.i)] +
                                    stride[static_cast<std::size_t>(c.j)];
        t.emplace_back(target, idx,
                       0.5 * c.strength * ladder(mi, +1) * ladder(mj, -1));
      }
      if (mi > -s && mj < s) {
        const Eigen::Index target = idx + stride[static_cast<std::size_t>(c.i)] -
                                    stride[static_cast<std::size_t>(c.j)];
        t.emplace_back(target, idx,
                       0.5 * c.strength * ladder(mi, -1) * ladder(mj, +1));
      }
    }
    if (diag != 0.0) t.emplace_back(idx, idx, diag);
  }
  SparseMatrix h(dim, dim);
  h.setFromTriplets(t.begin(), t.end());
  HermitianOperator op(std::move(h));

  const auto sz = build_relevant_observable(lattice, ObservableKind::TotalSz);
  const double defect = frobenius_norm(commutator(op.matrix(), sz.matrix()));
  if (defect > 1e-12 * std::max(1.0, op.frobenius_norm()))
    throw ContractError("build_heisenberg: [H, S^z_total] != 0", defect);
  return op;
}

HermitianOperator build_relevant_observable(
    const SpinLattice& lattice, ObservableKind kind,
    const std::optional<RVector>& custom_diagonal) {
  const Eigen::Index dim = lattice.dimension();
  if (kind == ObservableKind::Custom) {
    if (!custom_diagonal || custom_diagonal->size() != dim)
      throw ValidationError("relevant observable: custom diagonal must have "
                            "one entry per basis state");
    return HermitianOperator::diagonal(*custom_diagonal);
  }
  if (kind == ObservableKind::StaggeredSz && !lattice.is_bipartite())
    throw ValidationError("relevant observable: staggered S^z needs a "
                          "two-colorable lattice");
  RVector d(dim);
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    double v = 0.0;
    for (int site = 0; site < lattice.sites(); ++site) {
      const double m = lattice.magnetic_number(idx, site);
      const bool flip = kind == ObservableKind::StaggeredSz &&
                        lattice.sublattice()[static_cast<std::size_t>(site)] == 1;
      v += flip ? -m : m;
    }
    d[idx] = v;
  }
  return HermitianOperator::diagonal(d);
}

std::string to_string(SSBVerdict v) {
  switch (v) {
    case SSBVerdict::Type1: return "TYPE1";
    case SSBVerdict::Type2: return "TYPE2";
    case SSBVerdict::NoSymmetry: return "NO_SYMMETRY";
  }
  return "?";
}

SSBClassification classify_ssb(const HermitianOperator& h,
                               const HermitianOperator& r,
                               const ClassifyOptions& options) {
  if (h.dimension() != r.dimension())
    throw ShapeError("classify_ssb: H and R have different dimensions");
  SSBClassification out;
  out.commutator_norm = frobenius_norm(commutator(h.matrix(), r.matrix()));
  out.commutator_tolerance = options.commutator_tolerance.value_or(
      1e-10 * h.frobenius_norm() * r.frobenius_norm() + DBL_MIN);
  const bool commuting = out.commutator_norm < out.commutator_tolerance;

  const auto spaces = observable_eigenspaces(r, options.max_dense_dimension);

  if (commuting) {
    // Joint eigenbasis: diagonalize H inside every R eigenspace.
    std::vector<std::pair<double, double>> levels;  // (E, r)
    for (const auto& space : spaces) {
      const CMatrix block = space.basis.adjoint() * h.dense() * space.basis;
      Eigen::SelfAdjointEigenSolver<CMatrix> solver(block, Eigen::EigenvaluesOnly);
      for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k)
        levels.emplace_back(solver.eigenvalues()[k], space.value);
    }
    std::sort(levels.begin(), levels.end());
    const double range = levels.back().first - levels.front().first;
    out.degeneracy_tolerance =
        options.degeneracy_tolerance.value_or(1e-9 * (range > 0 ? range : 1.0));
    out.ground_energy = levels.front().first;
    double top = out.ground_energy;
    for (const auto& [e, rv] : levels) {
      if (e - out.ground_energy > out.degeneracy_tolerance) break;
      ++out.ground_degeneracy;
      top = e;
      const bool seen = std::any_of(
          out.ground_observable_values.begin(), out.ground_observable_values.end(),
          [&](double x) { return std::abs(x - rv) < 1e-9 * std::max(1.0, std::abs(rv)); });
      if (!seen) out.ground_observable_values.push_back(rv);
    }
    out.near_degeneracy_spread = top - out.ground_energy;
    out.verdict = out.ground_degeneracy >= 2 ? SSBVerdict::Type1
                                             : SSBVerdict::NoSymmetry;
    return out;
  }

  const Spectrum spectrum = diagonalize(h, options.max_dense_dimension);
  const double range = spectrum.energies.maxCoeff() - spectrum.energies.minCoeff();
  out.degeneracy_tolerance =
      options.degeneracy_tolerance.value_or(1e-9 * (range > 0 ? range : 1.0));
  out.ground_energy = spectrum.energies[0];
  for (Eigen::Index k = 0; k < spectrum.energies.size(); ++k)
    if (spectrum.energies[k] - out.ground_energy <= out.degeneracy_tolerance)
      ++out.ground_degeneracy;

  // Physical ground state: lowest-energy state inside a symmetry-broken
  // (nonzero) R eigenspace; falls back to all eigenspaces if R has only 0.
  const double r_scale = std::max(1.0, r.frobenius_norm());
  bool any_nonzero = std::any_of(spaces.begin(), spaces.end(), [&](const auto& s) {
    return std::abs(s.value) > 1e-9 * r_scale;
  });
  double best = std::numeric_limits<double>::infinity();
  CVector physical;
  for (const auto& space : spaces) {
    if (any_nonzero && std::abs(space.value) <= 1e-9 * r_scale) continue;
    const CMatrix block = space.basis.adjoint() * h.dense() * space.basis;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(block);
    if (solver.eigenvalues()[0] < best) {
      best = solver.eigenvalues()[0];
      physical = space.basis * solver.eigenvectors().col(0);
    }
  }
  out.near_degeneracy_spread =
      weighted_spread(spectrum, physical, options.weight_threshold);
  out.verdict = SSBVerdict::Type2;
  return out;
}

Propagator::Propagator(const HermitianOperator& h, Eigen::Index max_dim)
    : spectrum_(diagonalize(h, max_dim)) {}

CVector Propagator::evolve(const CVector& state, double t) const {
  if (state.size() != spectrum_.energies.size())
    throw ShapeError("evolve: state and Hamiltonian dimensions differ");
  CVector c = spectrum_.vectors.adjoint() * state;
  for (Eigen::Index k = 0; k < c.size(); ++k)
    c[k] *= std::polar(1.0, -spectrum_.energies[k] * t / kHbar);
  return spectrum_.vectors * c;
}

CVector evolve(const CVector& state, const HermitianOperator& h, double t) {
  return Propagator(h).evolve(state, t);
}

UnitaryMixing::UnitaryMixing(CMatrix u) : u_(std::move(u)) {
  if (u_.rows() != u_.cols()) throw ShapeError("UnitaryMixing: not square");
  const double defect =
      (u_.adjoint() * u_ - CMatrix::Identity(u_.rows(), u_.cols())).cwiseAbs().maxCoeff();
  if (defect > kTolerance)
    throw ValidationError("UnitaryMixing: matrix is not unitary");
}

UnitaryMixing UnitaryMixing::symmetric() {
  return rotation(kPi / 4.0);
}

UnitaryMixing UnitaryMixing::rotation(double angle, double phase) {
  CMatrix u(2, 2);
  const double c = std::cos(angle), s = std::sin(angle);
  const Complex e = std::polar(1.0, phase);
  u << c, s * e, s, -c * e;
  return UnitaryMixing(std::move(u));
}

HermitianOperator hamiltonian_from_mixing(const RVector& energies,
                                          const UnitaryMixing& mixing) {
  const CMatrix& u = mixing.matrix();
  if (u.rows() != energies.size())
    throw ShapeError("hamiltonian_from_mixing: size mismatch");
  CMatrix h = u.conjugate() * energies.cast<Complex>().asDiagonal() * u.transpose();
  h = 0.5 * (h + h.adjoint()).eval();
  return HermitianOperator(h.sparseView(0.0, 0.0));
}

double two_state_oscillation(double e1, double e2, const UnitaryMixing& mixing,
                             double t) {
  const CMatrix& u = mixing.matrix();
  if (u.rows() != 2) throw ShapeError("two_state_oscillation: needs 2x2 mixing");
  const double e[2] = {e1, e2};
  Complex amp = 0.0;
  for (int jp = 0; jp < 2; ++jp)
    amp += std::conj(u(1, jp)) * u(0, jp) * std::polar(1.0, -e[jp] * t / kHbar);
  return std::norm(amp);
}

TrappingResult trapping_probability(const HermitianOperator& h,
                                    const HermitianOperator& r, Eigen::Index j,
                                    double t, double weight_threshold) {
  if (h.dimension() != r.dimension())
    throw ShapeError("trapping_probability: H and R differ in dimension");
  if (j < 0 || j >= r.dimension())
    throw ValidationError("trapping_probability: eigenstate index out of range");
  CVector initial;
  if (r.is_diagonal()) {
    initial = CVector::Unit(r.dimension(), j);
  } else {
    initial = diagonalize(r).vectors.col(j);
  }
  const Propagator prop(h);
  const CVector later = prop.evolve(initial, t);
  return TrappingResult{std::norm(initial.dot(later)),
                        weighted_spread(prop.spectrum(), initial, weight_threshold)};
}

}  // namespace ssblab
