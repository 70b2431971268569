#include "ssblab/odlro.hpp"

#include <cmath>
#include <string>

namespace ssblab {
namespace {

void attach_spectrum(ReducedDensityMatrix& rdm) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(rdm.matrix);
  const Eigen::Index n = rdm.matrix.rows();
  rdm.eigenvalues = solver.eigenvalues().reverse();
  rdm.eigenvectors = solver.eigenvectors().rowwise().reverse();
  (void)n;
}

// Gram matrix G(i, j) = <v_j | v_i>.
CMatrix gram(const std::vector<CVector>& v) {
  const auto n = static_cast<Eigen::Index>(v.size());
  CMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = v[static_cast<std::size_t>(j)].dot(v[static_cast<std::size_t>(i)]);
  return g;
}

}  // namespace

CMatrix ReducedDensityMatrix::position_kernel(const ModeSet& modes) const {
  if (order != 1)
    throw ValidationError("position_kernel: only defined for the one-body RDM");
  if (modes.mode_count() != matrix.rows())
    throw ShapeError("position_kernel: ModeSet has a different mode count");
  const CMatrix& b = modes.table();
  return b.adjoint() * matrix.transpose() * b / modes.volume();
}

ReducedDensityMatrix compute_rdm1(const ManyBodyState& state) {
  if (state.particles() == 0)
    throw ValidationError("compute_rdm1: zero-particle state has no RDM");
  const FockBasis& basis = state.fock_basis();
  auto lower = FockBasis::create(basis.particles() - 1, basis.modes());
  std::vector<CVector> lowered;
  for (int k = 0; k < basis.modes(); ++k)
    lowered.push_back(annihilation_matrix(basis, *lower, k) * state.amplitudes());
  ReducedDensityMatrix rdm;
  rdm.order = 1;
  rdm.particles = basis.particles();
  rdm.matrix = gram(lowered);
  attach_spectrum(rdm);
  return rdm;
}

ReducedDensityMatrix compute_rdm1(const ManyBodyState& state,
                                  const ModeSet& modes) {
  if (modes.mode_count() != state.fock_basis().modes())
    throw ShapeError("compute_rdm1: ModeSet and basis disagree on mode count");
  return compute_rdm1(state);
}

ReducedDensityMatrix compute_rdm2(const ManyBodyState& state) {
  const FockBasis& basis = state.fock_basis();
  if (basis.particles() < 2)
    throw ValidationError("compute_rdm2: needs at least two particles");
  auto mid = FockBasis::create(basis.particles() - 1, basis.modes());
  auto low = FockBasis::create(basis.particles() - 2, basis.modes());
  std::vector<SparseMatrix> first, second;
  for (int k = 0; k < basis.modes(); ++k) {
    first.push_back(annihilation_matrix(basis, *mid, k));
    second.push_back(annihilation_matrix(*mid, *low, k));
  }
  ReducedDensityMatrix rdm;
  rdm.order = 2;
  rdm.particles = basis.particles();
  std::vector<CVector> pair_vectors;
  for (int k1 = 0; k1 < basis.modes(); ++k1)
    for (int k2 = k1; k2 < basis.modes(); ++k2) {
      const double c = (k1 == k2) ? 1.0 : std::sqrt(2.0);
      const auto u1 = static_cast<std::size_t>(k1), u2 = static_cast<std::size_t>(k2);
      pair_vectors.push_back(c * (second[u1] * (first[u2] * state.amplitudes())));
      rdm.pairs.emplace_back(k1, k2);
    }
  rdm.matrix = gram(pair_vectors);
  attach_spectrum(rdm);
  return rdm;
}

OdlroVerdict detect_odlro(const ReducedDensityMatrix& rdm, int particles,
                          double threshold) {
  OdlroVerdict v;
  v.threshold = threshold;
  v.alpha = order_parameter(rdm, particles);
  v.present = v.alpha >= threshold;
  return v;
}

double order_parameter(const ReducedDensityMatrix& rdm1, int particles) {
  if (rdm1.order != 1)
    throw ValidationError("order_parameter: expects a one-body RDM");
  if (particles <= 0) throw ValidationError("order_parameter: N must be positive");
  return rdm1.largest() / particles;
}

MacroscopicWavefunction extract_macroscopic_wavefunction(
    const ManyBodyState& state, const ModeSet& modes, double floor) {
  const FockBasis& basis = state.fock_basis();
  if (basis.modes() != modes.mode_count())
    throw ShapeError("macroscopic wavefunction: ModeSet and basis disagree");
  const int k0 = modes.condensed_mode();
  const Complex phi1 = state.amplitude(basis.condensed_index(k0));
  MacroscopicWavefunction w;
  w.condensate_amplitude = phi1;
  w.condensate_fraction = std::norm(phi1);
  w.particles = basis.particles();
  w.volume = modes.volume();
  w.spacing = modes.spacing();
  if (w.condensate_fraction < floor)
    throw NoCondensateError("no nucleated state: |Phi_1|^2 = " +
                            std::to_string(w.condensate_fraction) +
                            " below floor " + std::to_string(floor));
  const Complex scale = std::sqrt(basis.particles() / modes.volume()) * phi1;
  w.values = modes.table().row(k0).transpose() * scale;
  return w;
}

FactorizationResidual factorization_residual(const ManyBodyState& state,
                                             const ModeSet& modes,
                                             double floor) {
  const auto w = extract_macroscopic_wavefunction(state, modes, floor);
  const CMatrix kernel = compute_rdm1(state, modes).position_kernel(modes);
  const CMatrix factor = w.values.conjugate() * w.values.transpose();
  FactorizationResidual r;
  r.residual = (kernel - factor).cwiseAbs().maxCoeff();
  r.alpha = w.condensate_fraction;
  r.depletion_scale = w.particles * (1.0 - w.condensate_fraction) / modes.volume();
  return r;
}

RVector periodic_divergence(const RVector& field, double spacing) {
  const Eigen::Index n = field.size();
  RVector div(n);
  for (Eigen::Index g = 0; g < n; ++g)
    div[g] = (field[(g + 1) % n] - field[(g + n - 1) % n]) / (2.0 * spacing);
  return div;
}

TwoFluidDecomposition two_fluid(const ManyBodyState& state,
                                const ModeSet& modes, double mass,
                                double floor) {
  if (!(mass > 0.0)) throw ValidationError("two_fluid: mass must be positive");
  if (modes.grid_points() < 3)
    throw ValidationError("two_fluid: central differences need >= 3 grid points");
  const auto w = extract_macroscopic_wavefunction(state, modes, floor);
  const Eigen::Index n = modes.grid_points();
  const double dx = modes.spacing();
  TwoFluidDecomposition out;
  out.mass = mass;
  out.spacing = dx;
  out.total_density = density_profile(state, modes);
  out.superfluid_density = w.values.cwiseAbs2();
  out.superfluid_current.resize(n);
  for (Eigen::Index g = 0; g < n; ++g) {
    const Complex grad = (w.values[(g + 1) % n] - w.values[(g + n - 1) % n]) / (2.0 * dx);
    out.superfluid_current[g] = kHbar / mass * (std::conj(w.values[g]) * grad).imag();
  }
  out.normal_density = out.total_density - out.superfluid_density;
  return out;
}

NqsProjection nqs_projection_probability(const ManyBodyState& state,
                                         int condensed_mode, int group_size) {
  if (group_size < 1)
    throw ValidationError("nqs_projection_probability: group size must be >= 1");
  const FockBasis& basis = state.fock_basis();
  if (basis.particles() % group_size != 0)
    throw ValidationError("nqs_projection_probability: N = " +
                          std::to_string(basis.particles()) +
                          " does not split into groups of " +
                          std::to_string(group_size));
  NqsProjection p;
  p.group_size = group_size;
  p.alpha = std::norm(state.amplitude(basis.condensed_index(condensed_mode)));

  // Target: (G^dagger)^{N/n} |vac> with G^dagger = (a_k0^dagger)^n, the
  // n-particle group built from the condensed single-particle state.
  auto current = FockBasis::create(0, basis.modes());
  CVector target = CVector::Ones(1);
  for (int added = 0; added < basis.particles(); ++added) {
    auto next = FockBasis::create(added + 1, basis.modes());
    target = creation_matrix(*current, *next, condensed_mode) * target;
    current = std::move(next);
  }
  target.normalize();
  p.probability = std::norm(target.dot(state.amplitudes()));
  p.alpha_power = std::pow(p.alpha, group_size);
  return p;
}

}  // namespace ssblab
