#pragma once

#include <vector>

#include "ssblab/fock.hpp"

namespace ssblab {

/// One- or two-particle reduced density matrix in the mode basis, with its
/// spectral decomposition (eigenvalues descending).
///
/// Order 1: rho(k, k') = <a_k'^dagger a_k>, so that the position kernel is
///   <psi^dagger(x') psi(x)> = V^{-1} sum_kk' rho(k, k') b_k'^*(x') b_k(x).
/// Order 2: pair index p = (k1 <= k2), A_p = c_p a_k1 a_k2 with c_p = 1 on
///   diagonal pairs and sqrt(2) otherwise, rho(p, q) = <A_q^dagger A_p>. This
///   is the ordered-pair matrix restricted to the symmetric subspace, so its
///   spectrum and trace N(N-1) match the ordered convention.
struct ReducedDensityMatrix {
  int order = 1;
  int particles = 0;
  CMatrix matrix;
  RVector eigenvalues;
  CMatrix eigenvectors;
  std::vector<std::pair<int, int>> pairs;  // order 2 only

  double largest() const { return eigenvalues.size() ? eigenvalues[0] : 0.0; }
  double trace() const { return matrix.trace().real(); }

  /// <psi^dagger(x') psi(x)> as a grid x grid matrix, row x', column x.
  CMatrix position_kernel(const ModeSet& modes) const;
};

ReducedDensityMatrix compute_rdm1(const ManyBodyState& state,
                                  const ModeSet& modes);
ReducedDensityMatrix compute_rdm1(const ManyBodyState& state);

ReducedDensityMatrix compute_rdm2(const ManyBodyState& state);

struct OdlroVerdict {
  bool present = false;
  double alpha = 0.0;  // lambda_1 / N
  double threshold = 0.1;
};

/// Present iff lambda_1 / N >= threshold.
OdlroVerdict detect_odlro(const ReducedDensityMatrix& rdm, int particles,
                          double threshold = 0.1);

/// lambda_1 / N.
double order_parameter(const ReducedDensityMatrix& rdm1, int particles);

/// W(x) = sqrt(N/V) Phi_1 b_k0(x) with Phi_1 = <N in k0 | Psi>.
struct MacroscopicWavefunction {
  CVector values;
  Complex condensate_amplitude;
  double condensate_fraction = 0.0;  // |Phi_1|^2
  int particles = 0;
  double volume = 1.0;
  double spacing = 1.0;

  /// sum_x |W(x)|^2 dx.
  double integrated_norm() const { return values.squaredNorm() * spacing; }
};

/// Throws NoCondensateError when |Phi_1|^2 < floor.
class NoCondensateError : public Error {
 public:
  using Error::Error;
};

MacroscopicWavefunction extract_macroscopic_wavefunction(
    const ManyBodyState& state, const ModeSet& modes, double floor = 1e-6);

struct FactorizationResidual {
  double residual = 0.0;        // max_{x',x} |rho1(x',x) - W^*(x') W(x)|
  double depletion_scale = 0.0; // N (1 - alpha) / V
  double alpha = 0.0;
};

FactorizationResidual factorization_residual(const ManyBodyState& state,
                                             const ModeSet& modes,
                                             double floor = 1e-6);

struct TwoFluidDecomposition {
  RVector total_density;
  RVector superfluid_density;
  RVector superfluid_current;
  RVector normal_density;
  double mass = 1.0;
  double hbar = kHbar;
  double spacing = 1.0;
};

/// Superfluid current (hbar/m) Im(W^* dW/dx) with second-order central
/// differences on the periodic grid; normal density = total - |W|^2.
TwoFluidDecomposition two_fluid(const ManyBodyState& state,
                                const ModeSet& modes, double mass = 1.0,
                                double floor = 1e-6);

/// Periodic central-difference divergence of a grid field.
RVector periodic_divergence(const RVector& field, double spacing);

struct NqsProjection {
  int group_size = 1;
  double probability = 0.0;   // |<target|Psi>|^2
  double alpha = 0.0;         // |Phi_1|^2
  double alpha_power = 0.0;   // alpha^group_size, for comparison only
};

/// Probability that all particles sit in the condensed mode as groups of
/// `group_size`. For bosons in a single mode the n = 1 and n = 2 targets are
/// the same Fock state; both numbers are reported, no relation is asserted.
NqsProjection nqs_projection_probability(const ManyBodyState& state,
                                         int condensed_mode, int group_size);

}  // namespace ssblab
