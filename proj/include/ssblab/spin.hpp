#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssblab/core.hpp"

namespace ssblab {

struct Coupling {
  int i;
  int j;
  double strength;
};

/// Spin-S lattice (S = 1/2 or 1) with symmetric pair couplings.
///
/// Product basis: site 0 is the most significant digit and local index 0 is
/// m = +S, so for two spin-1/2 sites the basis is |uu>, |ud>, |du>, |dd>.
class SpinLattice {
 public:
  static constexpr int kMaxSites = 14;

  SpinLattice(int sites, double spin, std::vector<Coupling> couplings,
              std::vector<int> sublattice = {});

  /// Open chain with uniform coupling J and alternating sublattices.
  static SpinLattice chain(int sites, double coupling, double spin = 0.5);

  int sites() const noexcept { return sites_; }
  double spin() const noexcept { return spin_; }
  int local_dimension() const noexcept { return static_cast<int>(2 * spin_ + 1.5); }
  Eigen::Index dimension() const noexcept { return dimension_; }
  const std::vector<Coupling>& couplings() const noexcept { return couplings_; }
  const std::vector<int>& sublattice() const noexcept { return sublattice_; }

  /// m_i of site i in product state `index`.
  double magnetic_number(Eigen::Index index, int site) const;

  /// True when the sublattice labels two-color the coupling graph.
  bool is_bipartite() const;

 private:
  int sites_;
  double spin_;
  std::vector<Coupling> couplings_;
  std::vector<int> sublattice_;
  Eigen::Index dimension_;
};

/// H = sum_bonds J_ij (S^z_i S^z_j + (S^+_i S^-_j + S^-_i S^+_j) / 2).
/// The result is checked to commute with total S^z.
HermitianOperator build_heisenberg(const SpinLattice& lattice);

enum class ObservableKind { TotalSz, StaggeredSz, Custom };

/// Relevant observable, diagonal in the product S^z basis.
/// `custom_diagonal` is required for Custom and ignored otherwise.
HermitianOperator build_relevant_observable(
    const SpinLattice& lattice, ObservableKind kind,
    const std::optional<RVector>& custom_diagonal = std::nullopt);

enum class SSBVerdict { Type1, Type2, NoSymmetry };

std::string to_string(SSBVerdict v);

struct SSBClassification {
  double commutator_norm = 0.0;
  double commutator_tolerance = 0.0;
  SSBVerdict verdict = SSBVerdict::NoSymmetry;
  int ground_degeneracy = 0;
  // Distinct R eigenvalues carried by the ground multiplet (joint basis);
  // only filled for commuting pairs.
  std::vector<double> ground_observable_values;
  double ground_energy = 0.0;
  double near_degeneracy_spread = 0.0;
  double degeneracy_tolerance = 0.0;
};

struct ClassifyOptions {
  // Absolute thresholds; when unset the relative defaults apply:
  // tol_c = 1e-10 ||H||_F ||R||_F, tol_deg = 1e-9 * spectral range.
  std::optional<double> commutator_tolerance;
  std::optional<double> degeneracy_tolerance;
  double weight_threshold = 0.01;
  Eigen::Index max_dense_dimension = 4096;
};

SSBClassification classify_ssb(const HermitianOperator& h,
                               const HermitianOperator& r,
                               const ClassifyOptions& options = {});

/// Cached spectral propagator exp(-i H t / hbar).
class Propagator {
 public:
  explicit Propagator(const HermitianOperator& h,
                      Eigen::Index max_dense_dimension = 4096);
  CVector evolve(const CVector& state, double t) const;
  const Spectrum& spectrum() const noexcept { return spectrum_; }

 private:
  Spectrum spectrum_;
};

/// Amplitudes at time t; norm is preserved to round-off.
CVector evolve(const CVector& state, const HermitianOperator& h, double t);

/// Unitary 2x2 (or larger) change of basis; row j holds <j'|j> coefficients
/// so that |j> = sum_j' U_{jj'} |j'>.
class UnitaryMixing {
 public:
  static constexpr double kTolerance = 1e-12;
  explicit UnitaryMixing(CMatrix u);
  /// Equal-weight rows: (|1'> + |2'>)/sqrt2 and (|1'> - |2'>)/sqrt2.
  static UnitaryMixing symmetric();
  /// Real rotation by `angle` with an extra relative phase.
  static UnitaryMixing rotation(double angle, double phase = 0.0);
  const CMatrix& matrix() const noexcept { return u_; }

 private:
  CMatrix u_;
};

/// Hamiltonian in the R basis for energies E' and mixing U.
HermitianOperator hamiltonian_from_mixing(const RVector& energies,
                                          const UnitaryMixing& mixing);

/// |<2|Psi(t)>|^2 for |Psi(0)> = |1>, from the mixing formula
/// |sum_j' U*_{2j'} U_{1j'} exp(-i E_j' t / hbar)|^2.
double two_state_oscillation(double e1, double e2, const UnitaryMixing& mixing,
                             double t);

struct TrappingResult {
  double probability = 1.0;
  // Energy width of the H-eigenstates holding >= weight_threshold of |j>.
  double spread = 0.0;
};

/// Probability of remaining in the j-th R eigenstate after time t.
/// When R is diagonal the eigenstate is the basis vector e_j; otherwise it
/// is the j-th eigenvector of R in ascending order.
TrappingResult trapping_probability(const HermitianOperator& h,
                                    const HermitianOperator& r, Eigen::Index j,
                                    double t, double weight_threshold = 0.01);

}  // namespace ssblab
