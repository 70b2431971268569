#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ssblab/fermion.hpp"
#include "ssblab/fock.hpp"
#include "ssblab/recipes.hpp"

namespace ssblab {

/// Builds the normalized N-particle sector state.
using SectorRecipe = std::function<ManyBodyState(int particles)>;

SectorRecipe make_sector_recipe(const RecipeSpec& spec);

struct NumberWindow {
  int lo = 0;
  int hi = 0;
  int width() const { return hi - lo + 1; }
};

struct EnsembleOptions {
  std::optional<NumberWindow> window;  // default: <N> +- 6 sqrt<N>, clipped at 0
  bool allow_narrow_window = false;    // skip the +- 5 sqrt<N> coverage check
  // Phase of f_N per sector; f_N is real and positive when unset.
  std::function<double(int)> phase_schedule;
};

/// Superposition sum_N f_N |Psi_N> over a truncated particle-number window,
/// |f_N|^2 Poisson(<N>) renormalized on the window.
class CoherentEnsemble {
 public:
  static CoherentEnsemble build(double mean_n, const SectorRecipe& recipe,
                                const EnsembleOptions& options = {});

  static NumberWindow default_window(double mean_n);

  double mean_n() const noexcept { return mean_n_; }
  const NumberWindow& window() const noexcept { return window_; }
  int modes() const noexcept { return modes_; }
  Complex weight(int n) const { return weights_.at(slot(n)); }
  const ManyBodyState& sector(int n) const { return sectors_.at(slot(n)); }

  /// sum_N |f_N|^2 N and its standard deviation.
  double weight_mean() const;
  double weight_stddev() const;
  double weight_norm() const;

  /// Offset of sector N inside the direct-sum space; total dimension.
  Eigen::Index offset(int n) const { return offsets_.at(slot(n)); }
  Eigen::Index dimension() const noexcept { return dimension_; }
  /// sum_N f_N |Psi_N> as one vector on the direct sum.
  CVector full_vector() const;

 private:
  std::size_t slot(int n) const;

  double mean_n_ = 0.0;
  NumberWindow window_;
  int modes_ = 0;
  std::vector<Complex> weights_;
  std::vector<ManyBodyState> sectors_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index dimension_ = 0;
};

/// Block-diagonal operator on the direct sum from a per-sector family.
using SectorOperatorFamily = std::function<SparseMatrix(const FockBasis&)>;
SparseMatrix block_diagonal_operator(const CoherentEnsemble& ens,
                                     const SectorOperatorFamily& family);

struct NumberConservingExpectation {
  Complex blocked;  // sum_N |f_N|^2 <Psi_N|O_N|Psi_N>
  Complex naive;    // <Psi_c|O|Psi_c> on the full direct sum
};

/// Throws ContractError if `op` couples different particle-number sectors.
NumberConservingExpectation expectation_number_conserving(
    const CoherentEnsemble& ens, const SparseMatrix& op);

/// psi(x_g) on the direct sum (sector N -> N-1 blocks inside the window).
SparseMatrix ensemble_field_operator(const CoherentEnsemble& ens,
                                     const ModeSet& modes, int grid_index);

struct FieldExpectation {
  Complex value;
  bool single_sector = false;  // <psi> vanishes identically for fixed N
};

/// <psi(x_g)> = sum_N f_{N-1}^* f_N <Psi_{N-1}|psi(x_g)|Psi_N>.
FieldExpectation expectation_field(const CoherentEnsemble& ens,
                                   const ModeSet& modes, int grid_index);

struct FieldVersusMacroscopic {
  CVector field;             // <psi(x)> on every grid point
  CVector macroscopic;       // W(x) = sqrt(<N>/V) Phi_1 b_k0(x)
  double max_modulus_gap;    // max_x | |<psi(x)>| - |W(x)| |
  bool single_sector = false;
};

/// Compares <psi(x)> with W built from the sector nearest <N>.
FieldVersusMacroscopic compare_field_with_macroscopic(
    const CoherentEnsemble& ens, const ModeSet& modes);

/// Local operator B(x): the field psi(x) or the on-site pair psi(x) psi(x).
enum class LocalOperatorKind { Field, Pair };

struct OdlroEquivalence {
  Complex coherent_side;  // <Psi_c| B^dagger(x') B(x) |Psi_c>, full space
  Complex sector_side;    // sum_N |f_N|^2 <Psi_N| B^dagger(x') B(x) |Psi_N>
  double difference;
  bool equal;
};

OdlroEquivalence csa_odlro_equivalence(const CoherentEnsemble& ens,
                                       const ModeSet& modes,
                                       LocalOperatorKind kind, int grid_prime,
                                       int grid_index,
                                       double tolerance = 1e-12);

struct ConstraintRow {
  double energy;
  Complex lhs;       // <[H, A]>
  Complex expect_b;
  Complex expect_c;
  Complex rhs;       // gamma_B <B> + gamma_C <C>
};

struct ConstraintReport {
  Complex gamma_b;
  Complex gamma_c;
  double identity_residual = 0.0;  // ||[H,A] - gamma_B B - gamma_C C||_F
  std::vector<ConstraintRow> rows;
  double max_abs_lhs = 0.0;
  double max_abs_rhs = 0.0;
  double max_abs_b = 0.0;
  double max_abs_c = 0.0;
  bool single_operator = false;  // gamma_C = 0, gamma_B != 0
  double tolerance = 1e-10;
  bool consistent = false;       // every |lhs| and |rhs| below tolerance
};

/// Verifies [H, A] = gamma_B B + gamma_C C as a matrix identity (throws
/// ContractError with the residual otherwise), then evaluates both sides in
/// every eigenstate of H.
ConstraintReport commutator_constraint_check(const HermitianOperator& h,
                                             const SparseMatrix& a,
                                             const SparseMatrix& b,
                                             const SparseMatrix& c,
                                             Complex gamma_b, Complex gamma_c,
                                             double tolerance = 1e-10);

/// Hubbard chain with A = B = eta^dagger, gamma_B = U - 2 mu, C = 0.
ConstraintReport eta_pairing_constraint(const HubbardParameters& p,
                                        double tolerance = 1e-10);

}  // namespace ssblab
