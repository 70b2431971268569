#pragma once

#include <cstdint>
#include <vector>

#include "ssblab/core.hpp"

namespace ssblab {

enum class Spin { Up = 0, Down = 1 };

/// Full Fock space of spin-1/2 fermions on L <= 4 sites.
///
/// Orbital index is 2 * site + spin (site-major, spin-minor). A basis state
/// is the bit pattern of occupied orbitals and its index equals the pattern.
/// Creation/annihilation signs follow the Jordan-Wigner string over all
/// lower-indexed orbitals.
class FermionBasis {
 public:
  static constexpr int kMaxSites = 4;

  explicit FermionBasis(int sites);

  int sites() const noexcept { return sites_; }
  int orbitals() const noexcept { return 2 * sites_; }
  std::size_t size() const noexcept { return std::size_t{1} << orbitals(); }
  static int orbital(int site, Spin s) { return 2 * site + static_cast<int>(s); }

  int count(std::uint32_t pattern, Spin s) const;
  /// (N_up, N_down) label of a basis state.
  std::pair<int, int> sector(std::size_t index) const;
  /// Indices of the fixed-(N_up, N_down) block, ascending.
  std::vector<std::size_t> sector_indices(int n_up, int n_down) const;

  SparseMatrix annihilation(int orbital) const;
  SparseMatrix creation(int orbital) const;
  HermitianOperator number(Spin s) const;
  HermitianOperator total_number() const;

 private:
  int sites_;
};

struct HubbardParameters {
  int sites = 2;
  double hopping = 1.0;
  double interaction = 0.0;
  double chemical_potential = 0.0;
  bool periodic = false;  // closes the chain; only meaningful for L >= 3
};

/// H = -t sum_<ij>,s (c+_is c_js + h.c.) + U sum_i n_iu n_id - mu sum_is n_is
/// on a chain.
HermitianOperator build_fermion_hubbard(const FermionBasis& basis,
                                        const HubbardParameters& p);

/// eta = sum_i (-1)^i c_{i,down} c_{i,up}. Its adjoint obeys
/// [H, eta^dagger] = (U - 2 mu) eta^dagger on a bipartite (open) chain.
SparseMatrix eta_pair_annihilator(const FermionBasis& basis);
SparseMatrix eta_pair_creator(const FermionBasis& basis);

}  // namespace ssblab
