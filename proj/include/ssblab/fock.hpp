#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ssblab/core.hpp"

namespace ssblab {

/// Occupation-number basis of N bosons in M modes.
///
/// Tuples are stored in ascending lexicographic order, so (N=2, M=2) gives
/// (0,2), (1,1), (2,0). `index_of` is the exact inverse of `occupation`,
/// computed by combinatorial ranking rather than a hash table.
class FockBasis {
 public:
  static constexpr std::size_t kDefaultCap = 1'000'000;

  static std::shared_ptr<const FockBasis> create(int particles, int modes,
                                                 std::size_t cap = kDefaultCap);

  int particles() const noexcept { return particles_; }
  int modes() const noexcept { return modes_; }
  std::size_t size() const noexcept { return size_; }

  std::span<const int> occupation(std::size_t index) const {
    return {occupations_.data() + index * static_cast<std::size_t>(modes_),
            static_cast<std::size_t>(modes_)};
  }

  /// Index of an occupation tuple; throws ValidationError if the tuple has
  /// the wrong length, a negative entry, or the wrong particle number.
  std::size_t index_of(std::span<const int> occupation) const;

  /// Index of the state with every particle in `mode`.
  std::size_t condensed_index(int mode) const;

  /// binomial(N + M - 1, M - 1), saturating at SIZE_MAX.
  static std::size_t dimension(int particles, int modes);

 private:
  FockBasis(int particles, int modes);

  int particles_;
  int modes_;
  std::size_t size_;
  std::vector<int> occupations_;  // size_ * modes_, row-major
};

using BasisPtr = std::shared_ptr<const FockBasis>;

/// Amplitude vector over a Fock basis with no normalization requirement
/// (the result of applying a ladder or field operator).
struct SectorVector {
  BasisPtr basis;
  CVector amplitudes;

  double norm_squared() const { return amplitudes.squaredNorm(); }
};

/// Normalized many-body state over a Fock basis.
class ManyBodyState {
 public:
  static constexpr double kNormTolerance = 1e-12;

  /// Throws ValidationError unless sum |amp|^2 = 1 within kNormTolerance.
  ManyBodyState(BasisPtr basis, CVector amplitudes);

  /// Rescales a nonzero vector to unit norm.
  static ManyBodyState normalized(BasisPtr basis, CVector amplitudes);
  static ManyBodyState normalized(SectorVector v) {
    return normalized(std::move(v.basis), std::move(v.amplitudes));
  }

  /// Fock product state |n_0, ..., n_{M-1}>.
  static ManyBodyState fock(BasisPtr basis, std::span<const int> occupation);

  const BasisPtr& basis() const noexcept { return basis_; }
  const FockBasis& fock_basis() const noexcept { return *basis_; }
  const CVector& amplitudes() const noexcept { return amplitudes_; }
  Complex amplitude(std::size_t index) const {
    return amplitudes_[static_cast<Eigen::Index>(index)];
  }
  int particles() const noexcept { return basis_->particles(); }

  /// Same state multiplied by e^{i theta}.
  ManyBodyState with_global_phase(double theta) const;

 private:
  BasisPtr basis_;
  CVector amplitudes_;
};

/// Sparse matrix of a_k from the N-sector into the (N-1)-sector.
SparseMatrix annihilation_matrix(const FockBasis& from, const FockBasis& to,
                                 int mode);

/// Sparse matrix of a_k^dagger from the N-sector into the (N+1)-sector.
SparseMatrix creation_matrix(const FockBasis& from, const FockBasis& to,
                             int mode);

/// Diagonal number operator n_k on one sector.
HermitianOperator number_operator(const FockBasis& basis, int mode);

/// a_k |state>, an unnormalized vector in the (N-1)-sector.
/// Throws ValidationError when the state has no particles.
SectorVector apply_annihilation(const ManyBodyState& state, int mode);
SectorVector apply_annihilation(const SectorVector& v, int mode);

/// Plane-wave single-particle modes on a uniform periodic 1-D grid.
///
/// b_k(x) = exp(i k x) with k = 2 pi n_k / L, so that the field operator
/// psi(x) = V^{-1/2} sum_k b_k(x) a_k carries the 1/sqrt(V) prefactor and
/// the grid orthonormality reads (dx / V) sum_x b_k^*(x) b_k'(x) = delta.
class ModeSet {
 public:
  static constexpr double kOrthonormalityTolerance = 1e-10;

  /// `wavenumbers` are the integers n_k; they must be distinct modulo the
  /// grid size and satisfy |n_k| < grid_points / 2.
  ModeSet(double length, int grid_points, std::vector<int> wavenumbers,
          int condensed_mode);

  /// Modes with wavenumbers 0, +1, -1, +2, -2, ... (first `count`).
  static ModeSet symmetric(int count, double length, int grid_points,
                           int condensed_mode = 0);

  int mode_count() const noexcept { return static_cast<int>(wavenumbers_.size()); }
  int grid_points() const noexcept { return grid_points_; }
  double volume() const noexcept { return length_; }
  double spacing() const noexcept { return length_ / grid_points_; }
  int condensed_mode() const noexcept { return condensed_mode_; }
  int wavenumber(int mode) const { return wavenumbers_.at(static_cast<std::size_t>(mode)); }
  double momentum(int mode) const { return kTwoPi * wavenumber(mode) / length_; }
  double position(int grid_index) const { return grid_index * spacing(); }

  /// b_k(x_g).
  Complex value(int mode, int grid_index) const {
    return table_(mode, grid_index);
  }
  const CMatrix& table() const noexcept { return table_; }

  /// max_{k,k'} |(dx/V) sum_x b_k^* b_k' - delta_kk'|.
  double orthonormality_defect() const;

 private:
  double length_;
  int grid_points_;
  std::vector<int> wavenumbers_;
  int condensed_mode_;
  CMatrix table_;  // modes x grid
};

/// psi(x_g) as a sparse map from the N-sector to the (N-1)-sector.
SparseMatrix field_operator(const ModeSet& modes, int grid_index,
                            const FockBasis& from, const FockBasis& to);

/// psi^dagger(x_g') psi(x_g) on one sector, via the two field maps.
SparseMatrix field_correlator(const ModeSet& modes, int grid_prime,
                              int grid_index, const FockBasis& basis);

/// <psi^dagger(x) psi(x)> on every grid point, computed from psi(x)|state>.
RVector density_profile(const ManyBodyState& state, const ModeSet& modes);

}  // namespace ssblab
