#include "ssblab/fock.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ssblab {
namespace {

// Number of ways to place n bosons in m modes.
std::size_t compositions(int n, int m) {
  if (m == 0) return n == 0 ? 1 : 0;
  return FockBasis::dimension(n, m);
}

}  // namespace

std::size_t FockBasis::dimension(int particles, int modes) {
  if (modes < 1 || particles < 0) return 0;
  // C(N+M-1, M-1) built incrementally; each partial product is itself a
  // binomial coefficient so the division is exact.
  const int k = modes - 1;
  unsigned __int128 acc = 1;
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  for (int i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned>(particles + i) / static_cast<unsigned>(i);
    if (acc > kMax) return kMax;
  }
  return static_cast<std::size_t>(acc);
}

FockBasis::FockBasis(int particles, int modes)
    : particles_(particles), modes_(modes), size_(dimension(particles, modes)) {
  occupations_.reserve(size_ * static_cast<std::size_t>(modes_));
  std::vector<int> current(static_cast<std::size_t>(modes_), 0);
  // Depth-first enumeration with the leading entry varying slowest gives
  // ascending lexicographic order.
  auto recurse = [&](auto&& self, int position, int remaining) -> void {
    if (position == modes_ - 1) {
      current[static_cast<std::size_t>(position)] = remaining;
      occupations_.insert(occupations_.end(), current.begin(), current.end());
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      current[static_cast<std::size_t>(position)] = v;
      self(self, position + 1, remaining - v);
    }
  };
  recurse(recurse, 0, particles_);
}

std::shared_ptr<const FockBasis> FockBasis::create(int particles, int modes,
                                                   std::size_t cap) {
  if (modes < 1) throw ValidationError("FockBasis: mode count must be >= 1");
  if (particles < 0)
    throw ValidationError("FockBasis: particle count must be >= 0");
  const std::size_t dim = dimension(particles, modes);
  if (dim > cap)
    throw SizingError("FockBasis: (N=" + std::to_string(particles) +
                      ", M=" + std::to_string(modes) + ") has dimension " +
                      std::to_string(dim) + " above cap " +
                      std::to_string(cap));
  return std::shared_ptr<const FockBasis>(new FockBasis(particles, modes));
}

std::size_t FockBasis::index_of(std::span<const int> occupation) const {
  if (static_cast<int>(occupation.size()) != modes_)
    throw ValidationError("FockBasis::index_of: tuple length mismatch");
  int total = 0;
  for (int n : occupation) {
    if (n < 0) throw ValidationError("FockBasis::index_of: negative occupation");
    total += n;
  }
  if (total != particles_)
    throw ValidationError("FockBasis::index_of: tuple does not sum to N");

  std::size_t index = 0;
  int remaining = particles_;
  for (int i = 0; i + 1 < modes_; ++i) {
    const int tail_modes = modes_ - i - 1;
    const int n = occupation[static_cast<std::size_t>(i)];
    for (int v = 0; v < n; ++v) index += compositions(remaining - v, tail_modes);
    remaining -= n;
  }
  return index;
}

std::size_t FockBasis::condensed_index(int mode) const {
  if (mode < 0 || mode >= modes_)
    throw ValidationError("FockBasis::condensed_index: mode out of range");
  std::vector<int> occ(static_cast<std::size_t>(modes_), 0);
  occ[static_cast<std::size_t>(mode)] = particles_;
  return index_of(occ);
}

ManyBodyState::ManyBodyState(BasisPtr basis, CVector amplitudes)
    : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
  if (!basis_) throw ValidationError("ManyBodyState: null basis");
  if (static_cast<std::size_t>(amplitudes_.size()) != basis_->size())
    throw ShapeError("ManyBodyState: amplitude count != basis size");
  const double n2 = amplitudes_.squaredNorm();
  if (std::abs(n2 - 1.0) > kNormTolerance)
    throw ValidationError("ManyBodyState: state is not normalized (norm^2 = " +
                          std::to_string(n2) + ")");
}

ManyBodyState ManyBodyState::normalized(BasisPtr basis, CVector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0)) throw ValidationError("ManyBodyState: zero vector");
  amplitudes /= n;
  return ManyBodyState(std::move(basis), std::move(amplitudes));
}

ManyBodyState ManyBodyState::fock(BasisPtr basis,
                                  std::span<const int> occupation) {
  CVector amps = CVector::Zero(static_cast<Eigen::Index>(basis->size()));
  amps[static_cast<Eigen::Index>(basis->index_of(occupation))] = 1.0;
  return ManyBodyState(std::move(basis), std::move(amps));
}

ManyBodyState ManyBodyState::with_global_phase(double theta) const {
  return ManyBodyState(basis_, amplitudes_ * std::polar(1.0, theta));
}

SparseMatrix annihilation_matrix(const FockBasis& from, const FockBasis& to,
                                 int mode) {
  if (from.modes() != to.modes())
    throw ShapeError("annihilation_matrix: mode counts differ");
  if (to.particles() != from.particles() - 1)
    throw ShapeError("annihilation_matrix: target sector must hold N-1");
  if (mode < 0 || mode >= from.modes())
    throw ValidationError("annihilation_matrix: mode out of range");
  std::vector<Triplet> entries;
  entries.reserve(from.size());
  std::vector<int> occ(static_cast<std::size_t>(from.modes()));
  for (std::size_t j = 0; j < from.size(); ++j) {
    auto src = from.occupation(j);
    const int n = src[static_cast<std::size_t>(mode)];
    if (n == 0) continue;
    std::copy(src.begin(), src.end(), occ.begin());
    occ[static_cast<std::size_t>(mode)] -= 1;
    entries.emplace_back(static_cast<Eigen::Index>(to.index_of(occ)),
                         static_cast<Eigen::Index>(j),
                         Complex(std::sqrt(static_cast<double>(n)), 0.0));
  }
  SparseMatrix m(static_cast<Eigen::Index>(to.size()),
                 static_cast<Eigen::Index>(from.size()));
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

SparseMatrix creation_matrix(const FockBasis& from, const FockBasis& to,
                             int mode) {
  return SparseMatrix(annihilation_matrix(to, from, mode).adjoint());
}

HermitianOperator number_operator(const FockBasis& basis, int mode) {
  if (mode < 0 || mode >= basis.modes())
    throw ValidationError("number_operator: mode out of range");
  RVector d(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j)
    d[static_cast<Eigen::Index>(j)] =
        basis.occupation(j)[static_cast<std::size_t>(mode)];
  return HermitianOperator::diagonal(d);
}

SectorVector apply_annihilation(const SectorVector& v, int mode) {
  if (v.basis->particles() == 0)
    throw ValidationError("apply_annihilation: state is in the zero-particle sector");
  auto target = FockBasis::create(v.basis->particles() - 1, v.basis->modes());
  CVector out = annihilation_matrix(*v.basis, *target, mode) * v.amplitudes;
  return SectorVector{std::move(target), std::move(out)};
}

SectorVector apply_annihilation(const ManyBodyState& state, int mode) {
  return apply_annihilation(SectorVector{state.basis(), state.amplitudes()},
                            mode);
}

ModeSet::ModeSet(double length, int grid_points, std::vector<int> wavenumbers,
                 int condensed_mode)
    : length_(length),
      grid_points_(grid_points),
      wavenumbers_(std::move(wavenumbers)),
      condensed_mode_(condensed_mode) {
  if (!(length_ > 0.0)) throw ValidationError("ModeSet: volume must be positive");
  if (grid_points_ < 1) throw ValidationError("ModeSet: need at least one grid point");
  if (wavenumbers_.empty()) throw ValidationError("ModeSet: no modes");
  if (condensed_mode_ < 0 || condensed_mode_ >= mode_count())
    throw ValidationError("ModeSet: condensed mode index out of range");
  for (int n : wavenumbers_)
    if (2 * std::abs(n) >= grid_points_)
      throw ValidationError("ModeSet: wavenumber " + std::to_string(n) +
                            " not resolved by " + std::to_string(grid_points_) +
                            " grid points");
  table_.resize(mode_count(), grid_points_);
  for (int k = 0; k < mode_count(); ++k)
    for (int g = 0; g < grid_points_; ++g)
      table_(k, g) = std::polar(1.0, momentum(k) * position(g));
  const double defect = orthonormality_defect();
  if (defect > kOrthonormalityTolerance)
    throw ValidationError("ModeSet: modes are not orthonormal on the grid "
                          "(duplicate wavenumbers?)");
}

ModeSet ModeSet::symmetric(int count, double length, int grid_points,
                           int condensed_mode) {
  std::vector<int> n;
  n.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) n.push_back(i == 0 ? 0 : (i % 2 ? 1 : -1) * ((i + 1) / 2));
  return ModeSet(length, grid_points, std::move(n), condensed_mode);
}

double ModeSet::orthonormality_defect() const {
  const CMatrix gram = table_.conjugate() * table_.transpose() *
                       Complex(spacing() / length_, 0.0);
  return (gram - CMatrix::Identity(mode_count(), mode_count()))
      .cwiseAbs()
      .maxCoeff();
}

SparseMatrix field_operator(const ModeSet& modes, int grid_index,
                            const FockBasis& from, const FockBasis& to) {
  if (from.modes() != modes.mode_count() || to.modes() != modes.mode_count())
    throw ShapeError("field_operator: basis mode count differs from ModeSet");
  if (grid_index < 0 || grid_index >= modes.grid_points())
    throw ValidationError("field_operator: grid index out of range");
  SparseMatrix psi(static_cast<Eigen::Index>(to.size()),
                   static_cast<Eigen::Index>(from.size()));
  const double prefactor = 1.0 / std::sqrt(modes.volume());
  for (int k = 0; k < modes.mode_count(); ++k)
    psi += annihilation_matrix(from, to, k) *
           (prefactor * modes.value(k, grid_index));
  return psi;
}

SparseMatrix field_correlator(const ModeSet& modes, int grid_prime,
                              int grid_index, const FockBasis& basis) {
  if (basis.particles() == 0)
    return SparseMatrix(static_cast<Eigen::Index>(basis.size()),
                        static_cast<Eigen::Index>(basis.size()));
  auto lower = FockBasis::create(basis.particles() - 1, basis.modes());
  const SparseMatrix psi = field_operator(modes, grid_index, basis, *lower);
  const SparseMatrix psi_prime =
      field_operator(modes, grid_prime, basis, *lower);
  return SparseMatrix(psi_prime.adjoint() * psi);
}

RVector density_profile(const ManyBodyState& state, const ModeSet& modes) {
  RVector rho = RVector::Zero(modes.grid_points());
  if (state.particles() == 0) return rho;
  auto lower = FockBasis::create(state.particles() - 1, modes.mode_count());
  std::vector<CVector> lowered;
  for (int k = 0; k < modes.mode_count(); ++k)
    lowered.push_back(annihilation_matrix(state.fock_basis(), *lower, k) *
                      state.amplitudes());
  const double inv_v = 1.0 / modes.volume();
  for (int g = 0; g < modes.grid_points(); ++g) {
    CVector acc = CVector::Zero(static_cast<Eigen::Index>(lower->size()));
    for (int k = 0; k < modes.mode_count(); ++k)
      acc += modes.value(k, g) * lowered[static_cast<std::size_t>(k)];
    rho[g] = acc.squaredNorm() * inv_v;
  }
  return rho;
}

}  // namespace ssblab
