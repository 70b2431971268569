#include "ssblab/fermion.hpp"

#include <bit>
#include <string>

namespace ssblab {

FermionBasis::FermionBasis(int sites) : sites_(sites) {
  if (sites < 1 || sites > kMaxSites)
    throw SizingError("FermionBasis: site count " + std::to_string(sites) +
                      " outside [1, " + std::to_string(kMaxSites) + "]");
}

int FermionBasis::count(std::uint32_t pattern, Spin s) const {
  int n = 0;
  for (int site = 0; site < sites_; ++site)
    n += static_cast<int>((pattern >> orbital(site, s)) & 1u);
  return n;
}

std::pair<int, int> FermionBasis::sector(std::size_t index) const {
  const auto p = static_cast<std::uint32_t>(index);
  return {count(p, Spin::Up), count(p, Spin::Down)};
}

std::vector<std::size_t> FermionBasis::sector_indices(int n_up,
                                                      int n_down) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (sector(i) == std::pair{n_up, n_down}) out.push_back(i);
  return out;
}

SparseMatrix FermionBasis::annihilation(int orb) const {
  if (orb < 0 || orb >= orbitals())
    throw ValidationError("FermionBasis: orbital out of range");
  std::vector<Triplet> t;
  const std::uint32_t bit = 1u << orb;
  const std::uint32_t below = bit - 1u;
  for (std::uint32_t p = 0; p < size(); ++p) {
    if (!(p & bit)) continue;
    const double sign = (std::popcount(p & below) % 2) ? -1.0 : 1.0;
    t.emplace_back(p ^ bit, p, Complex(sign, 0.0));
  }
  const auto n = static_cast<Eigen::Index>(size());
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix FermionBasis::creation(int orb) const {
  return SparseMatrix(annihilation(orb).adjoint());
}

HermitianOperator FermionBasis::number(Spin s) const {
  RVector d(static_cast<Eigen::Index>(size()));
  for (std::uint32_t p = 0; p < size(); ++p) d[p] = count(p, s);
  return HermitianOperator::diagonal(d);
}

HermitianOperator FermionBasis::total_number() const {
  RVector d(static_cast<Eigen::Index>(size()));
  for (std::uint32_t p = 0; p < size(); ++p) d[p] = std::popcount(p);
  return HermitianOperator::diagonal(d);
}

HermitianOperator build_fermion_hubbard(const FermionBasis& basis,
                                        const HubbardParameters& p) {
  if (p.sites != basis.sites())
    throw ShapeError("build_fermion_hubbard: site count differs from basis");
  const auto n = static_cast<Eigen::Index>(basis.size());
  SparseMatrix h(n, n);

  std::vector<std::pair<int, int>> bonds;
  for (int i = 0; i + 1 < p.sites; ++i) bonds.emplace_back(i, i + 1);
  if (p.periodic && p.sites >= 3) bonds.emplace_back(p.sites - 1, 0);

  for (auto [i, j] : bonds)
    for (Spin s : {Spin::Up, Spin::Down}) {
      const int a = FermionBasis::orbital(i, s);
      const int b = FermionBasis::orbital(j, s);
      SparseMatrix hop = basis.creation(a) * basis.annihilation(b);
      h += (hop + SparseMatrix(hop.adjoint())) * Complex(-p.hopping, 0.0);
    }

  RVector diag(n);
  for (std::uint32_t pat = 0; pat < basis.size(); ++pat) {
    double e = 0.0;
    for (int site = 0; site < p.sites; ++site) {
      const bool up = (pat >> FermionBasis::orbital(site, Spin::Up)) & 1u;
      const bool dn = (pat >> FermionBasis::orbital(site, Spin::Down)) & 1u;
      if (up && dn) e += p.interaction;
      e -= p.chemical_potential * (static_cast<int>(up) + static_cast<int>(dn));
    }
    diag[pat] = e;
  }
  h += HermitianOperator::diagonal(diag).matrix();
  h.prune(Complex(0.0, 0.0));
  return HermitianOperator(std::move(h));
}

SparseMatrix eta_pair_annihilator(const FermionBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  SparseMatrix eta(n, n);
  for (int site = 0; site < basis.sites(); ++site) {
    const double stagger = (site % 2) ? -1.0 : 1.0;
    eta += basis.annihilation(FermionBasis::orbital(site, Spin::Down)) *
           basis.annihilation(FermionBasis::orbital(site, Spin::Up)) *
           Complex(stagger, 0.0);
  }
  eta.prune(Complex(0.0, 0.0));
  return eta;
}

SparseMatrix eta_pair_creator(const FermionBasis& basis) {
  return SparseMatrix(eta_pair_annihilator(basis).adjoint());
}

}  // namespace ssblab
