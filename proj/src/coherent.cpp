#include "ssblab/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssblab/odlro.hpp"

namespace ssblab {
namespace {

void append_block(std::vector<Triplet>& out, const SparseMatrix& block,
                  Eigen::Index row0, Eigen::Index col0) {
  for (int k = 0; k < block.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(block, k); it; ++it)
      out.emplace_back(row0 + it.row(), col0 + it.col(), it.value());
}

// u_p(x) = c_p b_k1(x) b_k2(x) over the unordered pair index of an RDM2.
CVector pair_amplitudes(const ReducedDensityMatrix& rdm2, const ModeSet& modes,
                        int grid_index) {
  CVector u(static_cast<Eigen::Index>(rdm2.pairs.size()));
  for (std::size_t p = 0; p < rdm2.pairs.size(); ++p) {
    const auto [k1, k2] = rdm2.pairs[p];
    const double c = k1 == k2 ? 1.0 : std::sqrt(2.0);
    u[static_cast<Eigen::Index>(p)] =
        c * modes.value(k1, grid_index) * modes.value(k2, grid_index);
  }
  return u;
}

}  // namespace

SectorRecipe make_sector_recipe(const RecipeSpec& spec) {
  return [spec](int n) { return build_recipe(spec, n); };
}

NumberWindow CoherentEnsemble::default_window(double mean_n) {
  const double half = 6.0 * std::sqrt(mean_n);
  return NumberWindow{std::max(0, static_cast<int>(std::floor(mean_n - half))),
                      static_cast<int>(std::ceil(mean_n + half))};
}

CoherentEnsemble CoherentEnsemble::build(double mean_n,
                                         const SectorRecipe& recipe,
                                         const EnsembleOptions& options) {
  if (!(mean_n > 0.0))
    throw ValidationError("coherent ensemble: <N> must be positive");
  CoherentEnsemble ens;
  ens.mean_n_ = mean_n;
  ens.window_ = options.window.value_or(default_window(mean_n));
  if (ens.window_.lo < 0 || ens.window_.hi < ens.window_.lo)
    throw ValidationError("coherent ensemble: invalid window");
  if (!options.allow_narrow_window) {
    const double half = 5.0 * std::sqrt(mean_n);
    const double need_lo = std::max(0.0, mean_n - half);
    if (ens.window_.lo > need_lo || ens.window_.hi < mean_n + half)
      throw ValidationError(
          "coherent ensemble: window [" + std::to_string(ens.window_.lo) + ", " +
          std::to_string(ens.window_.hi) +
          "] does not cover <N> +- 5 sqrt<N>; set allow_narrow_window to override");
  }

  // Poisson weights in log space, renormalized on the window.
  std::vector<double> logw;
  for (int n = ens.window_.lo; n <= ens.window_.hi; ++n)
    logw.push_back(-mean_n + n * std::log(mean_n) - std::lgamma(n + 1.0));
  const double top = *std::max_element(logw.begin(), logw.end());
  double total = 0.0;
  for (double& w : logw) total += (w = std::exp(w - top));
  for (std::size_t i = 0; i < logw.size(); ++i) {
    const int n = ens.window_.lo + static_cast<int>(i);
    const double phase = options.phase_schedule ? options.phase_schedule(n) : 0.0;
    ens.weights_.push_back(std::polar(std::sqrt(logw[i] / total), phase));
  }

  for (int n = ens.window_.lo; n <= ens.window_.hi; ++n) {
    try {
      ManyBodyState s = recipe(n);
      if (s.particles() != n)
        throw ValidationError("recipe returned a state with " +
                              std::to_string(s.particles()) + " particles");
      if (ens.sectors_.empty()) ens.modes_ = s.fock_basis().modes();
      if (s.fock_basis().modes() != ens.modes_)
        throw ValidationError("recipe changed the mode count");
      ens.offsets_.push_back(ens.dimension_);
      ens.dimension_ += static_cast<Eigen::Index>(s.fock_basis().size());
      ens.sectors_.push_back(std::move(s));
    } catch (const Error& e) {
      throw ValidationError("coherent ensemble: recipe failed for N = " +
                            std::to_string(n) + ": " + e.what());
    }
  }
  return ens;
}

std::size_t CoherentEnsemble::slot(int n) const {
  if (n < window_.lo || n > window_.hi)
    throw ValidationError("coherent ensemble: N = " + std::to_string(n) +
                          " outside the window");
  return static_cast<std::size_t>(n - window_.lo);
}

double CoherentEnsemble::weight_norm() const {
  double s = 0.0;
  for (auto w : weights_) s += std::norm(w);
  return s;
}

double CoherentEnsemble::weight_mean() const {
  double m = 0.0;
  for (int n = window_.lo; n <= window_.hi; ++n) m += std::norm(weight(n)) * n;
  return m;
}

double CoherentEnsemble::weight_stddev() const {
  const double m = weight_mean();
  double v = 0.0;
  for (int n = window_.lo; n <= window_.hi; ++n)
    v += std::norm(weight(n)) * (n - m) * (n - m);
  return std::sqrt(v);
}

CVector CoherentEnsemble::full_vector() const {
  CVector v(dimension_);
  for (int n = window_.lo; n <= window_.hi; ++n) {
    const auto& s = sector(n);
    v.segment(offset(n), s.amplitudes().size()) = weight(n) * s.amplitudes();
  }
  return v;
}

SparseMatrix block_diagonal_operator(const CoherentEnsemble& ens,
                                     const SectorOperatorFamily& family) {
  std::vector<Triplet> t;
  for (int n = ens.window().lo; n <= ens.window().hi; ++n) {
    const FockBasis& basis = ens.sector(n).fock_basis();
    const SparseMatrix block = family(basis);
    const auto d = static_cast<Eigen::Index>(basis.size());
    if (block.rows() != d || block.cols() != d)
      throw ShapeError("block_diagonal_operator: family block has wrong size");
    append_block(t, block, ens.offset(n), ens.offset(n));
  }
  SparseMatrix op(ens.dimension(), ens.dimension());
  op.setFromTriplets(t.begin(), t.end());
  return op;
}

NumberConservingExpectation expectation_number_conserving(
    const CoherentEnsemble& ens, const SparseMatrix& op) {
  if (op.rows() != ens.dimension() || op.cols() != ens.dimension())
    throw ShapeError("expectation_number_conserving: operator size mismatch");
  const auto& w = ens.window();
  std::vector<int> sector_of(static_cast<std::size_t>(ens.dimension()));
  for (int n = w.lo; n <= w.hi; ++n) {
    const auto size = static_cast<Eigen::Index>(ens.sector(n).fock_basis().size());
    for (Eigen::Index i = 0; i < size; ++i)
      sector_of[static_cast<std::size_t>(ens.offset(n) + i)] = n;
  }
  double leak = 0.0;
  for (int k = 0; k < op.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(op, k); it; ++it)
      if (sector_of[static_cast<std::size_t>(it.row())] !=
          sector_of[static_cast<std::size_t>(it.col())])
        leak = std::max(leak, std::abs(it.value()));
  if (leak > 0.0)
    throw ContractError("expectation_number_conserving: operator couples "
                        "different particle-number sectors",
                        leak);

  NumberConservingExpectation out;
  out.blocked = 0.0;
  for (int n = w.lo; n <= w.hi; ++n) {
    const auto& s = ens.sector(n);
    const auto d = s.amplitudes().size();
    const SparseMatrix block = op.block(ens.offset(n), ens.offset(n), d, d);
    out.blocked += std::norm(ens.weight(n)) * expectation(block, s.amplitudes());
  }
  const CVector v = ens.full_vector();
  out.naive = v.dot(op * v);
  return out;
}

SparseMatrix ensemble_field_operator(const CoherentEnsemble& ens,
                                     const ModeSet& modes, int grid_index) {
  std::vector<Triplet> t;
  for (int n = ens.window().lo + 1; n <= ens.window().hi; ++n)
    append_block(t,
                 field_operator(modes, grid_index, ens.sector(n).fock_basis(),
                                ens.sector(n - 1).fock_basis()),
                 ens.offset(n - 1), ens.offset(n));
  SparseMatrix op(ens.dimension(), ens.dimension());
  op.setFromTriplets(t.begin(), t.end());
  return op;
}

FieldExpectation expectation_field(const CoherentEnsemble& ens,
                                   const ModeSet& modes, int grid_index) {
  if (ens.modes() != modes.mode_count())
    throw ShapeError("expectation_field: ModeSet and ensemble disagree");
  FieldExpectation out;
  out.value = 0.0;
  out.single_sector = ens.window().width() < 2;
  for (int n = ens.window().lo + 1; n <= ens.window().hi; ++n) {
    const auto& upper = ens.sector(n);
    const auto& lower = ens.sector(n - 1);
    const SparseMatrix psi =
        field_operator(modes, grid_index, upper.fock_basis(), lower.fock_basis());
    out.value += std::conj(ens.weight(n - 1)) * ens.weight(n) *
                 lower.amplitudes().dot(psi * upper.amplitudes());
  }
  return out;
}

FieldVersusMacroscopic compare_field_with_macroscopic(
    const CoherentEnsemble& ens, const ModeSet& modes) {
  FieldVersusMacroscopic out;
  const int g_count = modes.grid_points();
  out.field.resize(g_count);
  for (int g = 0; g < g_count; ++g) {
    const auto fe = expectation_field(ens, modes, g);
    out.field[g] = fe.value;
    out.single_sector = fe.single_sector;
  }
  const int n_ref = std::clamp(static_cast<int>(std::lround(ens.mean_n())),
                               ens.window().lo, ens.window().hi);
  const auto& ref = ens.sector(n_ref);
  const Complex phi1 =
      ref.amplitude(ref.fock_basis().condensed_index(modes.condensed_mode()));
  out.macroscopic = modes.table().row(modes.condensed_mode()).transpose() *
                    (std::sqrt(ens.mean_n() / modes.volume()) * phi1);
  out.max_modulus_gap =
      (out.field.cwiseAbs() - out.macroscopic.cwiseAbs()).cwiseAbs().maxCoeff();
  return out;
}

OdlroEquivalence csa_odlro_equivalence(const CoherentEnsemble& ens,
                                       const ModeSet& modes,
                                       LocalOperatorKind kind, int grid_prime,
                                       int grid_index, double tolerance) {
  if (ens.modes() != modes.mode_count())
    throw ShapeError("csa_odlro_equivalence: ModeSet and ensemble disagree");
  const int removed = kind == LocalOperatorKind::Field ? 1 : 2;
  const auto& w = ens.window();

  // Full-space route: B maps the window [lo, hi] into the lowered sectors
  // [lo - n, hi - n]; the expectation is the inner product of B(x')|Psi_c>
  // and B(x)|Psi_c> with no assumption about sector structure.
  std::vector<Eigen::Index> target_offset;
  std::vector<BasisPtr> targets;
  Eigen::Index target_dim = 0;
  for (int n = w.lo; n <= w.hi; ++n) {
    const int m = n - removed;
    target_offset.push_back(target_dim);
    if (m < 0) {
      targets.push_back(nullptr);
      continue;
    }
    targets.push_back(FockBasis::create(m, ens.modes()));
    target_dim += static_cast<Eigen::Index>(targets.back()->size());
  }
  auto build_b = [&](int g) {
    std::vector<Triplet> t;
    for (int n = w.lo; n <= w.hi; ++n) {
      const auto i = static_cast<std::size_t>(n - w.lo);
      if (!targets[i]) continue;
      const FockBasis& from = ens.sector(n).fock_basis();
      SparseMatrix block;
      if (kind == LocalOperatorKind::Field) {
        block = field_operator(modes, g, from, *targets[i]);
      } else {
        auto mid = FockBasis::create(n - 1, ens.modes());
        block = field_operator(modes, g, *mid, *targets[i]) *
                field_operator(modes, g, from, *mid);
      }
      append_block(t, block, target_offset[i], ens.offset(n));
    }
    SparseMatrix b(target_dim, ens.dimension());
    b.setFromTriplets(t.begin(), t.end());
    return b;
  };
  const CVector v = ens.full_vector();
  OdlroEquivalence out;
  out.coherent_side = (build_b(grid_prime) * v).dot(build_b(grid_index) * v);

  // Sector route: reduced density matrices of each fixed-N state.
  out.sector_side = 0.0;
  for (int n = w.lo; n <= w.hi; ++n) {
    if (n < removed) continue;
    const auto& s = ens.sector(n);
    Complex value;
    if (kind == LocalOperatorKind::Field) {
      const CMatrix kernel = compute_rdm1(s, modes).position_kernel(modes);
      value = kernel(grid_prime, grid_index);
    } else {
      const auto rdm2 = compute_rdm2(s);
      const CVector up = pair_amplitudes(rdm2, modes, grid_prime);
      const CVector u = pair_amplitudes(rdm2, modes, grid_index);
      value = up.dot(rdm2.matrix.transpose() * u) /
              (modes.volume() * modes.volume());
    }
    out.sector_side += std::norm(ens.weight(n)) * value;
  }
  out.difference = std::abs(out.coherent_side - out.sector_side);
  out.equal = out.difference <= tolerance;
  return out;
}

ConstraintReport commutator_constraint_check(const HermitianOperator& h,
                                             const SparseMatrix& a,
                                             const SparseMatrix& b,
                                             const SparseMatrix& c,
                                             Complex gamma_b, Complex gamma_c,
                                             double tolerance) {
  const Eigen::Index d = h.dimension();
  for (const SparseMatrix* m : {&a, &b, &c})
    if (m->rows() != d || m->cols() != d)
      throw ShapeError("commutator_constraint_check: operator size mismatch");

  ConstraintReport report;
  report.gamma_b = gamma_b;
  report.gamma_c = gamma_c;
  report.tolerance = tolerance;
  const SparseMatrix ha = commutator(h.matrix(), a);
  const SparseMatrix rhs_op = b * gamma_b + c * gamma_c;
  report.identity_residual = frobenius_norm(SparseMatrix(ha - rhs_op));
  const double scale = std::max(1.0, frobenius_norm(ha));
  if (report.identity_residual > tolerance * scale)
    throw ContractError("commutator identity [H, A] = gB B + gC C fails "
                        "(residual " + std::to_string(report.identity_residual) + ")",
                        report.identity_residual);
  report.single_operator = gamma_c == Complex(0.0) && gamma_b != Complex(0.0);

  const Spectrum spectrum = diagonalize(h);
  for (Eigen::Index k = 0; k < d; ++k) {
    const CVector v = spectrum.vectors.col(k);
    ConstraintRow row;
    row.energy = spectrum.energies[k];
    row.lhs = expectation(ha, v);
    row.expect_b = expectation(b, v);
    row.expect_c = expectation(c, v);
    row.rhs = gamma_b * row.expect_b + gamma_c * row.expect_c;
    report.max_abs_lhs = std::max(report.max_abs_lhs, std::abs(row.lhs));
    report.max_abs_rhs = std::max(report.max_abs_rhs, std::abs(row.rhs));
    report.max_abs_b = std::max(report.max_abs_b, std::abs(row.expect_b));
    report.max_abs_c = std::max(report.max_abs_c, std::abs(row.expect_c));
    report.rows.push_back(row);
  }
  report.consistent =
      report.max_abs_lhs < tolerance && report.max_abs_rhs < tolerance;
  return report;
}

ConstraintReport eta_pairing_constraint(const HubbardParameters& p,
                                        double tolerance) {
  const FermionBasis basis(p.sites);
  const HermitianOperator h = build_fermion_hubbard(basis, p);
  const SparseMatrix eta_dag = eta_pair_creator(basis);
  const SparseMatrix zero(eta_dag.rows(), eta_dag.cols());
  return commutator_constraint_check(
      h, eta_dag, eta_dag, zero,
      Complex(p.interaction - 2.0 * p.chemical_potential, 0.0), Complex(0.0),
      tolerance);
}

}  // namespace ssblab
