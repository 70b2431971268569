#include <doctest.h>

#include "oracles.hpp"
#include "ssblab/coherent.hpp"

using namespace ssblab;

namespace {

RecipeSpec recipe(RecipeKind kind, double alpha = 1.0, double phase = 0.0) {
  RecipeSpec s;
  s.kind = kind;
  s.modes = 2;
  s.alpha = alpha;
  s.phase = phase;
  return s;
}

CoherentEnsemble ensemble(double mean, const RecipeSpec& spec, EnsembleOptions opt = {}) {
  return CoherentEnsemble::build(mean, make_sector_recipe(spec), opt);
}

}  // namespace

TEST_CASE("Poisson weights") {
  const auto ens = ensemble(9.0, recipe(RecipeKind::PureCondensate));
  CHECK(ens.window().lo == 0);
  CHECK(ens.window().hi == 27);
  CHECK(ens.weight_stddev() >= 2.85);
  CHECK(ens.weight_stddev() <= 3.15);
  CHECK(ens.weight_norm() == doctest::Approx(1.0).epsilon(1e-14));
  const auto ref = oracle::windowed_poisson(9.0, 0, 27);
  double mean = 0;
  for (int n = 0; n <= 27; ++n) {
    CHECK(std::norm(ens.weight(n)) == doctest::Approx(ref[static_cast<std::size_t>(n)]).epsilon(1e-12));
    mean += n * ref[static_cast<std::size_t>(n)];
  }
  CHECK(ens.weight_mean() == doctest::Approx(mean).epsilon(1e-12));
  SUBCASE("single-sector window") {
    EnsembleOptions opt;
    opt.window = NumberWindow{5, 5};
    opt.allow_narrow_window = true;
    const auto one = ensemble(9.0, recipe(RecipeKind::PureCondensate), opt);
    CHECK(std::abs(one.weight(5) - 1.0) < 1e-15);
  }
  SUBCASE("narrow window is refused without the override") {
    EnsembleOptions opt;
    opt.window = NumberWindow{8, 10};
    CHECK_THROWS_AS(ensemble(9.0, recipe(RecipeKind::PureCondensate), opt), ValidationError);
  }
  SUBCASE("all-condensed recipe passes through") {
    for (int n = 0; n <= 27; n += 9) {
      const auto& s = ens.sector(n);
      CHECK(std::abs(std::abs(s.amplitudes()[static_cast<Eigen::Index>(s.fock_basis().condensed_index(0))]) - 1.0) < 1e-15);
    }
  }
}

TEST_CASE("number-conserving expectations") {
  const auto modes = ModeSet::symmetric(2, 1.5, 8, 0);
  const auto ens = ensemble(9.0, recipe(RecipeKind::PureCondensate));
  SUBCASE("N gives the windowed mean, identity gives 1") {
    const auto num = block_diagonal_operator(ens, [](const FockBasis& b) {
      SparseMatrix m(static_cast<Eigen::Index>(b.size()), static_cast<Eigen::Index>(b.size()));
      m.setIdentity();
      return SparseMatrix(m * Complex(b.particles()));
    });
    const auto e = expectation_number_conserving(ens, num);
    CHECK(std::abs(e.blocked - ens.weight_mean()) < 1e-12);
    CHECK(std::abs(e.naive - ens.weight_mean()) < 1e-12);
    const auto id = block_diagonal_operator(ens, [](const FockBasis& b) {
      SparseMatrix m(static_cast<Eigen::Index>(b.size()), static_cast<Eigen::Index>(b.size()));
      m.setIdentity();
      return m;
    });
    CHECK(std::abs(expectation_number_conserving(ens, id).blocked - 1.0) < 1e-13);
  }
  SUBCASE("field correlator of the condensate is <N>/V everywhere") {
    for (int gp : {0, 3})
      for (int g : {1, 6}) {
        const auto op = block_diagonal_operator(
            ens, [&](const FockBasis& b) { return field_correlator(modes, gp, g, b); });
        const auto e = expectation_number_conserving(ens, op);
        CHECK(std::abs(e.blocked - ens.weight_mean() / modes.volume()) < 1e-12);
        CHECK(std::abs(e.blocked - e.naive) < 1e-12);
      }
  }
  SUBCASE("sector-coupling operators are rejected") {
    CHECK_THROWS_AS(expectation_number_conserving(ens, ensemble_field_operator(ens, modes, 2)),
                    ContractError);
  }
}

TEST_CASE("field expectation across sectors") {
  const auto modes = ModeSet::symmetric(2, 2.0, 8, 0);
  SUBCASE("fixed N gives exactly zero") {
    EnsembleOptions opt;
    opt.window = NumberWindow{4, 4};
    opt.allow_narrow_window = true;
    const auto one = ensemble(4.0, recipe(RecipeKind::TwoFraction, 0.5), opt);
    for (int g = 0; g < modes.grid_points(); ++g) {
      const auto f = expectation_field(one, modes, g);
      CHECK(f.single_sector);
      CHECK(f.value == Complex(0.0, 0.0));
    }
  }
  SUBCASE("all-condensed, <N> = 9: exact window sum") {
    const auto ens = ensemble(9.0, recipe(RecipeKind::PureCondensate));
    const auto ref = oracle::windowed_poisson(9.0, 0, 27);
    double expected = 0;
    for (int n = 1; n <= 27; ++n)
      expected += std::sqrt(ref[static_cast<std::size_t>(n - 1)] * ref[static_cast<std::size_t>(n)]) *
                  std::sqrt(n / modes.volume());
    const auto cmp = compare_field_with_macroscopic(ens, modes);
    for (int g = 0; g < modes.grid_points(); ++g)
      CHECK(std::abs(cmp.field[g] - expected) < 1e-12);
    // W = sqrt(<N>/V) Phi_1, close to but not the same as the window sum.
    CHECK(std::abs(std::abs(cmp.macroscopic[0]) - std::sqrt(9.0 / modes.volume())) < 1e-12);
    CHECK(cmp.max_modulus_gap == doctest::Approx(std::abs(expected - std::sqrt(9.0 / modes.volume()))));
  }
  SUBCASE("alpha = 0.5 recipe: |<psi>| differs from |W|") {
    const auto ens = ensemble(9.0, recipe(RecipeKind::TwoFraction, 0.5));
    CHECK(compare_field_with_macroscopic(ens, modes).max_modulus_gap > 1e-3);
  }
  SUBCASE("property: operator-norm bound") {
    for (auto kind : {RecipeKind::PureCondensate, RecipeKind::TwoFraction, RecipeKind::Uniform}) {
      const auto ens = ensemble(9.0, recipe(kind, 0.5));
      for (int g = 0; g < modes.grid_points(); ++g)
        CHECK(std::abs(expectation_field(ens, modes, g).value) <=
              std::sqrt(ens.window().hi / modes.volume()) + 1e-12);
    }
  }
  SUBCASE("property: gauge action") {
    const auto a = ensemble(9.0, recipe(RecipeKind::PureCondensate, 1.0, 0.0));
    const auto b = ensemble(9.0, recipe(RecipeKind::PureCondensate, 1.0, 0.9));
    for (int g = 0; g < modes.grid_points(); ++g)
      CHECK(std::abs(expectation_field(a, modes, g).value - expectation_field(b, modes, g).value) < 1e-12);

    // Shift sector 9 alone by theta: terms N = 9 and N = 10 rotate oppositely.
    const double theta = 0.6;
    const int n0 = 9;
    EnsembleOptions opt;
    opt.phase_schedule = [&](int n) { return n == n0 ? theta : 0.0; };
    const auto c = ensemble(9.0, recipe(RecipeKind::PureCondensate), opt);
    const auto ref = oracle::windowed_poisson(9.0, 0, 27);
    auto term = [&](int n) {
      return std::sqrt(ref[static_cast<std::size_t>(n - 1)] * ref[static_cast<std::size_t>(n)]) *
             std::sqrt(n / modes.volume()) * modes.value(0, 3);
    };
    const Complex expected = expectation_field(a, modes, 3).value +
                             (std::polar(1.0, theta) - 1.0) * term(n0) +
                             (std::polar(1.0, -theta) - 1.0) * term(n0 + 1);
    CHECK(std::abs(expectation_field(c, modes, 3).value - expected) < 1e-12);
  }
}

TEST_CASE("coherent route equals the sector route for B^dag(x') B(x)") {
  const auto modes = ModeSet::symmetric(2, 1.0, 8, 0);
  const double rho = 9.0 / modes.volume();
  SUBCASE("all-condensed") {
    const auto ens = ensemble(9.0, recipe(RecipeKind::PureCondensate));
    const auto e = csa_odlro_equivalence(ens, modes, LocalOperatorKind::Field, 1, 5);
    CHECK(e.equal);
    CHECK(std::abs(e.sector_side - ens.weight_mean() / modes.volume()) < 1e-12);
    CHECK(std::abs(e.sector_side) == doctest::Approx(rho).epsilon(1e-3));
  }
  for (auto kind : {RecipeKind::Uniform, RecipeKind::TwoFraction, RecipeKind::PureCondensate}) {
    const auto ens = ensemble(9.0, recipe(kind, 0.5));
    for (auto op : {LocalOperatorKind::Field, LocalOperatorKind::Pair})
      for (int gp : {0, 2})
        for (int g : {0, 5}) {
          const auto e = csa_odlro_equivalence(ens, modes, op, gp, g);
          CHECK(e.difference < 1e-12);
          CHECK(e.equal);
        }
  }
}

TEST_CASE("commutator constraints") {
  SUBCASE("eta pairing, L = 2 and 3") {
    for (int sites : {2, 3}) {
      HubbardParameters p{sites, 1.0, 4.0, 0.5, false};
      const auto r = eta_pairing_constraint(p);
      CHECK(r.identity_residual < 1e-10);
      CHECK(r.single_operator);
      CHECK(r.consistent);
      CHECK(std::abs(r.gamma_b - 3.0) < 1e-15);
      CHECK(r.rows.size() == (sites == 2 ? 16u : 64u));
      CHECK(r.max_abs_b < 1e-10);
      const double bnorm = frobenius_norm(eta_pair_creator(FermionBasis(sites)));
      double worst = 0;
      for (const auto& row : r.rows) worst = std::max(worst, std::abs(row.rhs));
      CHECK(worst < 1e-10 * std::abs(r.gamma_b) * bnorm);
    }
  }
  SUBCASE("A commuting with H is trivially consistent") {
    FermionBasis b(2);
    const auto h = build_fermion_hubbard(b, {2, 1.0, 2.0, 0.0, false});
    const SparseMatrix n = b.total_number().matrix();
    const SparseMatrix zero(n.rows(), n.cols());
    const auto r = commutator_constraint_check(h, n, zero, zero, 0.0, 0.0);
    CHECK(r.identity_residual == 0.0);
    CHECK_FALSE(r.single_operator);
    CHECK(r.consistent);
  }
  SUBCASE("synthetic two-operator right-hand side") {
    const CMatrix hm = oracle::random_hermitian(6, 3);
    CMatrix am(6, 6);
    for (int c = 0; c < 6; ++c) am.col(c) = oracle::random_vector(6, 40 + c);
    const CMatrix k = hm * am - am * hm;
    const CMatrix bm = (k + k.adjoint()) / 2.0;
    const CMatrix cm = (k - k.adjoint()) / Complex(0, 2);
    const auto r = commutator_constraint_check(HermitianOperator(hm.sparseView()), am.sparseView(),
                                               bm.sparseView(), cm.sparseView(), 1.0, Complex(0, 1));
    CHECK(r.identity_residual < 1e-12);
    for (const auto& row : r.rows) CHECK(std::abs(row.lhs - row.rhs) < 1e-10);
    CHECK(r.consistent);
  }
  SUBCASE("a false identity is a contract violation") {
    HubbardParameters p{3, 1.0, 4.0, 0.5, true};  // odd ring: not bipartite
    CHECK_THROWS_AS(eta_pairing_constraint(p), ContractError);
  }
}
