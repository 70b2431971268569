#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "ssblab/spin.hpp"

using namespace ssblab;

namespace {

RVector eigenvalues(const CMatrix& h) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(h).eigenvalues();
}

int count_within(const RVector& e, double tol) {
  int n = 0;
  for (Eigen::Index i = 0; i < e.size(); ++i)
    if (e[i] - e[0] <= tol) ++n;
  return n;
}

}  // namespace

TEST_CASE("Heisenberg Hamiltonian matches the Kronecker oracle") {
  for (int n = 2; n <= 5; ++n)
    for (double j : {-1.0, 1.0, 0.3}) {
      const auto h = build_heisenberg(SpinLattice::chain(n, j));
      CHECK((h.dense() - oracle::heisenberg_chain(n, j)).norm() < 1e-12);
    }
}

TEST_CASE("two-site spectra") {
  SUBCASE("J = -1: triplet ground multiplet at -1/4") {
    const RVector e = eigenvalues(build_heisenberg(SpinLattice::chain(2, -1.0)).dense());
    CHECK(e[0] == doctest::Approx(-0.25));
    CHECK(count_within(e, 1e-12) == 3);
    CHECK(e[3] == doctest::Approx(0.75));
  }
  SUBCASE("J = +1: unique singlet") {
    const RVector e = eigenvalues(build_heisenberg(SpinLattice::chain(2, 1.0)).dense());
    CHECK(e[0] == doctest::Approx(-0.75));
    CHECK(count_within(e, 1e-12) == 1);
  }
  SUBCASE("J = 0 gives the zero operator") {
    CHECK(build_heisenberg(SpinLattice::chain(3, 0.0)).frobenius_norm() == 0.0);
  }
}

TEST_CASE("relevant observables") {
  const auto lat = SpinLattice::chain(2, 1.0);
  const RVector total = build_relevant_observable(lat, ObservableKind::TotalSz).diagonal_values();
  const RVector stag = build_relevant_observable(lat, ObservableKind::StaggeredSz).diagonal_values();
  CHECK(total.isApprox((RVector(4) << 1, 0, 0, -1).finished()));
  CHECK((stag - (RVector(4) << 0, 1, -1, 0).finished()).norm() == 0.0);
  const RVector custom = (RVector(4) << 3, 1, 4, 1).finished();
  CHECK(build_relevant_observable(lat, ObservableKind::Custom, custom).diagonal_values() == custom);
  CHECK_THROWS_AS(build_relevant_observable(lat, ObservableKind::Custom), ValidationError);
}

TEST_CASE("lattice validation") {
  CHECK_THROWS(SpinLattice(15, 0.5, {}));
  CHECK_THROWS(SpinLattice(3, 1.5, {}));
  CHECK_THROWS(SpinLattice(3, 0.5, {{0, 3, 1.0}}));
  CHECK(SpinLattice::chain(4, 1.0).is_bipartite());
  CHECK_FALSE(SpinLattice(3, 0.5, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}}, {0, 1, 0}).is_bipartite());
  CHECK(SpinLattice::chain(3, 1.0, 1.0).dimension() == 27);
}

TEST_CASE("classify_ssb on chains") {
  SUBCASE("FM 4-site, total Sz: TYPE1, degeneracy 5") {
    const auto lat = SpinLattice::chain(4, -1.0);
    const auto c = classify_ssb(build_heisenberg(lat),
                                build_relevant_observable(lat, ObservableKind::TotalSz));
    CHECK(c.verdict == SSBVerdict::Type1);
    CHECK(c.commutator_norm < 1e-12);
    CHECK(c.ground_degeneracy == 5);
    CHECK(c.ground_observable_values.size() == 5);
  }
  SUBCASE("AFM 4-site, staggered Sz: TYPE2") {
    const auto lat = SpinLattice::chain(4, 1.0);
    const auto h = build_heisenberg(lat);
    const auto r = build_relevant_observable(lat, ObservableKind::StaggeredSz);
    const auto c = classify_ssb(h, r);
    CHECK(c.verdict == SSBVerdict::Type2);
    CHECK(c.commutator_norm > 0.1);
    // Direct commutator evaluation.
    CHECK(c.commutator_norm ==
          doctest::Approx((h.dense() * r.dense() - r.dense() * h.dense()).norm()));
    CHECK(c.near_degeneracy_spread > 0.0);
  }
  SUBCASE("R = H commutes trivially") {
    const auto h = build_heisenberg(SpinLattice::chain(3, 1.0));
    const auto c = classify_ssb(h, h);
    CHECK(c.commutator_norm == 0.0);
    CHECK((c.verdict == SSBVerdict::Type1 || c.verdict == SSBVerdict::NoSymmetry));
  }
  SUBCASE("AFM chain with total Sz is not broken") {
    const auto lat = SpinLattice::chain(4, 1.0);
    const auto c = classify_ssb(build_heisenberg(lat),
                                build_relevant_observable(lat, ObservableKind::TotalSz));
    CHECK(c.verdict == SSBVerdict::NoSymmetry);
    CHECK(c.ground_degeneracy == 1);
  }
  SUBCASE("dense cap") {
    const auto lat = SpinLattice::chain(4, 1.0);
    ClassifyOptions opt;
    opt.max_dense_dimension = 8;
    CHECK_THROWS_AS(classify_ssb(build_heisenberg(lat),
                                 build_relevant_observable(lat, ObservableKind::StaggeredSz), opt),
                    SizingError);
  }
}

TEST_CASE("property: FM invariants for n = 2, 3, 4") {
  for (int n = 2; n <= 4; ++n) {
    const auto lat = SpinLattice::chain(n, -1.0);
    const auto h = build_heisenberg(lat);
    const auto r = build_relevant_observable(lat, ObservableKind::TotalSz);
    CHECK((h.dense() * r.dense() - r.dense() * h.dense()).norm() < 1e-12);
    const auto c = classify_ssb(h, r);
    CHECK(c.ground_degeneracy == n + 1);  // 2 n S + 1 with S = 1/2
    // Verdict invariance under R -> cR and H -> H + c.
    CHECK(classify_ssb(h, r.scaled(2.5)).verdict == c.verdict);
    CHECK(classify_ssb(h.shifted(7.0), r).verdict == c.verdict);
    CHECK(classify_ssb(h.shifted(-3.0), r.scaled(0.1)).ground_degeneracy == c.ground_degeneracy);
  }
  for (int n = 2; n <= 4; ++n) {
    const auto lat = SpinLattice::chain(n, 1.0);
    const auto h = build_heisenberg(lat);
    const auto r = build_relevant_observable(lat, ObservableKind::StaggeredSz);
    const auto c = classify_ssb(h, r);
    CHECK(classify_ssb(h, r.scaled(3.0)).verdict == c.verdict);
    CHECK(classify_ssb(h.shifted(1.5), r).verdict == c.verdict);
  }
}

TEST_CASE("property: Neel state is not an AFM eigenstate") {
  const auto lat = SpinLattice::chain(4, 1.0);
  const CMatrix h = build_heisenberg(lat).dense();
  CVector neel = CVector::Zero(16);
  neel[0b0101] = 1.0;  // up down up down
  const Complex e = neel.dot(h * neel);
  CHECK((h * neel - e * neel).norm() > 0.1);
}

TEST_CASE("time evolution") {
  const auto h = build_heisenberg(SpinLattice::chain(3, 1.0));
  SUBCASE("t = 0 is the identity") {
    const CVector v = oracle::random_vector(8, 4).normalized();
    CHECK((evolve(v, h, 0.0) - v).norm() < 1e-14);
  }
  SUBCASE("eigenstate picks up exp(-iEt)") {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h.dense());
    const CVector v = es.eigenvectors().col(2);
    const double t = 1.3;
    CHECK((evolve(v, h, t) - std::polar(1.0, -es.eigenvalues()[2] * t) * v).norm() < 1e-12);
  }
  SUBCASE("random 6-dim H at t = 0.7 matches the series propagator") {
    const CMatrix hr = oracle::random_hermitian(6, 9);
    const HermitianOperator op(hr.sparseView());
    const CVector v = oracle::random_vector(6, 10).normalized();
    CHECK((evolve(v, op, 0.7) - oracle::series_propagator(hr, 0.7) * v).norm() < 1e-9);
  }
  SUBCASE("property: unitary over 1000 composed steps") {
    const Propagator prop(h);
    CVector v = oracle::random_vector(8, 11).normalized();
    for (int s = 0; s < 1000; ++s) v = prop.evolve(v, 0.01);
    CHECK(std::abs(v.norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("two-state oscillation") {
  const auto sym = UnitaryMixing::symmetric();
  const double e1 = 1.0, e2 = 3.0;
  CHECK(two_state_oscillation(e1, e2, sym, 0.0) == doctest::Approx(0.0));
  // (E1 - E2) t / 2 = pi / 2
  CHECK(two_state_oscillation(e1, e2, sym, kPi / std::abs(e1 - e2)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  SUBCASE("generic mixing matches direct evolution") {
    const auto mix = UnitaryMixing::rotation(0.37, 1.1);
    const RVector e = (RVector(2) << -0.4, 1.7).finished();
    const auto h = hamiltonian_from_mixing(e, mix);
    const CVector start = (CVector(2) << 1.0, 0.0).finished();
    for (double t : {0.0, 0.3, 1.9, 5.0}) {
      const double direct = std::norm(evolve(start, h, t)[1]);
      CHECK(std::abs(direct - two_state_oscillation(e[0], e[1], mix, t)) < 1e-12);
    }
  }
  CHECK_THROWS(UnitaryMixing((CMatrix(2, 2) << 1, 1, 0, 1).finished()));
}

TEST_CASE("trapping probability") {
  SUBCASE("commuting pair stays trapped") {
    const auto lat = SpinLattice::chain(3, -1.0);
    const auto h = build_heisenberg(lat);
    const auto r = build_relevant_observable(lat, ObservableKind::TotalSz);
    for (double t : {0.0, 0.5, 10.0}) {
      // |uuu> is an eigenstate of both.
      CHECK(trapping_probability(h, r, 0, t).probability == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("three-level toy obeys 1 - P <= (eps t)^2") {
    for (double eps : {1e-3, 1e-2}) {
      CMatrix hm = CMatrix::Zero(3, 3);
      hm(0, 1) = hm(1, 0) = eps / 2;
      hm(2, 2) = 5.0;
      const HermitianOperator h(hm.sparseView());
      const auto r = HermitianOperator::diagonal((RVector(3) << 1, 2, 3).finished());
      for (double t : {0.1, 1.0, 10.0, 100.0}) {
        const auto res = trapping_probability(h, r, 0, t);
        CHECK(1.0 - res.probability <= (eps * t) * (eps * t) + 1e-15);
        CHECK(res.spread == doctest::Approx(eps).epsilon(1e-9));
      }
    }
  }
  SUBCASE("AFM Neel state decays on the scale 1/spread") {
    const auto lat = SpinLattice::chain(4, 1.0);
    const auto h = build_heisenberg(lat);
    const auto r = build_relevant_observable(lat, ObservableKind::StaggeredSz);
    const double spread = trapping_probability(h, r, 0b0101, 0.0).spread;
    REQUIRE(spread > 0.0);
    double previous = 1.0;
    for (int i = 1; i <= 20; ++i) {
      const double p = trapping_probability(h, r, 0b0101, i * 0.05 / spread).probability;
      CHECK(p <= previous + 1e-12);
      previous = p;
    }
    CHECK(previous < 0.9);
  }
}
