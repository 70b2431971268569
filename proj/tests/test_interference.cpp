#include <doctest.h>

#include "ssblab/interference.hpp"
#include "ssblab/odlro.hpp"
#include "ssblab/stats.hpp"

using namespace ssblab;

namespace {

const ModeSet& modes() {
  static const ModeSet m = interference_modes();
  return m;
}

ManyBodyState two_mode(int n, const std::vector<std::pair<std::vector<int>, double>>& terms) {
  auto b = FockBasis::create(n, 2);
  CVector v = CVector::Zero(static_cast<Eigen::Index>(b->size()));
  for (const auto& [occ, amp] : terms) v[static_cast<Eigen::Index>(b->index_of(occ))] = amp;
  return ManyBodyState::normalized(b, v);
}

double modulation(const RVector& p) { return (p.maxCoeff() - p.minCoeff()) / (p.maxCoeff() + p.minCoeff()); }

}  // namespace

TEST_CASE("two-mode states") {
  const auto one = build_two_mode_state(1, 0, modes());
  CHECK(std::abs(one.amplitudes()[static_cast<Eigen::Index>(one.fock_basis().index_of(std::vector<int>{1, 0}))]) == 1.0);
  const auto s = build_two_mode_state(8, 8, modes());
  const RVector p = detection_probabilities(s, modes());
  CHECK((p.array() - 1.0 / 128).abs().maxCoeff() < 1e-14);
  const auto r = compute_rdm1(s);
  CHECK(r.eigenvalues[0] == doctest::Approx(8.0));
  CHECK(r.eigenvalues[1] == doctest::Approx(8.0));
  CHECK(std::abs(r.matrix(0, 1)) == 0.0);
  CHECK_THROWS_AS(build_two_mode_state(40, 30, modes()), SizingError);
  CHECK_THROWS_AS(build_two_mode_state(-1, 3, modes()), ValidationError);
}

TEST_CASE("detection") {
  SUBCASE("one particle in a plane wave is found anywhere") {
    const RVector p = detection_probabilities(build_two_mode_state(0, 1, modes()), modes());
    CHECK((p.array() - 1.0 / 128).abs().maxCoeff() < 1e-14);
  }
  SUBCASE("(|2,0> + |0,2>)/sqrt2: conditional density 1 + cos(2 k0 (x' + x))") {
    const auto s = two_mode(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}});
    CounterRng rng(3);
    const auto det = detect_position(s, modes(), rng);
    CHECK(det.collapsed.particles() == 1);
    const RVector p = detection_probabilities(det.collapsed, modes());
    const double k0 = modes().momentum(0);
    RVector ref(128);
    for (int g = 0; g < 128; ++g) ref[g] = 1.0 + std::cos(2 * k0 * (modes().position(g) + det.position));
    ref /= ref.sum();
    CHECK((p - ref).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("1e5 draws follow p(x)") {
    const auto s = two_mode(1, {{{1, 0}, std::sqrt(0.8)}, {{0, 1}, std::sqrt(0.2)}});
    const RVector p = detection_probabilities(s, modes());
    CounterRng rng(17);
    std::vector<double> counts(128, 0.0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) counts[static_cast<std::size_t>(detect_position(s, modes(), rng).grid_index)] += 1;
    double chi = 0;
    for (int g = 0; g < 128; ++g) {
      const double e = draws * p[g];
      chi += (counts[static_cast<std::size_t>(g)] - e) * (counts[static_cast<std::size_t>(g)] - e) / e;
    }
    CHECK(std::abs(chi - 127.0) <= 3.0 * std::sqrt(2.0 * 127.0));
  }
  SUBCASE("no particles") {
    CounterRng rng(1);
    CHECK_THROWS_AS(detect_position(build_two_mode_state(0, 0, modes()), modes(), rng), ValidationError);
  }
}

TEST_CASE("property: bookkeeping, norm and conditional fringe") {
  CounterRng rng(5);
  ManyBodyState s = build_two_mode_state(6, 5, modes());
  for (int d = 1; d <= 11; ++d) {
    auto det = detect_position(s, modes(), rng);
    s = std::move(det.collapsed);
    CHECK(s.particles() == 11 - d);
    CHECK(std::abs(s.amplitudes().norm() - 1.0) < 1e-12);
    if (d == 1) {
      const RVector p = detection_probabilities(s, modes());
      CHECK(modulation(p) > 0.05);
    }
  }
  for (int na = 1; na <= 3; ++na)
    for (int nb = 1; nb <= 3; ++nb) {
      CounterRng r(na * 10 + nb);
      const auto det = detect_position(build_two_mode_state(na, nb, modes()), modes(), r);
      CHECK(modulation(detection_probabilities(det.collapsed, modes())) > 1e-3);
    }
}

TEST_CASE("fringe fit") {
  const double k0 = modes().momentum(0);
  for (double v : {0.0, 0.3, 1.0})
    for (double theta : {0.2, 3.0, 5.9}) {
      std::vector<double> cells(128);
      for (int g = 0; g < 128; ++g) cells[static_cast<std::size_t>(g)] = 2.5 * (1 + v * std::cos(2 * k0 * modes().position(g) + theta));
      const auto f = fit_fringe(cells, modes());
      CHECK(f.valid);
      CHECK(f.baseline == doctest::Approx(2.5));
      CHECK(f.visibility == doctest::Approx(v).epsilon(1e-12));
      if (v > 0) CHECK(f.phase == doctest::Approx(theta));
    }
  SUBCASE("amplitude above the baseline is clamped to V = 1") {
    std::vector<double> cells(128, 0.0);
    cells[0] = 1;
    cells[64] = 1;
    const auto f = fit_fringe(cells, modes());
    CHECK(f.visibility == doctest::Approx(1.0));
  }
  CHECK_FALSE(fit_detections(std::vector<int>{5}, modes()).valid);
  CHECK_THROWS_AS(fit_fringe(std::vector<double>(10, 1.0), modes()), ShapeError);
}

TEST_CASE("experiments") {
  const auto a = run_experiment(16, 16, 24, 99);
  const auto b = run_experiment(16, 16, 24, 99);
  CHECK(a.grid_indices == b.grid_indices);
  CHECK(a.fit.phase == b.fit.phase);
  CHECK(a.trajectory_length == 25);
  CHECK(a.final_particles == 8);
  CHECK_FALSE(run_experiment(2, 2, 1, 1).fit.valid);
  CHECK_THROWS_AS(run_experiment(2, 2, 5, 1), ValidationError);

  std::vector<DetectionRun> runs;
  for (std::uint64_t s = 0; s < 200; ++s) runs.push_back(run_experiment(16, 16, 24, 1000 + s));
  for (const auto& r : runs) {
    CHECK(r.fit.visibility >= 0.0);
    CHECK(r.fit.visibility <= 1.0 + 1e-12);
  }
  const auto st = phase_statistics(runs);
  CHECK(st.mean_visibility >= 0.8);
  CHECK(st.phases_uniform);
  CHECK(st.pooled_uniform);

  SUBCASE("identical seeds: all phases equal, uniformity fails") {
    std::vector<DetectionRun> same(120, run_experiment(16, 16, 24, 5));
    const auto bad = phase_statistics(same);
    CHECK_FALSE(bad.phases_uniform);
  }
  SUBCASE("half/half phase difference shrinks with more detections") {
    std::vector<DetectionRun> few, many;
    for (std::uint64_t s = 0; s < 100; ++s) {
      few.push_back(run_experiment(16, 16, 12, 500 + s));
      many.push_back(run_experiment(16, 16, 32, 500 + s));
    }
    CHECK(phase_statistics(many).mean_abs_half_difference <
          phase_statistics(few).mean_abs_half_difference);
  }
  CHECK_THROWS_AS(phase_statistics(std::span<const DetectionRun>(runs).first(50)), ValidationError);
}
