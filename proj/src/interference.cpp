#include "ssblab/interference.hpp"

#include <cmath>
#include <string>

#include "ssblab/stats.hpp"

namespace ssblab {
namespace {

// psi(x_g)|state> for every grid point, built from a_k|state>.
std::vector<CVector> collapsed_vectors(const ManyBodyState& state,
                                       const ModeSet& modes,
                                       BasisPtr& lower) {
  lower = FockBasis::create(state.particles() - 1, modes.mode_count());
  std::vector<CVector> lowered;
  for (int k = 0; k < modes.mode_count(); ++k)
    lowered.push_back(annihilation_matrix(state.fock_basis(), *lower, k) *
                      state.amplitudes());
  const double prefactor = 1.0 / std::sqrt(modes.volume());
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(modes.grid_points()));
  for (int g = 0; g < modes.grid_points(); ++g) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(lower->size()));
    for (int k = 0; k < modes.mode_count(); ++k)
      v += (prefactor * modes.value(k, g)) * lowered[static_cast<std::size_t>(k)];
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

ModeSet interference_modes(const InterferenceConfig& config) {
  return ModeSet(config.length, config.grid_points,
                 {config.wavenumber, -config.wavenumber}, 0);
}

ManyBodyState build_two_mode_state(int na, int nb, const ModeSet& modes) {
  if (modes.mode_count() != 2)
    throw ShapeError("build_two_mode_state: needs exactly two modes");
  if (na < 0 || nb < 0)
    throw ValidationError("build_two_mode_state: occupations must be >= 0");
  if (na + nb > InterferenceConfig::kMaxParticles)
    throw SizingError("build_two_mode_state: N_a + N_b = " +
                      std::to_string(na + nb) + " above " +
                      std::to_string(InterferenceConfig::kMaxParticles));
  const int occ[2] = {na, nb};
  return ManyBodyState::fock(FockBasis::create(na + nb, 2), occ);
}

RVector detection_probabilities(const ManyBodyState& state,
                                const ModeSet& modes) {
  if (state.particles() == 0)
    throw ValidationError("detection_probabilities: no particles left");
  BasisPtr lower;
  const auto vecs = collapsed_vectors(state, modes, lower);
  RVector p(modes.grid_points());
  for (int g = 0; g < modes.grid_points(); ++g)
    p[g] = vecs[static_cast<std::size_t>(g)].squaredNorm();
  return p / p.sum();
}

Detection detect_position(const ManyBodyState& state, const ModeSet& modes,
                          CounterRng& rng) {
  if (state.particles() == 0)
    throw ValidationError("detect_position: no particles left to detect");
  BasisPtr lower;
  auto vecs = collapsed_vectors(state, modes, lower);
  std::vector<double> cdf(vecs.size());
  double acc = 0.0;
  for (std::size_t g = 0; g < vecs.size(); ++g) cdf[g] = (acc += vecs[g].squaredNorm());
  const double u = rng.uniform() * acc;
  std::size_t pick = 0;
  while (pick + 1 < cdf.size() && cdf[pick] <= u) ++pick;
  const int g = static_cast<int>(pick);
  return Detection{g, modes.position(g),
                   ManyBodyState::normalized(lower, std::move(vecs[pick]))};
}

FringeFit fit_fringe(std::span<const double> cell_values, const ModeSet& modes) {
  const int n = modes.grid_points();
  if (static_cast<int>(cell_values.size()) != n)
    throw ShapeError("fit_fringe: one value per grid cell required");
  const double k2 = 2.0 * modes.momentum(0);
  RMatrix design(n, 3);
  RVector y(n);
  for (int g = 0; g < n; ++g) {
    const double u = k2 * modes.position(g);
    design(g, 0) = 1.0;
    design(g, 1) = std::cos(u);
    design(g, 2) = std::sin(u);
    y[g] = cell_values[static_cast<std::size_t>(g)];
  }
  const Eigen::Vector3d c = design.colPivHouseholderQr().solve(y);
  FringeFit fit;
  fit.phase = stats::wrap_angle(std::atan2(-c[2], c[1]));
  double baseline = c[0];
  double amplitude = std::hypot(c[1], c[2]);
  if (amplitude > baseline) {
    // Density cannot go negative: minimize on the boundary amplitude == baseline.
    const double w0 = design.col(0).squaredNorm();
    const double w1 = 0.5 * (design.col(1).squaredNorm() + design.col(2).squaredNorm());
    baseline = amplitude = (w0 * baseline + w1 * amplitude) / (w0 + w1);
  }
  fit.baseline = baseline;
  fit.valid = baseline > 0.0;
  fit.visibility = fit.valid ? amplitude / baseline : 0.0;
  return fit;
}

FringeFit fit_detections(std::span<const int> grid_indices, const ModeSet& modes) {
  std::vector<double> hist(static_cast<std::size_t>(modes.grid_points()), 0.0);
  for (int g : grid_indices) hist.at(static_cast<std::size_t>(g)) += 1.0;
  FringeFit fit = fit_fringe(hist, modes);
  if (grid_indices.size() < 3) fit.valid = false;
  return fit;
}

DetectionRun run_experiment(int na, int nb, int detections, std::uint64_t seed,
                            const InterferenceConfig& config) {
  if (detections < 0 || detections > na + nb)
    throw ValidationError("run_experiment: detections must lie in [0, N_a + N_b]");
  const ModeSet modes = interference_modes(config);
  DetectionRun run;
  run.seed = seed;
  run.na = na;
  run.nb = nb;
  CounterRng rng(seed);
  ManyBodyState state = build_two_mode_state(na, nb, modes);
  run.trajectory_length = 1;
  for (int d = 0; d < detections; ++d) {
    Detection det = detect_position(state, modes, rng);
    run.grid_indices.push_back(det.grid_index);
    run.positions.push_back(det.position);
    state = std::move(det.collapsed);
    ++run.trajectory_length;
  }
  run.final_particles = state.particles();
  run.fit = fit_detections(run.grid_indices, modes);
  return run;
}

PhaseStatistics phase_statistics(std::span<const DetectionRun> runs,
                                 const InterferenceConfig& config,
                                 std::size_t min_runs, double significance) {
  if (runs.size() < min_runs)
    throw ValidationError("phase_statistics: " + std::to_string(runs.size()) +
                          " runs, need at least " + std::to_string(min_runs));
  const ModeSet modes = interference_modes(config);
  const double k2 = 2.0 * modes.momentum(0);
  PhaseStatistics out;
  out.runs = runs.size();
  out.significance = significance;

  std::vector<double> thetas, vis, half_diffs;
  std::size_t agree = 0, compared = 0;
  out.pooled_histogram.assign(static_cast<std::size_t>(modes.grid_points()), 0.0);
  for (const auto& run : runs) {
    for (int g : run.grid_indices) out.pooled_histogram[static_cast<std::size_t>(g)] += 1.0;
    if (!run.fit.valid) continue;
    thetas.push_back(run.fit.phase);
    vis.push_back(run.fit.visibility);

    const std::size_t half = run.grid_indices.size() / 2;
    if (half < 3) continue;
    std::span<const int> all(run.grid_indices);
    const auto first = all.first(half);
    const auto second = all.subspan(half);
    const FringeFit f1 = fit_detections(first, modes);
    const FringeFit f2 = fit_detections(second, modes);
    if (!f1.valid || !f2.valid) continue;
    auto fringe_angles = [&](std::span<const int> idx) {
      std::vector<double> a;
      for (int g : idx) a.push_back(-k2 * modes.position(g));
      return stats::circular_summary(a);
    };
    const double se = std::hypot(fringe_angles(first).standard_error,
                                 fringe_angles(second).standard_error);
    const double diff = std::abs(stats::angle_difference(f1.phase, f2.phase));
    half_diffs.push_back(diff);
    ++compared;
    if (diff <= 1.96 * se) ++agree;
  }
  if (thetas.empty())
    throw ValidationError("phase_statistics: no run has a valid fringe fit");
  out.mean_visibility = stats::mean(vis);
  out.phase_histogram = stats::histogram_angles(thetas, 8);
  const auto chi = stats::chi_square_uniform(out.phase_histogram);
  out.phase_chi_square = chi.statistic;
  out.phase_p_value = chi.p_value;
  out.phases_uniform = chi.p_value >= significance;
  if (compared) {
    out.mean_abs_half_difference = stats::mean(half_diffs);
    out.half_agreement_fraction = static_cast<double>(agree) / static_cast<double>(compared);
  }
  const auto pooled = stats::chi_square_uniform(out.pooled_histogram);
  out.pooled_chi_square = pooled.statistic;
  out.pooled_dof = pooled.dof;
  out.pooled_p_value = pooled.p_value;
  out.pooled_uniform =
      std::abs(pooled.statistic - pooled.dof) <= 3.0 * std::sqrt(2.0 * pooled.dof);
  return out;
}

}  // namespace ssblab
