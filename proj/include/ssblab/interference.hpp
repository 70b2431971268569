#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ssblab/fock.hpp"
#include "ssblab/random.hpp"

namespace ssblab {

/// Geometry of the two-condensate experiment: modes +k0 and -k0 on a
/// periodic grid of `grid_points` cells over one box length.
struct InterferenceConfig {
  int grid_points = 128;
  double length = 1.0;
  int wavenumber = 1;  // k0 = 2 pi wavenumber / length
  static constexpr int kMaxParticles = 64;
};

/// Mode 0 = +k0 (condensate a), mode 1 = -k0 (condensate b).
ModeSet interference_modes(const InterferenceConfig& config = {});

/// Fock product |N_a, N_b> over the +-k0 pair.
ManyBodyState build_two_mode_state(int na, int nb, const ModeSet& modes);

/// p(x_g) proportional to <psi^dagger(x_g) psi(x_g)>, normalized to sum 1.
RVector detection_probabilities(const ManyBodyState& state, const ModeSet& modes);

struct Detection {
  int grid_index;
  double position;
  ManyBodyState collapsed;  // psi(x)|state>, renormalized, N - 1 particles
};

/// Samples x from p(x) by inverse CDF on one uniform draw and collapses the
/// state with the field operator.
Detection detect_position(const ManyBodyState& state, const ModeSet& modes,
                          CounterRng& rng);

struct FringeFit {
  bool valid = false;       // false for fewer than three detections
  double visibility = 0.0;  // V_f
  double phase = 0.0;       // theta in [0, 2 pi)
  double baseline = 0.0;
};

/// Least squares of per-cell values against baseline (1 + V cos(2 k0 x + theta))
/// using the regressors (1, cos 2k0x, sin 2k0x), constrained to V <= 1.
FringeFit fit_fringe(std::span<const double> cell_values, const ModeSet& modes);

/// Fit of the histogram of detected grid cells; flagged invalid for
/// fewer than three detections.
FringeFit fit_detections(std::span<const int> grid_indices, const ModeSet& modes);

struct DetectionRun {
  std::uint64_t seed = 0;
  int na = 0;
  int nb = 0;
  std::vector<int> grid_indices;
  std::vector<double> positions;
  std::size_t trajectory_length = 0;  // states visited, initial included
  int final_particles = 0;
  FringeFit fit;
};

DetectionRun run_experiment(int na, int nb, int detections, std::uint64_t seed,
                            const InterferenceConfig& config = {});

struct PhaseStatistics {
  std::size_t runs = 0;
  double mean_visibility = 0.0;
  // Across runs: chi-square of fitted phases on 8 bins.
  std::vector<double> phase_histogram;
  double phase_chi_square = 0.0;
  double phase_p_value = 0.0;
  bool phases_uniform = false;  // p >= significance
  double significance = 0.01;
  // Within runs: first-half versus second-half fitted phase.
  double mean_abs_half_difference = 0.0;
  double half_agreement_fraction = 0.0;  // |dtheta| <= 1.96 combined std err
  // Pooled detection histogram over every run.
  std::vector<double> pooled_histogram;
  double pooled_chi_square = 0.0;
  int pooled_dof = 0;
  double pooled_p_value = 0.0;
  bool pooled_uniform = false;  // |chi2 - dof| <= 3 sqrt(2 dof)
};

/// Throws ValidationError for fewer than `min_runs` runs.
PhaseStatistics phase_statistics(std::span<const DetectionRun> runs,
                                 const InterferenceConfig& config = {},
                                 std::size_t min_runs = 100,
                                 double significance = 0.01);

}  // namespace ssblab
