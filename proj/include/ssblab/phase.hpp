#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ssblab/core.hpp"
#include "ssblab/stats.hpp"

namespace ssblab {

/// Phases phi_j, uniform on [0, 2 pi), fixed once drawn.
class PhaseDraw {
 public:
  /// Stream `stream` of seed `seed`; identical inputs give identical phases.
  static PhaseDraw draw(std::uint64_t seed, std::size_t count,
                        std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t count() const noexcept { return phases_.size(); }
  std::span<const double> phases() const noexcept { return phases_; }
  double phase(std::size_t j) const { return phases_.at(j); }

  /// Phases after stationary evolution phi_j -> phi_j - E_j t / hbar.
  PhaseDraw evolved(std::span<const double> energies, double t) const;

 private:
  std::uint64_t seed_ = 0;
  std::vector<double> phases_;
};

/// |Phi_j| = 1 / sqrt(J).
std::vector<double> uniform_magnitudes(std::size_t count);
/// |Phi_0|^2 = alpha, the rest share 1 - alpha equally.
std::vector<double> nqs_magnitudes(std::size_t count, double alpha);

/// <Psi(a)|Psi(b)> = sum_j |Phi_j(a)| |Phi_j(b)| e^{i (phi_j(b) - phi_j(a))}.
Complex overlap(std::span<const double> magnitudes_a, const PhaseDraw& a,
                std::span<const double> magnitudes_b, const PhaseDraw& b);

struct ScalingRow {
  std::size_t count = 0;    // J
  double mean = 0.0;        // mean (or RMS) statistic over trials
  double standard_error = 0.0;
  std::vector<double> per_trial;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  stats::LinearFit fit;  // log statistic vs log J
  std::optional<double> alpha;
  std::uint64_t base_seed = 0;
  std::size_t trials = 0;
};

/// Mean |overlap| over `trials` independent pairs for each J. Trial t draws
/// state a from seed base_seed + t (stream 2J) and b from the same seed
/// (stream 2J + 1).
ScalingTable overlap_scaling(std::span<const std::size_t> counts,
                             std::size_t trials, std::optional<double> alpha,
                             std::uint64_t base_seed);

/// |<Psi|O|Psi> - sum_j |Phi_j|^2 O_jj|.
double ensemble_reduction_error(std::span<const double> magnitudes,
                                const PhaseDraw& draw, const SparseMatrix& op);

/// Builds a J x J test operator from (J, seed).
using OperatorFactory = std::function<SparseMatrix(std::size_t, std::uint64_t)>;

/// Tridiagonal Hermitian operator with entries uniform in the unit disk
/// (real diagonal); bounded operator norm independent of J.
SparseMatrix random_banded_hermitian(std::size_t count, std::uint64_t seed);
/// O_01 = O_10 = 1, zero elsewhere.
SparseMatrix single_pair_operator(std::size_t count);

/// RMS ensemble_reduction_error over trials for each J, with the log-log fit.
ScalingTable reduction_scaling(std::span<const std::size_t> counts,
                               std::size_t trials, std::optional<double> alpha,
                               const OperatorFactory& factory,
                               std::uint64_t base_seed);

struct DiagonalSurvival {
  ScalingTable with_nqs;
  ScalingTable without_nqs;
  double exponent_difference = 0.0;
};

/// Reduction-error decay with |Phi_0|^2 = alpha versus uniform magnitudes.
DiagonalSurvival diagonal_survival_with_nqs(double alpha,
                                            std::span<const std::size_t> counts,
                                            std::size_t trials,
                                            const OperatorFactory& factory,
                                            std::uint64_t base_seed);

}  // namespace ssblab
