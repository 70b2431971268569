#include "ssblab/phase.hpp"

#include <cmath>
#include <string>

#include "ssblab/random.hpp"

namespace ssblab {

PhaseDraw PhaseDraw::draw(std::uint64_t seed, std::size_t count,
                          std::uint64_t stream) {
  PhaseDraw d;
  d.seed_ = seed;
  d.phases_.resize(count);
  CounterRng rng(seed, stream);
  for (auto& p : d.phases_) p = kTwoPi * rng.uniform();
  return d;
}

PhaseDraw PhaseDraw::evolved(std::span<const double> energies, double t) const {
  if (energies.size() != phases_.size())
    throw ShapeError("PhaseDraw::evolved: one energy per phase required");
  PhaseDraw d = *this;
  for (std::size_t j = 0; j < phases_.size(); ++j)
    d.phases_[j] = phases_[j] - energies[j] * t / kHbar;
  return d;
}

std::vector<double> uniform_magnitudes(std::size_t count) {
  if (count == 0) throw ValidationError("uniform_magnitudes: J must be >= 1");
  return std::vector<double>(count, 1.0 / std::sqrt(static_cast<double>(count)));
}

std::vector<double> nqs_magnitudes(std::size_t count, double alpha) {
  if (count == 0) throw ValidationError("nqs_magnitudes: J must be >= 1");
  if (alpha < 0.0 || alpha > 1.0)
    throw ValidationError("nqs_magnitudes: alpha must lie in [0, 1]");
  if (count == 1) return {1.0};
  std::vector<double> m(count, std::sqrt((1.0 - alpha) / static_cast<double>(count - 1)));
  m[0] = std::sqrt(alpha);
  return m;
}

Complex overlap(std::span<const double> magnitudes_a, const PhaseDraw& a,
                std::span<const double> magnitudes_b, const PhaseDraw& b) {
  const std::size_t j = magnitudes_a.size();
  if (magnitudes_b.size() != j || a.count() != j || b.count() != j)
    throw ShapeError("overlap: states have different numbers of components");
  Complex s = 0.0;
  for (std::size_t i = 0; i < j; ++i)
    s += magnitudes_a[i] * magnitudes_b[i] * std::polar(1.0, b.phase(i) - a.phase(i));
  return s;
}

namespace {

void finish(ScalingTable& table) {
  std::vector<double> x, y;
  for (auto& row : table.rows) {
    row.standard_error = stats::standard_error(row.per_trial);
    x.push_back(static_cast<double>(row.count));
    y.push_back(row.mean);
  }
  if (table.rows.size() >= 2) table.fit = stats::log_log_fit(x, y);
}

std::vector<double> magnitudes_for(std::size_t count, std::optional<double> alpha) {
  return alpha ? nqs_magnitudes(count, *alpha) : uniform_magnitudes(count);
}

}  // namespace

ScalingTable overlap_scaling(std::span<const std::size_t> counts,
                             std::size_t trials, std::optional<double> alpha,
                             std::uint64_t base_seed) {
  if (trials == 0) throw ValidationError("overlap_scaling: need at least one trial");
  ScalingTable table;
  table.alpha = alpha;
  table.base_seed = base_seed;
  table.trials = trials;
  for (std::size_t j : counts) {
    const auto mags = magnitudes_for(j, alpha);
    ScalingRow row;
    row.count = j;
    row.per_trial.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      const auto a = PhaseDraw::draw(base_seed + t, j, 2 * j);
      const auto b = PhaseDraw::draw(base_seed + t, j, 2 * j + 1);
      row.per_trial.push_back(std::abs(overlap(mags, a, mags, b)));
    }
    row.mean = stats::mean(row.per_trial);
    table.rows.push_back(std::move(row));
  }
  finish(table);
  return table;
}

double ensemble_reduction_error(std::span<const double> magnitudes,
                                const PhaseDraw& draw, const SparseMatrix& op) {
  const auto j = static_cast<Eigen::Index>(magnitudes.size());
  if (op.rows() != j || op.cols() != j || static_cast<Eigen::Index>(draw.count()) != j)
    throw ShapeError("ensemble_reduction_error: dimension mismatch");
  CVector psi(j);
  for (Eigen::Index i = 0; i < j; ++i)
    psi[i] = std::polar(magnitudes[static_cast<std::size_t>(i)],
                        draw.phase(static_cast<std::size_t>(i)));
  // <O> minus its diagonal part is the off-diagonal sum.
  Complex off = 0.0;
  for (Eigen::Index k = 0; k < op.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(op, k); it; ++it)
      if (it.row() != it.col()) off += std::conj(psi[it.row()]) * it.value() * psi[it.col()];
  return std::abs(off);
}

SparseMatrix random_banded_hermitian(std::size_t count, std::uint64_t seed) {
  CounterRng rng(seed, 0x0b5e55edULL);
  auto disk = [&rng] {
    const double r = std::sqrt(rng.uniform());
    return std::polar(r, kTwoPi * rng.uniform());
  };
  std::vector<Triplet> t;
  const auto n = static_cast<Eigen::Index>(count);
  for (Eigen::Index i = 0; i < n; ++i) {
    t.emplace_back(i, i, Complex(2.0 * rng.uniform() - 1.0, 0.0));
    if (i + 1 < n) {
      const Complex z = disk();
      t.emplace_back(i, i + 1, z);
      t.emplace_back(i + 1, i, std::conj(z));
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix single_pair_operator(std::size_t count) {
  if (count < 2) throw ValidationError("single_pair_operator: J must be >= 2");
  const auto n = static_cast<Eigen::Index>(count);
  SparseMatrix m(n, n);
  m.insert(0, 1) = 1.0;
  m.insert(1, 0) = 1.0;
  m.makeCompressed();
  return m;
}

ScalingTable reduction_scaling(std::span<const std::size_t> counts,
                               std::size_t trials, std::optional<double> alpha,
                               const OperatorFactory& factory,
                               std::uint64_t base_seed) {
  if (trials == 0) throw ValidationError("reduction_scaling: need at least one trial");
  ScalingTable table;
  table.alpha = alpha;
  table.base_seed = base_seed;
  table.trials = trials;
  for (std::size_t j : counts) {
    const auto mags = magnitudes_for(j, alpha);
    ScalingRow row;
    row.count = j;
    double sum_sq = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const SparseMatrix op = factory(j, base_seed + t);
      const auto draw = PhaseDraw::draw(base_seed + t, j, 2 * j);
      const double e = ensemble_reduction_error(mags, draw, op);
      row.per_trial.push_back(e);
      sum_sq += e * e;
    }
    row.mean = std::sqrt(sum_sq / static_cast<double>(trials));
    table.rows.push_back(std::move(row));
  }
  finish(table);
  return table;
}

DiagonalSurvival diagonal_survival_with_nqs(double alpha,
                                            std::span<const std::size_t> counts,
                                            std::size_t trials,
                                            const OperatorFactory& factory,
                                            std::uint64_t base_seed) {
  DiagonalSurvival out;
  out.with_nqs = reduction_scaling(counts, trials, alpha, factory, base_seed);
  out.without_nqs = reduction_scaling(counts, trials, std::nullopt, factory, base_seed);
  out.exponent_difference = out.with_nqs.fit.slope - out.without_nqs.fit.slope;
  return out;
}

}  // namespace ssblab
