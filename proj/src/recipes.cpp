#include "ssblab/recipes.hpp"

#include <cmath>

namespace ssblab {

RecipeKind parse_recipe_kind(const std::string& name) {
  if (name == "pure-condensate" || name == "all-condensed") return RecipeKind::PureCondensate;
  if (name == "two-fraction" || name == "mixed") return RecipeKind::TwoFraction;
  if (name == "uniform") return RecipeKind::Uniform;
  if (name == "neel-boson") return RecipeKind::NeelBoson;
  if (name == "two-mode") return RecipeKind::TwoMode;
  throw ValidationError("unknown state recipe '" + name + "'");
}

std::string to_string(RecipeKind kind) {
  switch (kind) {
    case RecipeKind::PureCondensate: return "pure-condensate";
    case RecipeKind::TwoFraction: return "two-fraction";
    case RecipeKind::Uniform: return "uniform";
    case RecipeKind::NeelBoson: return "neel-boson";
    case RecipeKind::TwoMode: return "two-mode";
  }
  return "?";
}

ManyBodyState build_recipe(const RecipeSpec& spec, int particles) {
  if (spec.modes < 1) throw ValidationError("recipe: need at least one mode");
  if (spec.condensed_mode < 0 || spec.condensed_mode >= spec.modes)
    throw ValidationError("recipe: condensed mode out of range");
  const int m = spec.modes;
  const auto k0 = static_cast<std::size_t>(spec.condensed_mode);

  switch (spec.kind) {
    case RecipeKind::PureCondensate:
    case RecipeKind::TwoFraction: {
      if (spec.alpha < 0.0 || spec.alpha > 1.0)
        throw ValidationError("recipe: alpha must lie in [0, 1]");
      auto basis = FockBasis::create(particles, m);
      CVector amps = CVector::Zero(static_cast<Eigen::Index>(basis->size()));
      const Complex phase = std::polar(1.0, spec.phase);
      const auto condensed = static_cast<Eigen::Index>(basis->condensed_index(spec.condensed_mode));
      std::vector<Eigen::Index> spread;
      if (spec.kind == RecipeKind::TwoFraction) {
        std::vector<int> occ(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) {
          if (static_cast<std::size_t>(k) == k0) continue;
          for (int q = 1; 2 * q <= particles; ++q) {
            std::fill(occ.begin(), occ.end(), 0);
            occ[k0] = particles - 2 * q;
            occ[static_cast<std::size_t>(k)] = 2 * q;
            spread.push_back(static_cast<Eigen::Index>(basis->index_of(occ)));
          }
        }
      }
      if (spread.empty()) {
        amps[condensed] = phase;
      } else {
        amps[condensed] = std::sqrt(spec.alpha) * phase;
        const double each = std::sqrt((1.0 - spec.alpha) / static_cast<double>(spread.size()));
        for (auto i : spread) amps[i] = each;
      }
      return ManyBodyState(std::move(basis), std::move(amps));
    }
    case RecipeKind::Uniform: {
      auto basis = FockBasis::create(particles, m);
      std::vector<int> occ(static_cast<std::size_t>(m), particles / m);
      for (int k = 0; k < particles % m; ++k) occ[static_cast<std::size_t>(k)] += 1;
      return ManyBodyState::fock(std::move(basis), occ);
    }
    case RecipeKind::NeelBoson: {
      if (particles != m)
        throw ValidationError("neel-boson recipe needs N == M (one boson per mode)");
      auto basis = FockBasis::create(particles, m);
      std::vector<int> occ(static_cast<std::size_t>(m), 1);
      return ManyBodyState::fock(std::move(basis), occ);
    }
    case RecipeKind::TwoMode: {
      if (m != 2) throw ValidationError("two-mode recipe needs exactly two modes");
      if (spec.na < 0 || spec.nb < 0 || spec.na + spec.nb != particles)
        throw ValidationError("two-mode recipe: na + nb must equal N");
      auto basis = FockBasis::create(particles, 2);
      const int occ[2] = {spec.na, spec.nb};
      return ManyBodyState::fock(std::move(basis), occ);
    }
  }
  throw ValidationError("recipe: unhandled kind");
}

}  // namespace ssblab
