#pragma once

#include <string>

#include "ssblab/fock.hpp"

namespace ssblab {

/// Named many-body state constructors.
enum class RecipeKind { PureCondensate, TwoFraction, Uniform, NeelBoson, TwoMode };

RecipeKind parse_recipe_kind(const std::string& name);
std::string to_string(RecipeKind kind);

struct RecipeSpec {
  RecipeKind kind = RecipeKind::PureCondensate;
  int modes = 2;
  int condensed_mode = 0;
  double alpha = 1.0;   // TwoFraction: |Phi_1|^2
  double phase = 0.0;   // phase carried by the condensed amplitude Phi_1
  int na = 0;           // TwoMode occupations
  int nb = 0;
};

/// Builds the recipe in the N-particle sector.
///
/// PureCondensate: e^{i phase} |N in k0>.
/// TwoFraction:    sqrt(alpha) e^{i phase} |N in k0> + sqrt(1 - alpha) |spread>,
///                 where |spread> is the equal-weight superposition of the
///                 pair-displaced states |N - 2q in k0, 2q in k> (q >= 1,
///                 k != k0). No two of these differ by a single particle move,
///                 so the one-body matrix stays diagonal. Sectors with N < 2
///                 (or one mode) have no spread states and fall back to the
///                 pure condensate.
/// Uniform:        Fock state with occupations as even as possible (the first
///                 N mod M modes carry one extra particle).
/// NeelBoson:      |1, 1, ..., 1>, requires N == M.
/// TwoMode:        |na, nb> over two modes; N must equal na + nb.
ManyBodyState build_recipe(const RecipeSpec& spec, int particles);

}  // namespace ssblab
