#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

#include "ssblab/coherent.hpp"
#include "ssblab/fermion.hpp"
#include "ssblab/interference.hpp"
#include "ssblab/odlro.hpp"
#include "ssblab/phase.hpp"
#include "ssblab/recipes.hpp"
#include "ssblab/spin.hpp"

namespace py = pybind11;
using namespace ssblab;

namespace {

RecipeSpec make_spec(const std::string& kind, int modes, int condensed_mode,
                     double alpha, double phase, int na, int nb) {
  RecipeSpec s;
  s.kind = parse_recipe_kind(kind);
  s.modes = modes;
  s.condensed_mode = condensed_mode;
  s.alpha = alpha;
  s.phase = phase;
  s.na = na;
  s.nb = nb;
  return s;
}

ObservableKind parse_observable(const std::string& name) {
  if (name == "total-sz") return ObservableKind::TotalSz;
  if (name == "staggered-sz") return ObservableKind::StaggeredSz;
  throw ValidationError("unknown observable '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact numerics for symmetry breaking, ODLRO and condensate interference";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<SizingError>(m, "SizingError", error.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
  py::register_exception<ContractError>(m, "ContractError", error.ptr());
  py::register_exception<NoCondensateError>(m, "NoCondensateError", error.ptr());

  py::class_<HermitianOperator>(m, "HermitianOperator")
      .def_property_readonly("dimension", &HermitianOperator::dimension)
      .def("dense", &HermitianOperator::dense)
      .def("frobenius_norm", &HermitianOperator::frobenius_norm);

  // fock-core
  // pybind11 holders cannot be pointer-to-const; the basis is immutable anyway.
  py::class_<FockBasis, std::shared_ptr<FockBasis>>(m, "FockBasis")
      .def_static("create",
                  [](int n, int modes, std::size_t cap) {
                    return std::const_pointer_cast<FockBasis>(FockBasis::create(n, modes, cap));
                  },
                  py::arg("particles"), py::arg("modes"),
                  py::arg("cap") = FockBasis::kDefaultCap)
      .def_static("dimension", &FockBasis::dimension)
      .def_property_readonly("particles", &FockBasis::particles)
      .def_property_readonly("modes", &FockBasis::modes)
      .def("__len__", &FockBasis::size)
      .def("occupation",
           [](const FockBasis& b, std::size_t i) {
             if (i >= b.size()) throw py::index_error("basis index out of range");
             const auto o = b.occupation(i);
             return std::vector<int>(o.begin(), o.end());
           })
      .def("index_of", [](const FockBasis& b, const std::vector<int>& occ) {
        return b.index_of(occ);
      });

  py::class_<ManyBodyState>(m, "ManyBodyState")
      .def_static("fock",
                  [](std::shared_ptr<FockBasis> b, const std::vector<int>& occ) {
                    return ManyBodyState::fock(std::move(b), occ);
                  })
      .def_static("normalized",
                  [](std::shared_ptr<FockBasis> b, const CVector& amps) {
                    return ManyBodyState::normalized(std::move(b), amps);
                  })
      .def_property_readonly("basis",
                             [](const ManyBodyState& s) {
                               return std::const_pointer_cast<FockBasis>(s.basis());
                             })
      .def_property_readonly("amplitudes", &ManyBodyState::amplitudes)
      .def_property_readonly("particles", &ManyBodyState::particles);

  py::class_<ModeSet>(m, "ModeSet")
      .def(py::init<double, int, std::vector<int>, int>(), py::arg("length"),
           py::arg("grid_points"), py::arg("wavenumbers"), py::arg("condensed_mode") = 0)
      .def_static("symmetric", &ModeSet::symmetric, py::arg("count"), py::arg("length"),
                  py::arg("grid_points"), py::arg("condensed_mode") = 0)
      .def_property_readonly("mode_count", &ModeSet::mode_count)
      .def_property_readonly("grid_points", &ModeSet::grid_points)
      .def_property_readonly("volume", &ModeSet::volume)
      .def_property_readonly("spacing", &ModeSet::spacing)
      .def("momentum", &ModeSet::momentum)
      .def("position", &ModeSet::position)
      .def_property_readonly("table", &ModeSet::table);

  m.def("number_operator", &number_operator);
  m.def("density_profile", &density_profile);
  m.def("build_recipe",
        [](const std::string& kind, int particles, int modes, int condensed_mode,
           double alpha, double phase, int na, int nb) {
          return build_recipe(make_spec(kind, modes, condensed_mode, alpha, phase, na, nb),
                              particles);
        },
        py::arg("kind"), py::arg("particles"), py::arg("modes") = 2,
        py::arg("condensed_mode") = 0, py::arg("alpha") = 1.0, py::arg("phase") = 0.0,
        py::arg("na") = 0, py::arg("nb") = 0);

  // spin-ssb
  py::class_<SpinLattice>(m, "SpinLattice")
      .def_static("chain", &SpinLattice::chain, py::arg("sites"), py::arg("coupling"),
                  py::arg("spin") = 0.5)
      .def_property_readonly("sites", &SpinLattice::sites)
      .def_property_readonly("dimension", &SpinLattice::dimension);
  m.def("build_heisenberg", &build_heisenberg);
  m.def("build_relevant_observable",
        [](const SpinLattice& l, const std::string& kind) {
          return build_relevant_observable(l, parse_observable(kind));
        });
  py::class_<SSBClassification>(m, "SSBClassification")
      .def_property_readonly("verdict",
                             [](const SSBClassification& c) { return to_string(c.verdict); })
      .def_readonly("commutator_norm", &SSBClassification::commutator_norm)
      .def_readonly("commutator_tolerance", &SSBClassification::commutator_tolerance)
      .def_readonly("ground_degeneracy", &SSBClassification::ground_degeneracy)
      .def_readonly("ground_energy", &SSBClassification::ground_energy)
      .def_readonly("near_degeneracy_spread", &SSBClassification::near_degeneracy_spread);
  m.def("classify_ssb",
        [](const HermitianOperator& h, const HermitianOperator& r) { return classify_ssb(h, r); });
  m.def("two_state_oscillation",
        [](double e1, double e2, double t) {
          return two_state_oscillation(e1, e2, UnitaryMixing::symmetric(), t);
        },
        "Oscillation probability for symmetric mixing");

  // odlro-analysis
  py::class_<ReducedDensityMatrix>(m, "ReducedDensityMatrix")
      .def_readonly("order", &ReducedDensityMatrix::order)
      .def_readonly("particles", &ReducedDensityMatrix::particles)
      .def_readonly("matrix", &ReducedDensityMatrix::matrix)
      .def_readonly("eigenvalues", &ReducedDensityMatrix::eigenvalues)
      .def("largest", &ReducedDensityMatrix::largest)
      .def("trace", &ReducedDensityMatrix::trace);
  m.def("compute_rdm1", py::overload_cast<const ManyBodyState&>(&compute_rdm1));
  m.def("compute_rdm2", &compute_rdm2);
  m.def("order_parameter", &order_parameter);
  py::class_<MacroscopicWavefunction>(m, "MacroscopicWavefunction")
      .def_readonly("values", &MacroscopicWavefunction::values)
      .def_readonly("condensate_amplitude", &MacroscopicWavefunction::condensate_amplitude)
      .def_readonly("condensate_fraction", &MacroscopicWavefunction::condensate_fraction)
      .def("integrated_norm", &MacroscopicWavefunction::integrated_norm);
  m.def("extract_macroscopic_wavefunction", &extract_macroscopic_wavefunction,
        py::arg("state"), py::arg("modes"), py::arg("floor") = 1e-6);
  py::class_<FactorizationResidual>(m, "FactorizationResidual")
      .def_readonly("residual", &FactorizationResidual::residual)
      .def_readonly("depletion_scale", &FactorizationResidual::depletion_scale)
      .def_readonly("alpha", &FactorizationResidual::alpha);
  m.def("factorization_residual", &factorization_residual, py::arg("state"),
        py::arg("modes"), py::arg("floor") = 1e-6);
  py::class_<TwoFluidDecomposition>(m, "TwoFluidDecomposition")
      .def_readonly("total_density", &TwoFluidDecomposition::total_density)
      .def_readonly("superfluid_density", &TwoFluidDecomposition::superfluid_density)
      .def_readonly("superfluid_current", &TwoFluidDecomposition::superfluid_current)
      .def_readonly("normal_density", &TwoFluidDecomposition::normal_density);
  m.def("two_fluid", &two_fluid, py::arg("state"), py::arg("modes"), py::arg("mass") = 1.0,
        py::arg("floor") = 1e-6);

  // coherent-csa
  py::class_<CoherentEnsemble>(m, "CoherentEnsemble")
      .def_static("build",
                  [](double mean_n, const std::string& recipe, int modes, int condensed_mode,
                     double alpha, double phase) {
                    return CoherentEnsemble::build(
                        mean_n, make_sector_recipe(make_spec(recipe, modes, condensed_mode,
                                                             alpha, phase, 0, 0)));
                  },
                  py::arg("mean_n"), py::arg("recipe") = "pure-condensate", py::arg("modes") = 2,
                  py::arg("condensed_mode") = 0, py::arg("alpha") = 1.0, py::arg("phase") = 0.0)
      .def_property_readonly("window",
                             [](const CoherentEnsemble& e) {
                               return std::pair<int, int>(e.window().lo, e.window().hi);
                             })
      .def("weight", &CoherentEnsemble::weight)
      .def("weight_mean", &CoherentEnsemble::weight_mean)
      .def("weight_stddev", &CoherentEnsemble::weight_stddev);
  m.def("csa_odlro_equivalence",
        [](const CoherentEnsemble& e, const ModeSet& modes, const std::string& kind,
           int grid_prime, int grid_index) {
          if (kind != "field" && kind != "pair")
            throw ValidationError("operator kind must be 'field' or 'pair'");
          const auto r = csa_odlro_equivalence(
              e, modes, kind == "field" ? LocalOperatorKind::Field : LocalOperatorKind::Pair,
              grid_prime, grid_index);
          return py::dict(py::arg("coherent_side") = r.coherent_side,
                          py::arg("sector_side") = r.sector_side,
                          py::arg("difference") = r.difference, py::arg("equal") = r.equal);
        });
  m.def("compare_field_with_macroscopic", [](const CoherentEnsemble& e, const ModeSet& modes) {
    const auto r = compare_field_with_macroscopic(e, modes);
    return py::dict(py::arg("field") = r.field, py::arg("macroscopic") = r.macroscopic,
                    py::arg("max_modulus_gap") = r.max_modulus_gap,
                    py::arg("single_sector") = r.single_sector);
  });
  m.def("eta_pairing_constraint",
        [](int sites, double hopping, double interaction, double mu, bool periodic) {
          HubbardParameters p{sites, hopping, interaction, mu, periodic};
          const auto r = eta_pairing_constraint(p);
          std::vector<Complex> b;
          for (const auto& row : r.rows) b.push_back(row.expect_b);
          return py::dict(py::arg("identity_residual") = r.identity_residual,
                          py::arg("gamma_b") = r.gamma_b, py::arg("max_abs_b") = r.max_abs_b,
                          py::arg("consistent") = r.consistent, py::arg("expect_b") = b);
        },
        py::arg("sites") = 2, py::arg("hopping") = 1.0, py::arg("interaction") = 4.0,
        py::arg("mu") = 0.5, py::arg("periodic") = false);

  // phase-ensemble
  m.def("overlap_scaling",
        [](const std::vector<std::size_t>& counts, std::size_t trials,
           std::optional<double> alpha, std::uint64_t seed) {
          const auto t = overlap_scaling(counts, trials, alpha, seed);
          std::vector<double> means;
          for (const auto& row : t.rows) means.push_back(row.mean);
          return py::dict(py::arg("means") = means, py::arg("exponent") = t.fit.slope,
                          py::arg("exponent_stderr") = t.fit.slope_stderr);
        },
        py::arg("counts"), py::arg("trials"), py::arg("alpha") = std::nullopt,
        py::arg("seed") = 0);

  // interference-sim
  py::class_<FringeFit>(m, "FringeFit")
      .def_readonly("valid", &FringeFit::valid)
      .def_readonly("visibility", &FringeFit::visibility)
      .def_readonly("phase", &FringeFit::phase)
      .def_readonly("baseline", &FringeFit::baseline);
  py::class_<DetectionRun>(m, "DetectionRun")
      .def_readonly("seed", &DetectionRun::seed)
      .def_readonly("grid_indices", &DetectionRun::grid_indices)
      .def_readonly("positions", &DetectionRun::positions)
      .def_readonly("trajectory_length", &DetectionRun::trajectory_length)
      .def_readonly("final_particles", &DetectionRun::final_particles)
      .def_readonly("fit", &DetectionRun::fit);
  m.def("run_experiment",
        [](int na, int nb, int detections, std::uint64_t seed) {
          return run_experiment(na, nb, detections, seed);
        },
        py::arg("na"), py::arg("nb"), py::arg("detections"), py::arg("seed"));
  m.def("phase_statistics", [](const std::vector<DetectionRun>& runs) {
    const auto s = phase_statistics(runs);
    return py::dict(py::arg("mean_visibility") = s.mean_visibility,
                    py::arg("phase_p_value") = s.phase_p_value,
                    py::arg("phases_uniform") = s.phases_uniform,
                    py::arg("pooled_uniform") = s.pooled_uniform,
                    py::arg("half_agreement_fraction") = s.half_agreement_fraction);
  });
}
