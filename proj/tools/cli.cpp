#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "ssblab/coherent.hpp"
#include "ssblab/interference.hpp"
#include "ssblab/odlro.hpp"
#include "ssblab/phase.hpp"
#include "ssblab/recipes.hpp"
#include "ssblab/spin.hpp"

namespace ssblab::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

enum class Kind { Int, Real, Text, Flag };

struct Param {
  std::string name;
  Kind kind;
  Json fallback;  // null: no default
  std::string help;
  bool required = false;
};

// Collects data files for one run.
class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  void write(const std::string& name, const std::string& text) {
    std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot write " + (dir_ / name).string());
    f << text;
    files_.push_back(name);
  }

  const std::vector<std::string>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct Subcommand {
  std::string name;
  std::string description;
  std::vector<Param> params;
  // Writes data files, prints a one-line summary.
  std::function<void(const Json&, Output&, std::ostream&)> run;
};

int get_int(const Json& p, const std::string& k) { return p.at(k).get<int>(); }
double get_real(const Json& p, const std::string& k) { return p.at(k).get<double>(); }
std::string get_text(const Json& p, const std::string& k) { return p.at(k).get<std::string>(); }
std::optional<double> opt_real(const Json& p, const std::string& k) {
  return p.at(k).is_null() ? std::nullopt : std::optional<double>(p.at(k).get<double>());
}
std::optional<int> opt_int(const Json& p, const std::string& k) {
  return p.at(k).is_null() ? std::nullopt : std::optional<int>(p.at(k).get<int>());
}

// ssb-classify ------------------------------------------------------------

SpinLattice lattice_from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open lattice file " + path);
  try {
    const Json j = Json::parse(f);
    std::vector<Coupling> couplings;
    for (const auto& c : j.at("couplings"))
      couplings.push_back({c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<double>()});
    std::vector<int> sub;
    if (j.contains("sublattice")) sub = j.at("sublattice").get<std::vector<int>>();
    return SpinLattice(j.at("sites").get<int>(), j.at("S").get<double>(),
                       std::move(couplings), std::move(sub));
  } catch (const Json::exception& e) {
    throw ValidationError("lattice file " + path + ": " + e.what());
  }
}

void run_ssb(const Json& p, Output& out, std::ostream& log) {
  const std::string model = get_text(p, "model");
  std::optional<SpinLattice> lattice;
  std::string observable;
  if (model == "fm-chain" || model == "afm-chain") {
    const bool fm = model == "fm-chain";
    const double j = opt_real(p, "coupling").value_or(fm ? -1.0 : 1.0);
    lattice.emplace(SpinLattice::chain(get_int(p, "sites"), j, get_real(p, "spin")));
    observable = fm ? "total-sz" : "staggered-sz";
  } else if (model == "lattice") {
    if (p.at("lattice").is_null())
      throw ValidationError("missing required flag --lattice for model 'lattice'");
    lattice.emplace(lattice_from_file(get_text(p, "lattice")));
    observable = "total-sz";
  } else {
    throw ValidationError("unknown model '" + model + "' (fm-chain, afm-chain, lattice)");
  }
  if (!p.at("observable").is_null()) observable = get_text(p, "observable");
  ObservableKind kind;
  if (observable == "total-sz") kind = ObservableKind::TotalSz;
  else if (observable == "staggered-sz") kind = ObservableKind::StaggeredSz;
  else throw ValidationError("unknown observable '" + observable + "' (total-sz, staggered-sz)");

  const HermitianOperator h = build_heisenberg(*lattice);
  const HermitianOperator r = build_relevant_observable(*lattice, kind);
  ClassifyOptions options;
  options.commutator_tolerance = opt_real(p, "commutator-tolerance");
  options.degeneracy_tolerance = opt_real(p, "degeneracy-tolerance");
  const SSBClassification c = classify_ssb(h, r, options);

  Json couplings = Json::array();
  for (const auto& b : lattice->couplings()) couplings.push_back(Json::array({b.i, b.j, b.strength}));
  out.json("classification.json",
           Json{{"model", model},
                {"lattice", {{"sites", lattice->sites()},
                             {"S", lattice->spin()},
                             {"couplings", couplings},
                             {"sublattice", lattice->sublattice()}}},
                {"observable", observable},
                {"dimension", lattice->dimension()},
                {"verdict", to_string(c.verdict)},
                {"commutator_norm", c.commutator_norm},
                {"commutator_tolerance", c.commutator_tolerance},
                {"ground_energy", c.ground_energy},
                {"ground_degeneracy", c.ground_degeneracy},
                {"ground_observable_values", c.ground_observable_values},
                {"near_degeneracy_spread", c.near_degeneracy_spread},
                {"degeneracy_tolerance", c.degeneracy_tolerance},
                {"units", {{"energy", "coupling units, hbar = 1"}, {"spin", "hbar"}}}});
  log << "ssb-classify: " << to_string(c.verdict) << " (||[H,R]|| = " << c.commutator_norm
      << ", degeneracy " << c.ground_degeneracy << ")\n";
}

// odlro -------------------------------------------------------------------

RecipeSpec recipe_from(const Json& p, const std::string& key) {
  RecipeSpec spec;
  spec.kind = parse_recipe_kind(get_text(p, key));
  spec.modes = get_int(p, "modes");
  spec.condensed_mode = get_int(p, "condensed-mode");
  spec.alpha = get_real(p, "alpha");
  spec.phase = get_real(p, "phase");
  if (p.contains("na")) spec.na = get_int(p, "na");
  if (p.contains("nb")) spec.nb = get_int(p, "nb");
  return spec;
}

void run_odlro(const Json& p, Output& out, std::ostream& log) {
  const RecipeSpec spec = recipe_from(p, "state");
  int n = spec.kind == RecipeKind::TwoMode ? spec.na + spec.nb : 4;
  if (auto given = opt_int(p, "n")) {
    if (spec.kind == RecipeKind::TwoMode && *given != n)
      throw ValidationError("--n must equal --na + --nb for the two-mode state");
    n = *given;
  }
  const ModeSet modes = ModeSet::symmetric(spec.modes, get_real(p, "length"),
                                           get_int(p, "grid"), spec.condensed_mode);
  const ManyBodyState state = build_recipe(spec, n);
  const ReducedDensityMatrix rdm1 = compute_rdm1(state);
  const OdlroVerdict verdict = detect_odlro(rdm1, n, get_real(p, "threshold"));

  Json report{{"state", {{"recipe", to_string(spec.kind)},
                         {"n", n},
                         {"modes", spec.modes},
                         {"condensed_mode", spec.condensed_mode},
                         {"k0", modes.momentum(spec.condensed_mode)},
                         {"alpha_parameter", spec.alpha},
                         {"phase", spec.phase}}},
              {"grid", {{"points", modes.grid_points()},
                        {"length", modes.volume()},
                        {"spacing", modes.spacing()}}},
              {"lambda", io::vector_json(rdm1.eigenvalues)},
              {"alpha", verdict.alpha},
              {"odlro", verdict.present},
              {"threshold", verdict.threshold}};
  if (n >= 2) report["lambda2_max"] = compute_rdm2(state).largest();

  std::ostringstream csv;
  const double mass = get_real(p, "mass");
  try {
    const MacroscopicWavefunction w = extract_macroscopic_wavefunction(state, modes);
    const FactorizationResidual fr = factorization_residual(state, modes);
    const TwoFluidDecomposition tf = two_fluid(state, modes, mass);
    report["condensate"] = {{"present", true},
                            {"amplitude", io::complex_json(w.condensate_amplitude)},
                            {"fraction", w.condensate_fraction}};
    report["residual"] = fr.residual;
    report["depletion_scale"] = fr.depletion_scale;
    report["W"] = io::vector_json(w.values);
    report["current"] = io::vector_json(tf.superfluid_current);
    csv << "g,x,density,superfluid_density,normal_density,current,W_re,W_im\n";
    for (int g = 0; g < modes.grid_points(); ++g)
      csv << g << ',' << num(modes.position(g)) << ',' << num(tf.total_density[g]) << ','
          << num(tf.superfluid_density[g]) << ',' << num(tf.normal_density[g]) << ','
          << num(tf.superfluid_current[g]) << ',' << num(w.values[g].real()) << ','
          << num(w.values[g].imag()) << '\n';
  } catch (const NoCondensateError& e) {
    report["condensate"] = {{"present", false}, {"reason", e.what()}};
    report["residual"] = nullptr;
    report["W"] = nullptr;
    report["current"] = nullptr;
    const RVector rho = density_profile(state, modes);
    csv << "g,x,density\n";
    for (int g = 0; g < modes.grid_points(); ++g)
      csv << g << ',' << num(modes.position(g)) << ',' << num(rho[g]) << '\n';
  }
  report["units"] = {{"hbar", kHbar}, {"mass", mass}, {"length", "box length"},
                     {"density", "particles per length"}};
  report["tolerances"] = {{"norm", ManyBodyState::kNormTolerance}, {"condensate_floor", 1e-6}};
  out.json("odlro.json", report);
  out.write("fields.csv", csv.str());
  log << "odlro: alpha = " << verdict.alpha << (verdict.present ? " (ODLRO)" : " (no ODLRO)")
      << "\n";
}

// coherent-check ----------------------------------------------------------

void run_coherent(const Json& p, Output& out, std::ostream& log) {
  const RecipeSpec spec = recipe_from(p, "recipe");
  const ModeSet modes = ModeSet::symmetric(spec.modes, get_real(p, "length"),
                                           get_int(p, "grid"), spec.condensed_mode);
  EnsembleOptions options;
  const auto lo = opt_int(p, "window-lo");
  const auto hi = opt_int(p, "window-hi");
  if (lo.has_value() != hi.has_value())
    throw ValidationError("--window-lo and --window-hi must be given together");
  if (lo) {
    options.window = NumberWindow{*lo, *hi};
    options.allow_narrow_window = true;
  }
  const double mean_n = get_real(p, "mean-n");
  const CoherentEnsemble ens =
      CoherentEnsemble::build(mean_n, make_sector_recipe(spec), options);
  const int gp = get_int(p, "grid-prime");
  const int g = opt_int(p, "grid-index").value_or(modes.grid_points() / 4);
  const double tol = get_real(p, "tolerance");

  const SparseMatrix corr = block_diagonal_operator(
      ens, [&](const FockBasis& b) { return field_correlator(modes, gp, g, b); });
  const auto nc = expectation_number_conserving(ens, corr);
  const double nc_diff = std::abs(nc.blocked - nc.naive);

  auto equivalence = [&](LocalOperatorKind kind) {
    const auto e = csa_odlro_equivalence(ens, modes, kind, gp, g, tol);
    return Json{{"coherent_side", io::complex_json(e.coherent_side)},
                {"sector_side", io::complex_json(e.sector_side)},
                {"difference", e.difference},
                {"equal", e.equal}};
  };

  Json weights = Json::array();
  for (int n = ens.window().lo; n <= ens.window().hi; ++n)
    weights.push_back(Json::array({n, io::complex_json(ens.weight(n))}));

  Json report{
      {"ensemble", {{"meanN", mean_n},
                    {"window", {ens.window().lo, ens.window().hi}},
                    {"recipe", {{"type", to_string(spec.kind)},
                                {"alpha", spec.alpha},
                                {"k0", modes.momentum(spec.condensed_mode)},
                                {"phase", spec.phase}}}}},
      {"weights", weights},
      {"weight_mean", ens.weight_mean()},
      {"weight_stddev", ens.weight_stddev()},
      {"points", {{"grid_prime", gp}, {"grid_index", g}}},
      {"correlator", {{"blocked", io::complex_json(nc.blocked)},
                      {"naive", io::complex_json(nc.naive)},
                      {"difference", nc_diff},
                      {"tolerance", tol},
                      {"agree", nc_diff <= tol}}},
      {"odlro_equivalence", {{"field", equivalence(LocalOperatorKind::Field)},
                             {"pair", equivalence(LocalOperatorKind::Pair)}}}};

  std::ostringstream csv;
  try {
    const auto cmp = compare_field_with_macroscopic(ens, modes);
    report["field_vs_macroscopic"] = {{"max_modulus_gap", cmp.max_modulus_gap},
                                      {"single_sector", cmp.single_sector}};
    csv << "g,x,psi_re,psi_im,W_re,W_im\n";
    for (int i = 0; i < modes.grid_points(); ++i)
      csv << i << ',' << num(modes.position(i)) << ',' << num(cmp.field[i].real()) << ','
          << num(cmp.field[i].imag()) << ',' << num(cmp.macroscopic[i].real()) << ','
          << num(cmp.macroscopic[i].imag()) << '\n';
  } catch (const NoCondensateError& e) {
    report["field_vs_macroscopic"] = {{"max_modulus_gap", nullptr}, {"reason", e.what()}};
    csv << "g,x,psi_re,psi_im\n";
    for (int i = 0; i < modes.grid_points(); ++i) {
      const Complex v = expectation_field(ens, modes, i).value;
      csv << i << ',' << num(modes.position(i)) << ',' << num(v.real()) << ','
          << num(v.imag()) << '\n';
    }
  }
  report["units"] = {{"hbar", kHbar}, {"length", "box length"}};
  out.json("coherent.json", report);
  out.write("field.csv", csv.str());
  log << "coherent-check: blocked vs naive difference " << nc_diff << "\n";
}

// constraint --------------------------------------------------------------

void run_constraint(const Json& p, Output& out, std::ostream& log) {
  HubbardParameters hp;
  hp.sites = get_int(p, "sites");
  hp.hopping = get_real(p, "hopping");
  hp.interaction = get_real(p, "interaction");
  hp.chemical_potential = get_real(p, "mu");
  hp.periodic = p.at("periodic").get<bool>();
  const ConstraintReport r = eta_pairing_constraint(hp, get_real(p, "tolerance"));
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"energy", row.energy},
                    {"lhs", io::complex_json(row.lhs)},
                    {"expect_b", io::complex_json(row.expect_b)},
                    {"expect_c", io::complex_json(row.expect_c)},
                    {"rhs", io::complex_json(row.rhs)}});
  out.json("constraint.json",
           Json{{"hubbard", {{"sites", hp.sites},
                             {"hopping", hp.hopping},
                             {"interaction", hp.interaction},
                             {"mu", hp.chemical_potential},
                             {"periodic", hp.periodic},
                             {"dimension", FermionBasis(hp.sites).size()}}},
                {"operators", {{"A", "eta-dagger"}, {"B", "eta-dagger"}, {"C", "zero"}}},
                {"gamma_b", io::complex_json(r.gamma_b)},
                {"gamma_c", io::complex_json(r.gamma_c)},
                {"identity_residual", r.identity_residual},
                {"single_operator", r.single_operator},
                {"tolerance", r.tolerance},
                {"consistent", r.consistent},
                {"max_abs_lhs", r.max_abs_lhs},
                {"max_abs_rhs", r.max_abs_rhs},
                {"max_abs_b", r.max_abs_b},
                {"max_abs_c", r.max_abs_c},
                {"rows", rows},
                {"units", {{"energy", "hopping units, hbar = 1"}}}});
  log << "constraint: identity residual " << r.identity_residual << ", max |<B>| "
      << r.max_abs_b << (r.consistent ? " (consistent)" : " (inconsistent)") << "\n";
}

// phases ------------------------------------------------------------------

std::vector<std::size_t> parse_counts(const std::string& text) {
  std::vector<std::size_t> counts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    const auto r = std::from_chars(item.data(), item.data() + item.size(), v);
    if (r.ec != std::errc() || r.ptr != item.data() + item.size() || v == 0)
      throw ValidationError("--counts: '" + item + "' is not a positive integer");
    counts.push_back(v);
  }
  if (counts.empty()) throw ValidationError("--counts: empty list");
  return counts;
}

void run_phases(const Json& p, Output& out, std::ostream& log) {
  const auto counts = parse_counts(get_text(p, "counts"));
  const auto trials = static_cast<std::size_t>(get_int(p, "trials"));
  if (get_int(p, "trials") < 1) throw ValidationError("--trials must be >= 1");
  const auto alpha = opt_real(p, "alpha");
  const auto seed = p.at("seed").get<std::uint64_t>();
  const std::string statistic = get_text(p, "statistic");
  ScalingTable table;
  if (statistic == "overlap") {
    table = overlap_scaling(counts, trials, alpha, seed);
  } else if (statistic == "reduction") {
    const std::string op = get_text(p, "operator");
    OperatorFactory factory;
    if (op == "banded") factory = random_banded_hermitian;
    else if (op == "single-pair") factory = [](std::size_t j, std::uint64_t) { return single_pair_operator(j); };
    else throw ValidationError("unknown operator '" + op + "' (banded, single-pair)");
    table = reduction_scaling(counts, trials, alpha, factory, seed);
  } else {
    throw ValidationError("unknown statistic '" + statistic + "' (overlap, reduction)");
  }

  std::ostringstream csv;
  csv << "J,trial,statistic\n";
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    for (std::size_t t = 0; t < row.per_trial.size(); ++t)
      csv << row.count << ',' << t << ',' << num(row.per_trial[t]) << '\n';
    rows.push_back({{"J", row.count}, {"mean", row.mean}, {"standard_error", row.standard_error}});
  }
  Json fit = nullptr;
  if (table.rows.size() >= 2)
    fit = {{"exponent", table.fit.slope},
           {"intercept", table.fit.intercept},
           {"exponent_stderr", table.fit.slope_stderr},
           {"ci95", {table.fit.slope - 1.96 * table.fit.slope_stderr,
                     table.fit.slope + 1.96 * table.fit.slope_stderr}}};
  out.write("phases.csv", csv.str());
  out.json("phases.json",
           Json{{"statistic", statistic},
                {"aggregate", statistic == "overlap" ? "mean" : "rms"},
                {"alpha", alpha ? Json(*alpha) : Json(nullptr)},
                {"trials", trials},
                {"base_seed", seed},
                {"seed_rule", "trial t uses seed + t"},
                {"rows", rows},
                {"fit", fit}});
  log << "phases: " << statistic;
  if (!fit.is_null()) log << " exponent " << table.fit.slope << " +- " << table.fit.slope_stderr;
  log << "\n";
}

// interfere ---------------------------------------------------------------

void run_interfere(const Json& p, Output& out, std::ostream& log) {
  InterferenceConfig config;
  config.grid_points = get_int(p, "grid");
  config.wavenumber = get_int(p, "wavenumber");
  config.length = get_real(p, "length");
  const int na = get_int(p, "na"), nb = get_int(p, "nb");
  const int detections = get_int(p, "detections"), nruns = get_int(p, "runs");
  if (nruns < 1) throw ValidationError("--runs must be >= 1");
  const auto seed = p.at("seed").get<std::uint64_t>();

  std::vector<DetectionRun> runs;
  runs.reserve(static_cast<std::size_t>(nruns));
  for (int r = 0; r < nruns; ++r)
    runs.push_back(run_experiment(na, nb, detections, seed + static_cast<std::uint64_t>(r), config));

  Json per_run = Json::array();
  std::ostringstream csv;
  csv << "seed,visibility,theta,valid\n";
  for (const auto& run : runs) {
    per_run.push_back({{"seed", run.seed},
                       {"na", run.na},
                       {"nb", run.nb},
                       {"grid_indices", run.grid_indices},
                       {"positions", run.positions},
                       {"trajectory_length", run.trajectory_length},
                       {"final_particles", run.final_particles},
                       {"fit", {{"valid", run.fit.valid},
                                {"visibility", run.fit.visibility},
                                {"phase", run.fit.phase},
                                {"baseline", run.fit.baseline}}}});
    csv << run.seed << ',' << num(run.fit.visibility) << ',' << num(run.fit.phase) << ','
        << (run.fit.valid ? 1 : 0) << '\n';
  }
  out.json("runs.json", per_run);
  out.write("interfere.csv", csv.str());

  Json summary{{"na", na}, {"nb", nb}, {"detections", detections}, {"runs", nruns},
               {"base_seed", seed}, {"seed_rule", "run r uses seed + r"},
               {"grid", config.grid_points}, {"k0", kTwoPi * config.wavenumber / config.length}};
  if (static_cast<std::size_t>(nruns) >= 100) {
    const PhaseStatistics s = phase_statistics(runs, config);
    summary["statistics"] = {{"mean_visibility", s.mean_visibility},
                             {"phase_histogram", s.phase_histogram},
                             {"phase_chi_square", s.phase_chi_square},
                             {"phase_p_value", s.phase_p_value},
                             {"significance", s.significance},
                             {"phases_uniform", s.phases_uniform},
                             {"mean_abs_half_difference", s.mean_abs_half_difference},
                             {"half_agreement_fraction", s.half_agreement_fraction},
                             {"pooled_chi_square", s.pooled_chi_square},
                             {"pooled_dof", s.pooled_dof},
                             {"pooled_p_value", s.pooled_p_value},
                             {"pooled_uniform", s.pooled_uniform}};
    log << "interfere: mean visibility " << s.mean_visibility << ", phase p-value "
        << s.phase_p_value << "\n";
  } else {
    summary["statistics"] = nullptr;
    summary["note"] = "phase statistics need at least 100 runs";
    log << "interfere: " << nruns << " runs written (too few for phase statistics)\n";
  }
  summary["units"] = {{"position", "box length"}, {"phase", "radians"}};
  out.json("summary.json", summary);
}

// registry ----------------------------------------------------------------

const std::vector<Subcommand>& registry() {
  static const std::vector<Subcommand> cmds = [] {
    std::vector<Subcommand> v;
    v.push_back({"ssb-classify",
                 "Classify symmetry breaking of a Heisenberg lattice",
                 {{"model", Kind::Text, "fm-chain", "fm-chain, afm-chain or lattice"},
                  {"sites", Kind::Int, 4, "chain length"},
                  {"spin", Kind::Real, 0.5, "spin S (0.5 or 1)"},
                  {"coupling", Kind::Real, nullptr, "J (default -1 for fm, +1 for afm)"},
                  {"lattice", Kind::Text, nullptr, "lattice JSON file for model 'lattice'"},
                  {"observable", Kind::Text, nullptr, "total-sz or staggered-sz"},
                  {"commutator-tolerance", Kind::Real, nullptr, "absolute ||[H,R]|| threshold"},
                  {"degeneracy-tolerance", Kind::Real, nullptr, "absolute energy window"}},
                 run_ssb});
    v.push_back({"odlro",
                 "Reduced density matrices, macroscopic wavefunction and two-fluid split",
                 {{"state", Kind::Text, "pure-condensate",
                   "pure-condensate, two-fraction, uniform, neel-boson, two-mode"},
                  {"n", Kind::Int, nullptr, "particle number (default 4, or na + nb)"},
                  {"modes", Kind::Int, 2, "plane-wave modes"},
                  {"condensed-mode", Kind::Int, 0, "index of the condensed mode"},
                  {"alpha", Kind::Real, 1.0, "condensate weight for two-fraction"},
                  {"phase", Kind::Real, 0.0, "phase of the condensed amplitude"},
                  {"na", Kind::Int, 0, "two-mode occupation a"},
                  {"nb", Kind::Int, 0, "two-mode occupation b"},
                  {"grid", Kind::Int, 64, "grid points"},
                  {"length", Kind::Real, 1.0, "box length"},
                  {"mass", Kind::Real, 1.0, "particle mass"},
                  {"threshold", Kind::Real, 0.1, "ODLRO threshold on lambda_1 / N"}},
                 run_odlro});
    v.push_back({"coherent-check",
                 "Coherent-state ensemble against fixed-number sectors",
                 {{"mean-n", Kind::Real, 9.0, "Poisson mean <N>"},
                  {"recipe", Kind::Text, "two-fraction", "sector state recipe"},
                  {"modes", Kind::Int, 2, "plane-wave modes"},
                  {"condensed-mode", Kind::Int, 0, "index of the condensed mode"},
                  {"alpha", Kind::Real, 0.5, "condensate weight for two-fraction"},
                  {"phase", Kind::Real, 0.0, "phase of the condensed amplitude"},
                  {"grid", Kind::Int, 16, "grid points"},
                  {"length", Kind::Real, 1.0, "box length"},
                  {"window-lo", Kind::Int, nullptr, "lowest particle number kept"},
                  {"window-hi", Kind::Int, nullptr, "highest particle number kept"},
                  {"grid-prime", Kind::Int, 0, "grid index of x'"},
                  {"grid-index", Kind::Int, nullptr, "grid index of x (default grid / 4)"},
                  {"tolerance", Kind::Real, 1e-12, "equality tolerance"}},
                 run_coherent});
    v.push_back({"constraint",
                 "Commutator constraint for eta pairing on a Hubbard chain",
                 {{"sites", Kind::Int, 2, "chain length (<= 4)"},
                  {"hopping", Kind::Real, 1.0, "t"},
                  {"interaction", Kind::Real, 4.0, "U"},
                  {"mu", Kind::Real, 0.5, "chemical potential"},
                  {"periodic", Kind::Flag, false, "close the chain"},
                  {"tolerance", Kind::Real, 1e-10, "identity and expectation tolerance"}},
                 run_constraint});
    v.push_back({"phases",
                 "Random-phase overlap and reduction scaling",
                 {{"seed", Kind::Int, nullptr, "base seed", true},
                  {"counts", Kind::Text, "100,1000,10000", "comma-separated J values"},
                  {"trials", Kind::Int, 1000, "trials per J"},
                  {"alpha", Kind::Real, nullptr, "NQS weight |Phi_0|^2 (uniform when unset)"},
                  {"statistic", Kind::Text, "overlap", "overlap or reduction"},
                  {"operator", Kind::Text, "banded", "banded or single-pair (reduction)"}},
                 run_phases});
    v.push_back({"interfere",
                 "Sequential detections on two condensates",
                 {{"seed", Kind::Int, nullptr, "base seed", true},
                  {"na", Kind::Int, 16, "particles in +k0"},
                  {"nb", Kind::Int, 16, "particles in -k0"},
                  {"detections", Kind::Int, 24, "detections per run"},
                  {"runs", Kind::Int, 200, "independent runs"},
                  {"grid", Kind::Int, 128, "grid points"},
                  {"wavenumber", Kind::Int, 1, "k0 in units of 2 pi / L"},
                  {"length", Kind::Real, 1.0, "box length"}},
                 run_interfere});
    return v;
  }();
  return cmds;
}

const Subcommand& find_subcommand(const std::string& name) {
  for (const auto& s : registry())
    if (s.name == name) return s;
  throw ValidationError("unknown subcommand '" + name + "'");
}

// Value of `param` from a config entry, type-checked.
Json coerce_json(const Param& param, const Json& v) {
  if (v.is_null()) return v;
  switch (param.kind) {
    case Kind::Int:
      if (v.is_number_integer()) return v;
      if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())
        return static_cast<long long>(v.get<double>());
      break;
    case Kind::Real:
      if (v.is_number()) return v.get<double>();
      break;
    case Kind::Text:
      if (v.is_string()) return v;
      break;
    case Kind::Flag:
      if (v.is_boolean()) return v;
      break;
  }
  throw ValidationError("parameter '" + param.name + "' has the wrong type: " + v.dump());
}

Json coerce_text(const Param& param, const std::string& text) {
  switch (param.kind) {
    case Kind::Int: {
      long long v = 0;
      const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
      if (r.ec != std::errc() || r.ptr != text.data() + text.size())
        throw ValidationError("--" + param.name + ": '" + text + "' is not an integer");
      return v;
    }
    case Kind::Real: {
      double v = 0;
      const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
      if (r.ec != std::errc() || r.ptr != text.data() + text.size() || !std::isfinite(v))
        throw ValidationError("--" + param.name + ": '" + text + "' is not a number");
      return v;
    }
    case Kind::Text:
      return text;
    case Kind::Flag:
      return true;
  }
  return nullptr;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

Json load_manifest(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open manifest " + path.string());
  try {
    Json m = Json::parse(f);
    if (!m.is_object() || !m.contains("subcommand") || !m.contains("parameters"))
      throw ValidationError("manifest " + path.string() + " lacks subcommand/parameters");
    return m;
  } catch (const Json::parse_error& e) {
    throw ValidationError("manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace

std::vector<std::string> subcommand_names() {
  std::vector<std::string> names;
  for (const auto& s : registry()) names.push_back(s.name);
  return names;
}

fs::path resolve_out_dir(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("SSBLAB_OUT_DIR"); env && *env) return env;
  return "ssblab-out";
}

Json load_config(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open config file " + path.string());
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Byte offset -> line and column for the message.
    const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < pos; ++i) {
      if (text[i] == '\n') ++line, col = 1;
      else ++col;
    }
    throw ValidationError("config " + path.string() + ": malformed JSON at line " +
                          std::to_string(line) + ", column " + std::to_string(col));
  }
  if (!j.is_object())
    throw ValidationError("config " + path.string() + ": top level must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (value.is_object() || value.is_array())
      throw ValidationError("config " + path.string() + ": key '" + key +
                            "' is nested; only flat key-value pairs are allowed");
  return j;
}

Json complete_parameters(const std::string& subcommand, const Json& given,
                         std::ostream& warn) {
  const Subcommand& cmd = find_subcommand(subcommand);
  Json params = Json::object();
  for (const auto& param : cmd.params) params[param.name] = param.fallback;
  for (const auto& [key, value] : given.items()) {
    auto it = std::find_if(cmd.params.begin(), cmd.params.end(),
                           [&](const Param& p) { return p.name == key; });
    if (it == cmd.params.end()) {
      warn << "warning: unknown parameter '" << key << "' ignored\n";
      continue;
    }
    params[key] = coerce_json(*it, value);
  }
  for (const auto& param : cmd.params)
    if (param.required && params[param.name].is_null())
      throw ValidationError("missing required flag --" + param.name);
  return params;
}

Json run_subcommand(const std::string& subcommand, const Json& params,
                    const fs::path& out_dir, std::ostream& out) {
  const Subcommand& cmd = find_subcommand(subcommand);
  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_timestamp();
  Output output(out_dir);
  try {
    cmd.run(params, output, out);
  } catch (const Json::type_error& e) {
    throw ValidationError(subcommand + ": parameter has the wrong type (" + e.what() + ")");
  } catch (const Json::out_of_range& e) {
    throw ValidationError(subcommand + ": parameter out of range (" + e.what() + ")");
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Json manifest{{"tool", "ssblab"},
                {"version", kVersion},
                {"subcommand", subcommand},
                {"parameters", params},
                {"seed", params.contains("seed") ? params.at("seed") : Json(nullptr)},
                {"outputs", output.files()},
                {"started_at", started},
                {"duration_seconds", seconds}};
  std::ofstream f(out_dir / "manifest.json", std::ios::trunc);
  f << manifest.dump(2) << "\n";
  return manifest;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ssblab: symmetry-breaking and condensate numerics"};
  app.require_subcommand(1, 1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", kVersion);

  struct Bound {
    CLI::App* app;
    std::map<std::string, std::string> text;
    std::map<std::string, bool> flags;
    std::string config;
    std::string out_dir;
  };
  std::vector<std::unique_ptr<Bound>> bound;
  for (const auto& cmd : registry()) {
    auto b = std::make_unique<Bound>();
    b->app = app.add_subcommand(cmd.name, cmd.description);
    b->app->add_option("--config", b->config, "flat JSON parameter file");
    b->app->add_option("--out-dir", b->out_dir, "output directory (or $SSBLAB_OUT_DIR)");
    for (const auto& param : cmd.params) {
      if (param.kind == Kind::Flag)
        b->app->add_flag("--" + param.name, b->flags[param.name], param.help);
      else
        b->app->add_option("--" + param.name, b->text[param.name], param.help);
    }
    bound.push_back(std::move(b));
  }
  std::string manifest_path, replay_out;
  CLI::App* replay = app.add_subcommand("replay", "Re-run a manifest");
  replay->add_option("--manifest", manifest_path, "manifest.json to replay")->required();
  replay->add_option("--out-dir", replay_out, "output directory (or $SSBLAB_OUT_DIR)");

  std::vector<std::string> argv_store{"ssblab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  if (!args.empty() && !args[0].empty() && args[0][0] != '-' && args[0] != "replay") {
    const auto names = subcommand_names();
    if (std::find(names.begin(), names.end(), args[0]) == names.end()) {
      err << "error: unknown subcommand '" << args[0] << "'\n" << app.help();
      return kValidationError;
    }
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kValidationError;
  }

  try {
    if (replay->parsed()) {
      const Json m = load_manifest(manifest_path);
      const std::string name = m.at("subcommand").get<std::string>();
      const Json params = complete_parameters(name, m.at("parameters"), err);
      run_subcommand(name, params, resolve_out_dir(replay_out), out);
      return kSuccess;
    }
    for (std::size_t i = 0; i < bound.size(); ++i) {
      Bound& b = *bound[i];
      if (!b.app->parsed()) continue;
      const Subcommand& cmd = registry()[i];
      Json given = b.config.empty() ? Json::object() : load_config(b.config);
      for (const auto& param : cmd.params) {
        const std::string flag = "--" + param.name;
        if (b.app->count(flag) == 0) continue;
        given[param.name] = param.kind == Kind::Flag ? Json(b.flags[param.name])
                                                     : coerce_text(param, b.text[param.name]);
      }
      const Json params = complete_parameters(cmd.name, given, err);
      run_subcommand(cmd.name, params, resolve_out_dir(b.out_dir), out);
      return kSuccess;
    }
  } catch (const ContractError& e) {
    err << "contract violation: " << e.what() << "\n";
    return kContractViolation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kValidationError;
}

}  // namespace ssblab::cli
