// morreylab command-line harness: exact and sampled Morrey norms,
// composition-operator bounds, bi-Lipschitz certification, verification
// suites. JSON reports on stdout; per-assertion lines on stderr.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "morreylab/composition.hpp"
#include "morreylab/experiments.hpp"
#include "morreylab/grid_norms.hpp"
#include "morreylab/report.hpp"
#include "morreylab/weak_gate.hpp"

namespace {

using namespace morreylab;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitUnbounded = 3;
constexpr int kExitInconclusive = 4;

struct OutputOptions {
  std::string csv_path;
  bool timing = false;
  bool pretty = false;
};

void emit(const ExperimentReport& report, const OutputOptions& options) {
  const nlohmann::json j = report.to_json(options.timing);
  std::cout << (options.pretty ? j.dump(2) : j.dump()) << "\n";
  if (!options.csv_path.empty()) {
    std::ofstream out(options.csv_path);
    if (!out) throw std::runtime_error("cannot open " + options.csv_path);
    report.write_csv(out);
  }
  for (const ResultRecord& r : report.results) {
    if (r.kind == "pass" || r.kind == "fail")
      std::cerr << (r.kind == "pass" ? "[PASS] " : "[FAIL] ") << r.name
                << "\n";
  }
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (token == "inf")
      values.push_back(kInf);
    else
      values.push_back(std::stod(token));
  }
  return values;
}

Map build_map(const std::string& name, int n, const std::string& entries,
              const std::string& matrix, const std::string& offset) {
  if (name == "identity") return identity_map(n);
  if (name == "diag") {
    if (entries.empty())
      throw CLI::ValidationError("--entries required for the diag map");
    return diag_map(parse_reals(entries));
  }
  if (name == "affine") {
    if (matrix.empty())
      throw CLI::ValidationError("--matrix required for the affine map");
    const std::vector<double> m = parse_reals(matrix);
    const int dim = static_cast<int>(std::lround(std::sqrt(
        static_cast<double>(m.size()))));
    if (dim * dim != static_cast<int>(m.size()))
      throw CLI::ValidationError("--matrix must hold n*n row-major entries");
    Eigen::MatrixXd A(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) A(i, j) = m[i * dim + j];
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
    if (!offset.empty()) {
      const std::vector<double> o = parse_reals(offset);
      if (static_cast<int>(o.size()) != dim)
        throw CLI::ValidationError("--offset dimension mismatch");
      for (int i = 0; i < dim; ++i) b(i) = o[i];
    }
    return map_from_affine(make_affine(std::move(A), std::move(b)));
  }
  if (name == "exp1d") return exp1d_map();
  if (name == "shear-cubic") return shear_cubic_map();
  throw CLI::ValidationError("unknown map '" + name + "'");
}

AxisBox box_from_bounds(const std::vector<double>& bounds, int n) {
  // lo,hi per axis: either 2 values shared by all axes or 2n values.
  std::vector<double> lower(n), sides(n);
  if (bounds.size() == 2) {
    for (int d = 0; d < n; ++d) {
      lower[d] = bounds[0];
      sides[d] = bounds[1] - bounds[0];
    }
  } else if (bounds.size() == static_cast<std::size_t>(2 * n)) {
    for (int d = 0; d < n; ++d) {
      lower[d] = bounds[2 * d];
      sides[d] = bounds[2 * d + 1] - bounds[2 * d];
    }
  } else {
    throw CLI::ValidationError("--domain needs lo,hi or lo,hi per axis");
  }
  return make_box(std::move(lower), std::move(sides));
}

std::vector<AxisBox> default_box_family(int n) {
  std::vector<AxisBox> family;
  family.push_back(make_box(std::vector<double>(n, 1.0)));
  if (n == 1) {
    family.push_back(make_box({0.1}));
    family.push_back(make_box({1.0}, {1.0}));
    family.push_back(make_box({5.0}, {0.5}));
  } else {
    std::vector<double> thin(n, 1.0), wide(n, 2.0);
    thin[n - 1] = 4.0;
    wide[0] = 0.5;
    family.push_back(make_box(thin));
    family.push_back(make_box(wide));
  }
  return family;
}

double timed_ms(const std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

// `--config file.json <bundle>` expands to the stored token list.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.size() >= 3 && args[0] == "--config") {
    std::ifstream in(args[1]);
    if (!in) throw std::runtime_error("cannot open config " + args[1]);
    nlohmann::json j;
    in >> j;
    const auto& bundles = j.at("bundles");
    if (!bundles.contains(args[2]))
      throw std::runtime_error("config has no bundle '" + args[2] + "'");
    std::vector<std::string> expanded;
    for (const auto& token : bundles.at(args[2]))
      expanded.push_back(token.get<std::string>());
    expanded.insert(expanded.end(), args.begin() + 3, args.end());
    return expanded;
  }
  return args;
}

int run(std::vector<std::string> args) {
  CLI::App app{"Morrey-norm and composition-operator toolkit"};
  app.require_subcommand(1);

  OutputOptions output;
  std::uint64_t seed = 0;
  bool requireFinite = false;
  app.add_option("--csv", output.csv_path, "also write records to a CSV file");
  app.add_flag("--timing", output.timing, "include wall-clock duration in JSON");
  app.add_flag("--pretty", output.pretty, "indent the JSON report");
  app.add_option("--seed", seed, "seed for randomized families");
  app.add_flag("--require-finite", requireFinite,
               "exit 3 when a requested norm is unbounded");

  // ---- norm ----------------------------------------------------------
  auto* norm = app.add_subcommand("norm", "indicator / grid-function norms");
  norm->require_subcommand(1);

  std::string sidesArg, lowerArg;
  double p = 0.0, q = 0.0;
  int n = 0;
  bool wantWeak = false;

  auto* normBox = norm->add_subcommand("box", "closed-form box indicator norm");
  normBox->add_option("--sides", sidesArg, "comma-separated extents")->required();
  normBox->add_option("--lower", lowerArg, "anchor corner (default 0)");
  normBox->add_option("--n", n, "dimension (default: deduced)");
  normBox->add_option("--p", p)->required();
  normBox->add_option("--q", q)->required();
  normBox->add_flag("--weak", wantWeak, "also report the weak norm");

  double slabThickness = 0.0;
  std::string slabSides;
  auto* normSlab = norm->add_subcommand("slab", "closed-form slab indicator norm");
  normSlab->add_option("--t", slabThickness, "thickness of a single finite side");
  normSlab->add_option("--finite-sides", slabSides, "comma-separated finite sides");
  normSlab->add_option("--n", n, "ambient dimension")->required();
  normSlab->add_option("--p", p)->required();
  normSlab->add_option("--q", q)->required();
  normSlab->add_flag("--weak", wantWeak);

  std::string builtin, csvIn, specIn;
  double gridH = 0.125, slabT = 64.0;
  bool dyadic = false;
  std::size_t stride = 1;
  auto* normGrid = norm->add_subcommand("grid", "sampled-function norm estimate");
  normGrid->add_option("--builtin", builtin, "box | slab");
  normGrid->add_option("--sides", sidesArg, "box sides for --builtin box");
  normGrid->add_option("--spacing", gridH, "grid spacing for built-ins");
  normGrid->add_option("--T", slabT, "truncation for --builtin slab");
  normGrid->add_option("--t", slabThickness, "thickness for --builtin slab");
  normGrid->add_option("--values", csvIn, "CSV of row-major values");
  normGrid->add_option("--spec", specIn, "JSON GridSpec file");
  normGrid->add_option("--p", p)->required();
  normGrid->add_option("--q", q)->required();
  normGrid->add_flag("--dyadic", dyadic, "restrict cube sizes to powers of two");
  normGrid->add_option("--stride", stride, "anchor stride");
  normGrid->add_flag("--weak", wantWeak);

  // ---- compose -------------------------------------------------------
  std::string mapName, entriesArg, matrixArg, offsetArg;
  std::string familyArg = "default";
  std::vector<double> domainArg;
  bool wantProfile = false;
  auto* compose = app.add_subcommand("compose", "composition-operator analysis");
  compose->add_option("--map", mapName,
                      "identity | diag | affine | exp1d | shear-cubic")
      ->required();
  compose->add_option("--n", n, "dimension for identity (default 2)");
  compose->add_option("--entries", entriesArg, "diagonal entries");
  compose->add_option("--matrix", matrixArg, "row-major matrix entries");
  compose->add_option("--offset", offsetArg, "affine offset");
  compose->add_option("--p", p)->required();
  compose->add_option("--q", q)->required();
  compose->add_flag("--profile", wantProfile, "include a Jacobian profile summary");
  compose->add_option("--domain", domainArg,
                      "lo,hi per axis for --profile (comma separated)")
      ->delimiter(',');
  compose->add_option("--family", familyArg,
                      "test family: default | boxes | intervals | witness");

  // ---- certify -------------------------------------------------------
  double certC = 0.0;
  std::size_t samples = 33;
  double maxSpacing = kInf, maxJump = 0.10;
  auto* certify = app.add_subcommand("certify", "bi-Lipschitz certification");
  certify->add_option("--map", mapName)->required();
  certify->add_option("--n", n, "dimension for identity (default 2)");
  certify->add_option("--entries", entriesArg);
  certify->add_option("--matrix", matrixArg);
  certify->add_option("--offset", offsetArg);
  certify->add_option("--domain", domainArg, "lo,hi or lo,hi per axis")
      ->delimiter(',');
  certify->add_option("--C", certC, "singular-value threshold")->required();
  certify->add_option("--samples", samples, "samples per axis");
  certify->add_option("--max-spacing", maxSpacing);
  certify->add_option("--max-jump", maxJump,
                      "max relative alpha_1 change between samples");

  // ---- verify --------------------------------------------------------
  std::string suiteName, spaceFile, sigmaFile, normJson;
  double suiteP = 2.0, suiteQ = 1.0;
  bool includeQuasi = false;
  auto* verify = app.add_subcommand("verify", "named verification suites");
  std::ostringstream suiteHelp;
  suiteHelp << "one of:";
  for (const std::string& s : suite_names()) suiteHelp << " " << s;
  verify->add_option("suite", suiteName, suiteHelp.str())->required();
  verify->add_flag("--include-quasi", includeQuasi,
                   "also report q<1 quasi-norm gate instances");
  verify->add_option("--p", suiteP, "exponent p where the suite takes one");
  verify->add_option("--q", suiteQ, "exponent q where the suite takes one");
  verify->add_option("--space", spaceFile,
                     "weak-gate only: FiniteSpace JSON file");
  verify->add_option("--sigma", sigmaFile,
                     "weak-gate only: CellMap JSON file");
  verify->add_option("--norm", normJson,
                     "weak-gate only: norm selection JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  const auto start = std::chrono::steady_clock::now();

  if (normBox->parsed()) {
    const std::vector<double> sides = parse_reals(sidesArg);
    if (n == 0) n = static_cast<int>(sides.size());
    const MorreyParams params = make_params(n, p, q);
    const AxisBox box = lowerArg.empty()
                            ? make_box(sides)
                            : make_box(parse_reals(lowerArg), sides);
    ExperimentReport report;
    report.experiment = "norm-box";
    report.inputs = {{"box", to_json(box)}, {"params", to_json(params)}};
    const NormValue value = box_indicator_norm(box, params);
    report.add(record_norm("morrey_norm", value, "box_indicator_norm"));
    if (wantWeak)
      report.add(record_norm("weak_morrey_norm", indicator_weak_norm(value),
                             "indicator_weak_norm"));
    report.duration_ms = timed_ms(start);
    emit(report, output);
    return kExitOk;
  }

  if (normSlab->parsed()) {
    std::vector<double> finite =
        slabSides.empty() ? std::vector<double>{} : parse_reals(slabSides);
    if (slabThickness > 0.0) finite.push_back(slabThickness);
    const MorreyParams params = make_params(n, p, q);
    ExperimentReport report;
    report.experiment = "norm-slab";
    report.inputs = {{"finite_sides", finite}, {"params", to_json(params)}};
    const NormValue value = slab_indicator_norm(finite, params);
    report.add(record_norm("morrey_norm", value, "slab_indicator_norm"));
    if (wantWeak)
      report.add(record_norm("weak_morrey_norm", indicator_weak_norm(value),
                             "indicator_weak_norm"));
    report.duration_ms = timed_ms(start);
    emit(report, output);
    return (!value.finite() && requireFinite) ? kExitUnbounded : kExitOk;
  }

  if (normGrid->parsed()) {
    GridFunction f = [&]() {
      if (builtin == "box") {
        const AxisBox box = make_box(parse_reals(sidesArg));
        return box_indicator_grid(box, cover_box(box, gridH));
      }
      if (builtin == "slab") {
        return truncated_slab_grid(slabThickness > 0 ? slabThickness : 1.0,
                                   slabT, gridH);
      }
      if (!builtin.empty())
        throw CLI::ValidationError("unknown builtin '" + builtin + "'");
      if (csvIn.empty() || specIn.empty())
        throw CLI::ValidationError("need --builtin or --values with --spec");
      std::ifstream specStream(specIn);
      if (!specStream) throw std::runtime_error("cannot open " + specIn);
      nlohmann::json specJson;
      specStream >> specJson;
      std::ifstream valueStream(csvIn);
      if (!valueStream) throw std::runtime_error("cannot open " + csvIn);
      return grid_function_from_csv(valueStream, gridspec_from_json(specJson));
    }();
    const MorreyParams params = make_params(f.grid.dim(), p, q);
    CubeSearchPolicy policy = CubeSearchPolicy::default_for(params.n);
    if (dyadic) policy.sizes = CubeSearchPolicy::Sizes::dyadic;
    if (stride > 1) {
      policy.anchors = CubeSearchPolicy::Anchors::strided;
      policy.stride = stride;
    }
    ExperimentReport report;
    report.experiment = "norm-grid";
    report.inputs = {{"grid", to_json(f.grid)}, {"params", to_json(params)}};
    report.add(record_norm("morrey_norm_grid",
                           morrey_norm_grid(f, params, policy),
                           "morrey_norm_grid"));
    if (wantWeak)
      report.add(record_norm("weak_morrey_norm_grid",
                             weak_morrey_norm_grid(f, params, policy),
                             "weak_morrey_norm_grid"));
    report.duration_ms = timed_ms(start);
    emit(report, output);
    return kExitOk;
  }

  if (compose->parsed()) {
    if (n == 0) n = mapName == "exp1d" ? 1 : 2;
    const Map map = build_map(mapName, n, entriesArg, matrixArg, offsetArg);
    const MorreyParams params = make_params(map.n, p, q);
    ExperimentReport report;
    report.experiment = "compose";
    report.inputs = {{"map", map.name}, {"params", to_json(params)}};

    if (map.affine) {
      report.add(record_bound("lebesgue_opnorm",
                              lebesgue_opnorm_affine(*map.affine, params.p),
                              "lebesgue_opnorm_affine"));
      report.add(record_bound("morrey_opnorm_upper",
                              morrey_opnorm_upper_affine(*map.affine, params),
                              "morrey_opnorm_upper_affine"));
    }

    TestFamily family;
    if (familyArg == "boxes" || (familyArg == "intervals" && map.n == 1)) {
      family.boxes = default_box_family(map.n);
    } else if (familyArg == "witness" ||
               (familyArg == "default" && map.affine &&
                is_diagonal(*map.affine))) {
      if (!map.affine || !is_diagonal(*map.affine))
        throw CLI::ValidationError("--family witness needs a diagonal map");
      std::vector<double> entries(map.n);
      for (int d = 0; d < map.n; ++d) entries[d] = map.affine->A(d, d);
      family.boxes = diag_witness_family(entries);
    } else if (familyArg == "default") {
      family.boxes = default_box_family(map.n);
    } else if (familyArg == "intervals") {
      throw CLI::ValidationError("--family intervals needs a 1-D map");
    } else {
      throw CLI::ValidationError("unknown family '" + familyArg + "'");
    }
    LowerSearchOptions options;
    options.policy = CubeSearchPolicy::default_for(map.n);
    report.add(record_bound(
        "morrey_opnorm_lower",
        opnorm_lower_search(map, params, family, options),
        "opnorm_lower_search"));
    report.add(record_bound("set_ratio",
                            set_ratio_estimator(map, family.boxes),
                            "set_ratio_estimator"));
    if (wantProfile) {
      const AxisBox domain =
          domainArg.empty() ? make_box(std::vector<double>(map.n, -2.0),
                                       std::vector<double>(map.n, 4.0))
                            : box_from_bounds(domainArg, map.n);
      const SingularProfile profile = jacobian_profile(map, domain, samples);
      double minAlpha = kInf, maxAlpha = 0.0, maxDetErr = 0.0;
      for (std::size_t i = 0; i < profile.alphas.size(); ++i) {
        minAlpha = std::min(minAlpha, profile.alphas[i](0));
        maxAlpha = std::max(maxAlpha, profile.alphas[i](map.n - 1));
      }
      for (double det : profile.dets)
        maxDetErr = std::max(maxDetErr, std::abs(std::abs(det) - 1.0));
      report.add(record_value("profile_min_alpha1", minAlpha, "info",
                              "jacobian_profile"));
      report.add(record_value("profile_max_alphaN", maxAlpha, "info",
                              "jacobian_profile"));
      report.add(record_value("profile_max_abs_det_minus_1", maxDetErr, "info",
                              "jacobian_profile"));
    }
    report.duration_ms = timed_ms(start);
    emit(report, output);
    return kExitOk;
  }

  if (certify->parsed()) {
    if (n == 0) n = mapName == "exp1d" ? 1 : 2;
    const Map map = build_map(mapName, n, entriesArg, matrixArg, offsetArg);
    const AxisBox domain =
        domainArg.empty() ? make_box(std::vector<double>(map.n, -1.0),
                                     std::vector<double>(map.n, 2.0))
                          : box_from_bounds(domainArg, map.n);
    const SingularProfile profile = jacobian_profile(map, domain, samples);
    CertifyOptions certOptions;
    certOptions.max_spacing = maxSpacing;
    certOptions.max_neighbor_jump = maxJump;
    const BiLipCertificate cert = bilip_certify(profile, certC, certOptions);

    ExperimentReport report;
    report.experiment = "certify";
    report.inputs = {{"map", map.name},
                     {"C", certC},
                     {"domain", to_json(domain)},
                     {"samples", samples}};
    report.add(record_value("L_upper", cert.L_upper, "info", "bilip_certify"));
    report.add(record_value("c_lower", cert.c_lower, "info", "bilip_certify"));
    report.add(record_value("inverse_lipschitz_bound",
                            cert.inverse_lipschitz_bound, "upper_bound",
                            "bilip_certify"));
    report.add(record_value("spacing", cert.spacing, "info", "bilip_certify"));
    report.check(std::string("verdict=") + cert_verdict_name(cert.verdict),
                 cert.verdict == CertVerdict::certified, "bilip_certify",
                 cert.detail);
    report.duration_ms = timed_ms(start);
    emit(report, output);
    switch (cert.verdict) {
      case CertVerdict::certified:
        return kExitOk;
      case CertVerdict::failed:
        return kExitFailed;
      case CertVerdict::inconclusive:
        return kExitInconclusive;
    }
  }

  if (verify->parsed()) {
    ExperimentReport report;
    if (!spaceFile.empty() || !sigmaFile.empty() || !normJson.empty()) {
      // Single custom gate from JSON descriptors.
      if (suiteName != "weak-gate")
        throw CLI::ValidationError("--space/--sigma/--norm apply to weak-gate");
      if (spaceFile.empty() || sigmaFile.empty())
        throw CLI::ValidationError("custom gate needs --space and --sigma");
      std::ifstream spaceStream(spaceFile);
      if (!spaceStream) throw std::runtime_error("cannot open " + spaceFile);
      nlohmann::json spaceJson;
      spaceStream >> spaceJson;
      const FiniteSpace space = finite_space_from_json(spaceJson);
      std::ifstream sigmaStream(sigmaFile);
      if (!sigmaStream) throw std::runtime_error("cannot open " + sigmaFile);
      nlohmann::json sigmaJson;
      sigmaStream >> sigmaJson;
      const CellMap cellMap = cellmap_from_json(sigmaJson, space.size());
      const LatticeNorm norm =
          normJson.empty()
              ? morrey1d_norm(suiteP, suiteQ)
              : norm_from_json(nlohmann::json::parse(normJson));
      const GateReport gate =
          verify_gate(cellMap, space, norm, {1000, seed});
      report.experiment = "weak-gate-custom";
      report.inputs = {{"space", spaceJson},
                       {"sigma", sigmaJson},
                       {"norm", norm.name}};
      report.add(record_value("K", gate.K, "exact", "indicator_ratio_sup"));
      report.add(record_value("empirical", gate.empirical, "lower_bound",
                              "weak_opnorm_empirical"));
      report.check("gate_equality", gate.pass, "verify_gate", gate.detail);
    } else {
      SuiteOptions options;
      options.seed = seed;
      options.include_quasi = includeQuasi;
      options.p = suiteP;
      options.q = suiteQ;
      report = run_suite(suiteName, options);
    }
    report.duration_ms = timed_ms(start);
    emit(report, output);
    return report.all_pass ? kExitOk : kExitFailed;
  }

  return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(expand_config(argc, argv));
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
