#include "morreylab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "morreylab/composition.hpp"
#include "morreylab/grid_norms.hpp"
#include "morreylab/weak_gate.hpp"

namespace morreylab {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

MorreyParams random_params_in_regime(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> qd(0.5, 2.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double q = qd(rng);
  double pLo, pHi;
  if (m == 1) {
    pLo = n * q;
    pHi = 3.0 * n * q;
  } else {
    pLo = n * q / m;
    pHi = n * q / (m - 1);
  }
  const double p = std::max(pLo + u(rng) * (pHi - pLo), q);
  return make_params(n, p, q);
}

std::vector<double> random_sides(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> logSide(std::log(1e-2),
                                                 std::log(1e2));
  std::vector<double> sides(n);
  for (double& s : sides) s = std::exp(logSide(rng));
  return sides;
}

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

ExperimentReport suite_closed_forms(std::uint64_t seed, std::size_t box_count,
                                    std::size_t sweep_points) {
  const auto start = Clock::now();
  ExperimentReport report;
  report.experiment = "closed-forms";
  report.inputs = {{"seed", seed},
                   {"boxes", box_count},
                   {"sweep_points", sweep_points}};
  report.tolerances = {{"rel_match", 1e-6}, {"oracle_overshoot", 1e-12}};

  std::mt19937_64 rng(seed);
  double maxRel = 0.0;
  double maxOvershoot = 0.0;
  bool allMatch = true;
  bool noOvershoot = true;
  for (std::size_t i = 0; i < box_count; ++i) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int m = 1 + static_cast<int>(rng() % n);
    const MorreyParams params = random_params_in_regime(rng, n, m);
    const AxisBox box = make_box(random_sides(rng, n));
    const double closed = box_indicator_norm(box, params).value;
    const double swept =
        oracle_r_sweep(box.sides, params, {sweep_points, 1e3}).value;
    const double rel = std::abs(swept - closed) / closed;
    maxRel = std::max(maxRel, rel);
    maxOvershoot = std::max(maxOvershoot, swept / closed - 1.0);
    allMatch = allMatch && rel <= 1e-6;
    noOvershoot = noOvershoot && swept <= closed * (1.0 + 1e-12);
  }
  report.add(record_value("max_rel_difference", maxRel, "info",
                          "box_indicator_norm vs oracle_r_sweep"));
  report.add(record_value("max_oracle_overshoot", maxOvershoot, "info",
                          "oracle_r_sweep"));
  report.check("closed_form_matches_oracle", allMatch, "oracle_r_sweep",
               "max rel " + fmt(maxRel));
  report.check("oracle_never_exceeds_closed_form", noOvershoot,
               "oracle_r_sweep", "max overshoot " + fmt(maxOvershoot));

  // Named values.
  const NormValue named = box_indicator_norm(make_box({1.0, 4.0}),
                                             make_params(2, 1.5, 1.0));
  report.add(record_norm("norm_box_1x4_p1.5_q1", named, "box_indicator_norm"));
  report.check("norm_box_1x4_equals_4^(1/3)",
               std::abs(named.value - std::cbrt(4.0)) <= 1e-12,
               "box_indicator_norm");
  report.duration_ms = elapsed_ms(start);
  return report;
}

ExperimentReport suite_weak_gate(bool include_quasi, std::uint64_t seed) {
  const auto start = Clock::now();
  ExperimentReport report;
  report.experiment = "weak-gate";
  report.inputs = {{"include_quasi", include_quasi}, {"seed", seed}};
  report.tolerances = {{"equality_rel", 1e-12}};

  const EmpiricalFamilyConfig config{1000, seed};
  for (std::size_t N : {4u, 8u, 12u}) {
    const FiniteSpace space =
        make_finite_space(std::vector<double>(N, 1.0), {N});

    std::vector<std::pair<std::string, CellMap>> maps;
    {
      std::vector<std::size_t> identity(N), constant(N, 0), cycle(N),
          reverse(N), halve(N), clampShift(N);
      for (std::size_t i = 0; i < N; ++i) {
        identity[i] = i;
        cycle[i] = (i + 1) % N;
        reverse[i] = N - 1 - i;
        halve[i] = i / 2;
        clampShift[i] = std::min(i + 1, N - 1);
      }
      maps.emplace_back("identity", make_cell_map(identity, N));
      maps.emplace_back("constant", make_cell_map(constant, N));
      maps.emplace_back("cycle", make_cell_map(cycle, N));
      maps.emplace_back("reverse", make_cell_map(reverse, N));
      maps.emplace_back("halve", make_cell_map(halve, N));
      maps.emplace_back("clamp-shift", make_cell_map(clampShift, N));
    }
    const std::vector<LatticeNorm> norms = {
        lp_norm(1.0), lp_norm(2.0), morrey1d_norm(2.0, 1.0),
        morrey1d_norm(3.0, 2.0)};

    for (const auto& [mapName, cellMap] : maps) {
      for (const LatticeNorm& norm : norms) {
        const GateReport gate = verify_gate(cellMap, space, norm, config);
        std::ostringstream name;
        name << "gate N=" << N << " map=" << mapName << " norm=" << norm.name;
        report.check(name.str(), gate.pass, "verify_gate", gate.detail);
      }
    }
  }

  // 2-D Morrey layout exercise (3 x 4).
  {
    const std::size_t N = 12;
    const FiniteSpace space =
        make_finite_space(std::vector<double>(N, 1.0), {3, 4});
    std::vector<std::size_t> halve(N);
    for (std::size_t i = 0; i < N; ++i) halve[i] = i / 2;
    const LatticeNorm norm = morrey2d_norm(2.0, 1.0);
    const GateReport gate =
        verify_gate(make_cell_map(halve, N), space, norm, config);
    report.check("gate N=12 map=halve norm=" + norm.name, gate.pass,
                 "verify_gate", gate.detail);
  }

  if (include_quasi) {
    // q < 1 makes the norm a quasi-norm, where the equality is not
    // guaranteed: evidence only.
    const std::size_t N = 8;
    const FiniteSpace space =
        make_finite_space(std::vector<double>(N, 1.0), {N});
    std::vector<std::size_t> halve(N);
    for (std::size_t i = 0; i < N; ++i) halve[i] = i / 2;
    const LatticeNorm norm = morrey1d_norm(2.0, 0.5);
    const GateReport gate =
        verify_gate(make_cell_map(halve, N), space, norm, config);
    report.add(record_value("quasi_gate_K", gate.K, "info", "verify_gate",
                            gate.detail));
    report.add(record_value("quasi_gate_empirical", gate.empirical, "info",
                            "verify_gate",
                            gate.pass ? "equality held" : "equality failed"));
  }
  report.duration_ms = elapsed_ms(start);
  return report;
}

ExperimentReport suite_scaling() {
  const auto start = Clock::now();
  ExperimentReport report;
  report.experiment = "scaling";
  report.tolerances = {{"rel", 1e-12}};

  const std::vector<MorreyParams> paramsList = {
      make_params(1, 2.0, 1.0), make_params(2, 1.5, 1.0),
      make_params(2, 2.0, 1.0), make_params(3, 2.0, 0.8)};
  // Indexed by n-1.
  const std::vector<std::vector<double>> sidesList = {
      {3.0}, {1.0, 4.0}, {0.5, 2.0, 7.0}};

  for (std::size_t i = 0; i < paramsList.size(); ++i) {
    const MorreyParams& params = paramsList[i];
    const AxisBox base = make_box(sidesList[params.n - 1]);
    const double baseNorm = box_indicator_norm(base, params).value;
    for (double t : {1.0 / 7.0, 1.0, 3.0, 16.0}) {
      AxisBox scaled = base;
      for (double& s : scaled.sides) s *= t;
      const double got = box_indicator_norm(scaled, params).value;
      const double want =
          dilation_norm_factor(t, params, Dilation::support_scale) * baseNorm;
      std::ostringstream name;
      name << "support_scaling n=" << params.n << " p=" << params.p
           << " q=" << params.q << " t=" << fmt(t);
      report.check(name.str(), std::abs(got - want) <= 1e-12 * want,
                   "box_indicator_norm",
                   "got " + fmt(got) + " want " + fmt(want));

      const std::vector<double> entries(params.n, t);
      const OperatorBound opnorm = diag_opnorm_lower(
          entries, params, diag_witness_family(entries));
      const double wantOp =
          dilation_norm_factor(t, params, Dilation::precompose);
      std::ostringstream opName;
      opName << "scalar_opnorm n=" << params.n << " p=" << params.p
             << " t=" << fmt(t);
      report.check(opName.str(),
                   std::abs(opnorm.value - wantOp) <= 1e-12 * wantOp,
                   "diag_opnorm_lower",
                   "got " + fmt(opnorm.value) + " want " + fmt(wantOp));
    }
  }
  report.duration_ms = elapsed_ms(start);
  return report;
}

ExperimentReport suite_shear_growth(double p, double q) {
  if (!(p > q))
    throw std::invalid_argument(
        "shear-growth: the unboundedness claim needs p > q");
  const auto start = Clock::now();
  ExperimentReport report;
  report.experiment = "shear-growth";
  report.inputs = {{"p", p}, {"q", q}};
  // The >10 threshold is a harness choice, not a quantity from the theory.
  report.tolerances = {{"growth_threshold", 10.0}};

  const MorreyParams params = make_params(2, p, q);
  const Map map = shear_cubic_map();
  LowerSearchOptions options;
  options.policy = CubeSearchPolicy::default_for(2);
  options.raster_cells = 128;

  const double c = 0.5;
  std::vector<double> ratios;
  for (double T : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double stretch = 3.0 * T * T + 1.0;
    const double y0 = T * T * T + T;
    // Thin box at x1 = T whose preimage is nearly a square: the x2 side
    // stretches by 3T^2+1 while the x1 side shrinks by the same factor.
    const AxisBox witness =
        make_box({y0, 0.0}, {c, c / (stretch * stretch)});
    const OperatorBound bound =
        opnorm_lower_search(map, params, {{witness}, {}}, options);
    ratios.push_back(bound.value);
    report.add(record_bound("witness_ratio_T=" + fmt(T), bound,
                            "opnorm_lower_search"));
  }
  bool increasing = true;
  for (std::size_t i = 1; i < ratios.size(); ++i)
    increasing = increasing && ratios[i] > ratios[i - 1];
  report.check("ratios_strictly_increasing", increasing,
               "opnorm_lower_search");
  report.check("ratio_exceeds_10", ratios.back() > 10.0,
               "opnorm_lower_search", "max " + fmt(ratios.back()));
  report.duration_ms = elapsed_ms(start);
  return report;
}

ExperimentReport suite_shear_lebesgue() {
  const auto start = Clock::now();
  ExperimentReport report;
  report.experiment = "shear-lebesgue";
  report.tolerances = {{"det_abs", 1e-9}, {"ratio_rel", 0.01}};

  const Map map = shear_cubic_map();
  const SingularProfile profile =
      jacobian_profile(map, make_box({-3.0, -3.0}, {6.0, 6.0}), 33);
  double maxDetErr = 0.0;
  for (double det : profile.dets)
    maxDetErr = std::max(maxDetErr, std::abs(det - 1.0));
  report.add(record_value("max_det_error", maxDetErr, "info",
                          "jacobian_profile"));
  report.check("determinant_is_1", maxDetErr <= 1e-9, "jacobian_profile");

  const std::vector<AxisBox> sets = {
      make_box({0.0, 0.0}, {2.0, 1.0}),    // x1 in [0,1]
      make_box({2.0, 0.0}, {8.0, 1.0}),    // x1 in [1,2]
      make_box({-5.0, -1.0}, {5.0, 2.0}),  // straddles the origin
      make_box({0.0, 0.5}, {4.0, 1.5}),
  };
  SetRatioConfig config;
  config.initial_cells = 128;
  config.agree_rel = 0.005;
  config.max_refines = 5;
  const OperatorBound ratio = set_ratio_estimator(map, sets, config);
  report.add(record_bound("lebesgue_set_ratio", ratio, "set_ratio_estimator"));
  report.check("set_ratio_is_1", std::abs(ratio.value - 1.0) <= 0.01,
               "set_ratio_estimator", ratio.source);
  report.duration_ms = elapsed_ms(start);
  return report;
}

ExperimentReport suite_exp_bounded() {
  const auto start = Clock::now();
  ExperimentReport report;
  report.experiment = "exp-bounded";
  report.tolerances = {{"set_ratio_max", 1.0 + 1e-6},
                       {"morrey_ratio_max", 4.0},
                       {"derivative_min", 1e3}};

  const Map map = exp1d_map();
  const MorreyParams params = make_params(1, 2.0, 1.0);

  std::vector<AxisBox> intervals;
  for (double a : {0.0, 1.0, 5.0, 10.0, 15.0, 20.0})
    for (double len : {0.1, 1.0, 5.0})
      intervals.push_back(make_box({a}, {len}));
  intervals.push_back(make_box({-2.0}, {3.0}));   // straddles 0
  intervals.push_back(make_box({-3.0}, {2.0}));   // negative half-line part

  const OperatorBound setRatio = set_ratio_estimator(map, intervals);
  report.add(record_bound("set_ratio", setRatio, "set_ratio_estimator"));
  report.check("volume_ratio_at_most_1", setRatio.value <= 1.0 + 1e-6,
               "set_ratio_estimator", setRatio.source);

  LowerSearchOptions options;
  options.policy = CubeSearchPolicy::default_for(1);
  const OperatorBound morreyRatio =
      opnorm_lower_search(map, params, {intervals, {}}, options);
  report.add(record_bound("morrey_interval_ratio", morreyRatio,
                          "opnorm_lower_search"));
  report.check("morrey_ratio_bounded_by_4", morreyRatio.value <= 4.0,
               "opnorm_lower_search");

  const SingularProfile profile =
      jacobian_profile(map, make_box({0.0}, {20.0}), 201);
  double maxDerivative = 0.0;
  for (const auto& alpha : profile.alphas)
    maxDerivative = std::max(maxDerivative, alpha(0));
  report.add(record_value("max_sampled_derivative", maxDerivative, "info",
                          "jacobian_profile", "domain [0,20]"));
  report.check("derivative_exceeds_1e3", maxDerivative > 1e3,
               "jacobian_profile");
  report.duration_ms = elapsed_ms(start);
  return report;
}

std::vector<std::string> suite_names() {
  return {"closed-forms", "weak-gate",      "scaling",
          "shear-growth", "shear-lebesgue", "exp-bounded"};
}

ExperimentReport run_suite(const std::string& name,
                           const SuiteOptions& options) {
  if (name == "closed-forms") return suite_closed_forms(options.seed);
  if (name == "weak-gate")
    return suite_weak_gate(options.include_quasi, options.seed);
  if (name == "scaling") return suite_scaling();
  if (name == "shear-growth") return suite_shear_growth(options.p, options.q);
  if (name == "shear-lebesgue") return suite_shear_lebesgue();
  if (name == "exp-bounded") return suite_exp_bounded();
  throw std::invalid_argument("unknown suite '" + name + "'");
}

ExperimentReport run_suite(const std::string& name, std::uint64_t seed,
                           bool include_quasi) {
  SuiteOptions options;
  options.seed = seed;
  options.include_quasi = include_quasi;
  return run_suite(name, options);
}

}  // namespace morreylab
