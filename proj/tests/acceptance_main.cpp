// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run via ctest (target: acceptance) or directly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "morreylab/composition.hpp"
#include "morreylab/experiments.hpp"
#include "morreylab/grid_norms.hpp"
#include "morreylab/parallel.hpp"
#include "morreylab/weak_gate.hpp"

using namespace morreylab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Criterion {
  bool pass = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      pass = false;
      detail << " FAILED{" << what << "}";
    }
  }
};

MorreyParams params_in_regime(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> qd(0.5, 2.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double q = qd(rng);
  const double pLo = m == 1 ? n * q : n * q / m;
  const double pHi = m == 1 ? 3.0 * n * q : n * q / (m - 1);
  return make_params(n, std::max(pLo + u(rng) * (pHi - pLo), q), q);
}

// 1. Closed form vs dense R-sweep oracle on 500 randomized boxes, every
//    regime index represented by construction; < 30 s.
Criterion criterion_closed_forms() {
  Criterion c;
  const auto start = Clock::now();
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> logSide(std::log(1e-2), std::log(1e2));
  double maxRel = 0.0, maxOver = 0.0;
  int rep = 0;
  for (int count = 0; count < 500; ++count, ++rep) {
    const int n = 1 + rep % 4;
    const int m = 1 + (rep / 4) % n;
    const MorreyParams params = params_in_regime(rng, n, m);
    std::vector<double> sides(n);
    for (double& s : sides) s = std::exp(logSide(rng));
    const double closed = box_indicator_norm(make_box(sides), params).value;
    const double swept = oracle_r_sweep(sides, params, {200000, 1e3}).value;
    maxRel = std::max(maxRel, std::abs(swept - closed) / closed);
    maxOver = std::max(maxOver, swept / closed - 1.0);
  }
  const double elapsed = seconds_since(start);
  c.require(maxRel <= 1e-6, "rel " + std::to_string(maxRel));
  c.require(maxOver <= 1e-12, "overshoot " + std::to_string(maxOver));
  c.require(elapsed < 30.0, "runtime " + std::to_string(elapsed) + "s");
  c.detail << "max rel " << maxRel << ", overshoot " << maxOver << ", "
           << elapsed << " s";
  return c;
}

// 2. Slab norms: unit value exactly, truncated-slab grid within 5%,
//    unbounded verdict when nq > kp.
Criterion criterion_slab() {
  Criterion c;
  const NormValue unit = slab_indicator_norm({1.0}, make_params(2, 2.0, 1.0));
  c.require(unit.value == 1.0, "slab norm != 1");

  const GridFunction truncated = truncated_slab_grid(1.0, 64.0, 0.25);
  const NormValue grid = morrey_norm_grid(truncated, make_params(2, 2.0, 1.0),
                                          CubeSearchPolicy::default_for(2));
  c.require(std::abs(grid.value - 1.0) <= 0.05,
            "grid slab " + std::to_string(grid.value));

  c.require(!slab_indicator_norm({1.0}, make_params(2, 1.0, 1.0)).finite(),
            "nq > kp not flagged unbounded (n=2)");
  c.require(!slab_indicator_norm({2.0}, make_params(3, 1.5, 1.0)).finite(),
            "nq > kp not flagged unbounded (n=3)");
  c.detail << "slab=1 exact, grid=" << grid.value;
  return c;
}

// 3. Scaling laws to relative 1e-12 for t in {1/7, 1, 3, 16}.
Criterion criterion_scaling() {
  Criterion c;
  const std::vector<MorreyParams> paramsList = {
      make_params(1, 2.0, 1.0), make_params(2, 1.5, 1.0),
      make_params(2, 2.0, 1.0), make_params(3, 2.0, 0.8)};
  const std::vector<std::vector<double>> sidesList = {
      {3.0}, {1.0, 4.0}, {0.5, 2.0, 7.0}};
  for (const MorreyParams& params : paramsList) {
    const AxisBox base = make_box(sidesList[params.n - 1]);
    const double baseNorm = box_indicator_norm(base, params).value;
    for (double t : {1.0 / 7.0, 1.0, 3.0, 16.0}) {
      AxisBox scaled = base;
      for (double& s : scaled.sides) s *= t;
      const double got = box_indicator_norm(scaled, params).value;
      const double want =
          dilation_norm_factor(t, params, Dilation::support_scale) * baseNorm;
      c.require(std::abs(got - want) <= 1e-12 * want, "support scaling");

      const std::vector<double> entries(params.n, t);
      const double opnorm =
          diag_opnorm_lower(entries, params, diag_witness_family(entries))
              .value;
      const double wantOp =
          dilation_norm_factor(t, params, Dilation::precompose);
      c.require(std::abs(opnorm - wantOp) <= 1e-12 * wantOp, "scalar opnorm");
    }
  }
  c.detail << "4 parameter sets x 4 dilations";
  return c;
}

// 4. diag(1,4) at (2, 3/2, 1): witness boxes attain 4^{-1/3} to 1e-9.
Criterion criterion_diag_lower() {
  Criterion c;
  const std::vector<double> entries{1.0, 4.0};
  const OperatorBound bound = diag_opnorm_lower(
      entries, make_params(2, 1.5, 1.0), diag_witness_family(entries));
  const double want = std::pow(4.0, -1.0 / 3.0);
  c.require(std::abs(bound.value - want) <= 1e-9 * want,
            "got " + std::to_string(bound.value));
  c.detail << "lower=" << bound.value << " target=" << want;
  return c;
}

// 5. 100 random invertible affine maps (n=2): certified lower <= upper
//    bound; Lebesgue operator norm |det|^{-1/p} to 1e-9.
Criterion criterion_affine_consistency() {
  Criterion c;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  const MorreyParams params = make_params(2, 1.5, 1.0);
  LowerSearchOptions options;
  options.policy = CubeSearchPolicy::default_for(2);
  options.policy.sizes = CubeSearchPolicy::Sizes::dyadic;
  options.raster = Raster::inner;  // certified subsets: rigorous lower bounds
  options.raster_cells = 48;
  TestFamily family;
  family.boxes = {make_box({1.0, 1.0}), make_box({0.5, 2.0}),
                  make_box({-1.0, 0.25}, {2.0, 1.0})};

  int done = 0;
  while (done < 100) {
    Eigen::MatrixXd A(2, 2);
    A << entry(rng), entry(rng), entry(rng), entry(rng);
    if (std::abs(A.determinant()) < 0.05) continue;
    ++done;
    Eigen::VectorXd b(2);
    b << entry(rng), entry(rng);
    const AffineMap affine = make_affine(A, b);

    const double expected = std::pow(std::abs(A.determinant()), -1.0 / params.p);
    const double lebesgue = lebesgue_opnorm_affine(affine, params.p).value;
    c.require(std::abs(lebesgue - expected) <= 1e-9 * expected,
              "Lebesgue opnorm");

    const Map map = map_from_affine(affine);
    const double lower =
        opnorm_lower_search(map, params, family, options).value;
    const double upper = morrey_opnorm_upper_affine(affine, params).value;
    c.require(lower <= upper * (1.0 + 1e-9), "lower > upper");
  }
  c.detail << "100 maps";
  return c;
}

// 6. Weak-type gate matrix with exact equality; < 60 s.
Criterion criterion_weak_gate() {
  Criterion c;
  const auto start = Clock::now();
  const ExperimentReport report = suite_weak_gate(false, 0);
  const double elapsed = seconds_since(start);
  int gates = 0;
  for (const ResultRecord& r : report.results) {
    if (r.kind == "pass") ++gates;
    if (r.kind == "fail") c.require(false, r.name);
  }
  c.require(report.all_pass, "matrix not all-pass");
  c.require(elapsed < 60.0, "runtime " + std::to_string(elapsed) + "s");
  c.detail << gates << " gates, " << elapsed << " s";
  return c;
}

// 7. Indicator weak-norm identity for all 2^12 subsets at N = 12.
Criterion criterion_indicator_weak_identity() {
  Criterion c;
  const std::size_t N = 12;
  const FiniteSpace space =
      make_finite_space(std::vector<double>(N, 1.0), {N});
  const std::vector<LatticeNorm> norms = {lp_norm(1.0),
                                          morrey1d_norm(2.0, 1.0)};
  for (const LatticeNorm& norm : norms) {
    std::vector<double> chi(N);
    for (std::uint64_t mask = 1; mask < (1ull << N); ++mask) {
      for (std::size_t i = 0; i < N; ++i)
        chi[i] = (mask & (1ull << i)) ? 1.0 : 0.0;
      if (weak_norm_finite(chi, space, norm) != norm(space, chi)) {
        c.require(false, "subset " + std::to_string(mask) + " in " + norm.name);
        break;
      }
    }
  }
  c.detail << (1ull << N) - 1 << " subsets x " << norms.size() << " norms, exact";
  return c;
}

// 8. Cubic-shear dichotomy: det = 1 to 1e-9, Lebesgue ratio 1 within 1%,
//    Morrey (2,1) witness ratios strictly increasing beyond 10.
Criterion criterion_shear_dichotomy() {
  Criterion c;
  const SingularProfile profile = jacobian_profile(
      shear_cubic_map(), make_box({-3.0, -3.0}, {6.0, 6.0}), 33);
  double maxDetErr = 0.0;
  for (double det : profile.dets)
    maxDetErr = std::max(maxDetErr, std::abs(det - 1.0));
  c.require(maxDetErr <= 1e-9, "det error " + std::to_string(maxDetErr));

  const ExperimentReport lebesgue = suite_shear_lebesgue();
  c.require(lebesgue.all_pass, "Lebesgue ratio suite");

  const ExperimentReport growth = suite_shear_growth(2.0, 1.0);
  c.require(growth.all_pass, "growth suite");
  double last = 0.0;
  for (const ResultRecord& r : growth.results)
    if (r.has_value && r.name.rfind("witness_ratio", 0) == 0) last = r.value;
  c.detail << "det err " << maxDetErr << ", final ratio " << last;
  return c;
}

// 9. Piecewise-exponential map: volume bound K = 1 (ratio <= 1 + 1e-6),
//    Morrey ratios bounded by 4 up to x = 20, sampled derivative > 1e3.
Criterion criterion_exp_map() {
  Criterion c;
  const ExperimentReport report = suite_exp_bounded();
  c.require(report.all_pass, "exp-bounded suite");
  double ratio = 0.0, derivative = 0.0;
  for (const ResultRecord& r : report.results) {
    if (r.name == "set_ratio") ratio = r.value;
    if (r.name == "max_sampled_derivative") derivative = r.value;
  }
  c.require(ratio <= 1.0 + 1e-6, "set ratio " + std::to_string(ratio));
  c.require(derivative > 1e3, "derivative too small");
  c.detail << "set ratio " << ratio << ", derivative " << derivative;
  return c;
}

// 10. SVD kernel on 10^3 random matrices (n <= 4) plus the golden-ratio
//     shear values.
Criterion criterion_svd() {
  Criterion c;
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  double maxRebuild = 0.0, maxProdRel = 0.0;
  int done = 0;
  while (done < 1000) {
    const int n = 1 + static_cast<int>(rng() % 4);
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = entry(rng);
    const double det = std::abs(A.determinant());
    if (det < 0.05) continue;  // keep the product comparison well-posed
    ++done;
    const SvdResult svd = svd_ascending(A);
    const Eigen::MatrixXd rebuilt =
        svd.U * svd.alpha.asDiagonal() * svd.V.transpose();
    maxRebuild = std::max(maxRebuild, (rebuilt - A).cwiseAbs().maxCoeff());
    maxProdRel =
        std::max(maxProdRel, std::abs(svd.alpha.prod() - det) / det);
  }
  c.require(maxRebuild <= 1e-10, "reconstruction " + std::to_string(maxRebuild));
  c.require(maxProdRel <= 1e-9, "det product " + std::to_string(maxProdRel));

  Eigen::MatrixXd shear(2, 2);
  shear << 1.0, 1.0, 0.0, 1.0;
  const SvdResult s = svd_ascending(shear);
  c.require(std::abs(s.alpha(0) - (std::sqrt(5.0) - 1.0) / 2.0) <= 1e-12,
            "alpha_1 golden value");
  c.require(std::abs(s.alpha(1) - (std::sqrt(5.0) + 1.0) / 2.0) <= 1e-12,
            "alpha_2 golden value");
  c.detail << "rebuild " << maxRebuild << ", det rel " << maxProdRel;
  return c;
}

// 11. Every suite's JSON is bit-identical across thread counts {1, 4, 8}.
Criterion criterion_determinism() {
  Criterion c;
  for (const std::string& name : suite_names()) {
    std::vector<std::string> dumps;
    for (int threads : {1, 4, 8}) {
      set_thread_override(threads);
      dumps.push_back(run_suite(name, 0, false).to_json(false).dump());
    }
    set_thread_override(0);
    c.require(dumps[0] == dumps[1] && dumps[0] == dumps[2],
              "suite " + name + " differs across thread counts");
  }
  c.detail << suite_names().size() << " suites x threads {1,4,8}";
  return c;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Criterion (*run)();
  };
  const std::vector<Entry> criteria = {
      {"1 closed-form vs oracle", criterion_closed_forms},
      {"2 slab norms", criterion_slab},
      {"3 scaling laws", criterion_scaling},
      {"4 diagonal lower bound", criterion_diag_lower},
      {"5 affine consistency", criterion_affine_consistency},
      {"6 weak gate", criterion_weak_gate},
      {"7 indicator weak-norm identity", criterion_indicator_weak_identity},
      {"8 cubic-shear dichotomy", criterion_shear_dichotomy},
      {"9 exponential map bounds", criterion_exp_map},
      {"10 SVD kernel", criterion_svd},
      {"11 determinism across threads", criterion_determinism},
  };

  int passed = 0;
  for (const Entry& entry : criteria) {
    const Criterion result = entry.run();
    std::printf("[%s] criterion %s (%s)\n", result.pass ? "PASS" : "FAIL",
                entry.name, result.detail.str().c_str());
    std::fflush(stdout);
    if (result.pass) ++passed;
  }
  std::printf("ACCEPTANCE: %d/%zu criteria passed\n", passed, criteria.size());
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
