#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace morreylab {

// Finite measure space: N cells with positive weights, optionally laid out
// as a 1-D or 2-D lattice for the discrete Morrey norms.
struct FiniteSpace {
  std::vector<double> weights;
  std::vector<std::size_t> layout;  // empty, {N}, or {rows, cols}

  std::size_t size() const { return weights.size(); }
};
FiniteSpace make_finite_space(std::vector<double> weights,
                              std::vector<std::size_t> layout = {});
// {"weights":[...], "layout":[...]} or {"N":k} for unit weights.
FiniteSpace finite_space_from_json(const nlohmann::json& j);

// A lattice norm on the finite space: absolute-value invariant, positively
// homogeneous, monotone under |f| <= |g|. The quasi flag marks instances
// (q < 1 Morrey) for which the gate equality is not guaranteed.
struct LatticeNorm {
  std::string name;
  std::function<double(const FiniteSpace&, const std::vector<double>&)> eval;
  bool quasi = false;

  double operator()(const FiniteSpace& space,
                    const std::vector<double>& f) const {
    return eval(space, f);
  }
};

// Weighted discrete L^p.
LatticeNorm lp_norm(double p);
// sup over index intervals I of |I|^{1/p-1/q} (sum_{i in I} |f_i|^q mu_i)^{1/q}
// with |I| the measure of I.
LatticeNorm morrey1d_norm(double p, double q);
// Same over axis rectangles of the 2-D layout.
LatticeNorm morrey2d_norm(double p, double q);
// {"kind":"lp"|"morrey1d"|"morrey2d","p":..,"q":..}
LatticeNorm norm_from_json(const nlohmann::json& j);

// Total self-map of the cells; C_sigma f = f o sigma.
struct CellMap {
  std::vector<std::size_t> sigma;
};
CellMap make_cell_map(std::vector<std::size_t> sigma, std::size_t N);
CellMap cellmap_from_json(const nlohmann::json& j, std::size_t N);
std::vector<double> compose_cells(const CellMap& map,
                                  const std::vector<double>& f);
std::vector<double> preimage_indicator(const CellMap& map,
                                       const std::vector<double>& chiE);

// Exact weak quasi-norm sup_{lambda>0} lambda ||chi_{|f|>lambda}||: the
// supremum over each level interval sits at its left end, so it equals
// max over distinct values v of |f| of v * ||chi_{|f|>=v}||.
double weak_norm_finite(const std::vector<double>& f, const FiniteSpace& space,
                        const LatticeNorm& norm);

// Exhaustive sup over nonempty subsets E of ||chi_{sigma^{-1}(E)}|| / ||chi_E||.
struct RatioResult {
  double K = 0.0;
  std::vector<std::size_t> witness;  // cells of the maximizing subset
  bool exact = true;                 // false when sampled (N > 20)
};
RatioResult indicator_ratio_sup(const CellMap& map, const FiniteSpace& space,
                                const LatticeNorm& norm);

// Empirical lower bound on the weak-type operator norm over the default
// family: all indicators (N <= 20), all {0,1,2}-valued vectors (N <= 8), and
// seeded random nonnegative vectors.
struct EmpiricalFamilyConfig {
  std::size_t random_count = 1000;
  std::uint64_t seed = 0;
};
double weak_opnorm_empirical(const CellMap& map, const FiniteSpace& space,
                             const LatticeNorm& norm,
                             const EmpiricalFamilyConfig& config = {});

// Both directions of the weak-type gate: the indicator-ratio bound K equals
// the empirical operator norm (tolerance 1e-12). Preflights the norm's
// lattice/homogeneity invariants.
struct GateReport {
  double K = 0.0;
  double empirical = 0.0;
  std::vector<std::size_t> witness;
  bool pass = false;
  std::string detail;
};
GateReport verify_gate(const CellMap& map, const FiniteSpace& space,
                       const LatticeNorm& norm,
                       const EmpiricalFamilyConfig& config = {});

// Randomized check of absolute-value invariance, positive homogeneity and
// lattice monotonicity; fills `why` on failure.
bool preflight_norm(const FiniteSpace& space, const LatticeNorm& norm,
                    std::uint64_t seed, std::string* why);

}  // namespace morreylab
