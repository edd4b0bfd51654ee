#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "morreylab/core.hpp"
#include "morreylab/exact_norms.hpp"

namespace morreylab {

// Inclusive n-dimensional prefix sums of |f|^q * h^n. Box-mass queries cost
// one 2^n-term inclusion-exclusion.
struct PrefixSumTable {
  GridSpec grid;
  double q = 1.0;
  std::vector<double> cumulative;

  // Mass of the inclusive cell range [lo, hi] per axis, clipped to the grid.
  // Ranges entirely outside yield 0.
  double query_cells(const std::vector<long>& lo,
                     const std::vector<long>& hi) const;
  double total() const;
};

// Compensated per-axis accumulation keeps the table's total within 1e-12
// relative of the naive sum on ~1e6-cell grids. Throws std::domain_error if
// |f|^q overflows to inf/NaN.
PrefixSumTable build_prefix_table(const GridFunction& f, double q);
PrefixSumTable build_prefix_table(const GridSet& set, double q);

// Discretized cube family for the supremum search. Cubes are grid-aligned
// with integer cell side c and may overhang the grid (outside values are 0);
// anchors per axis run from -(c-1) to shape-1.
struct CubeSearchPolicy {
  enum class Anchors { all_cells, strided };
  enum class Sizes { all, dyadic };

  Anchors anchors = Anchors::all_cells;
  std::size_t stride = 1;  // used when anchors == strided
  Sizes sizes = Sizes::all;
  std::size_t max_cube_cells = static_cast<std::size_t>(-1);  // cap on c^n

  // All anchors x all sizes for n <= 2; dyadic sizes for n >= 3.
  static CubeSearchPolicy default_for(int n);
};

// Lower bound of the Morrey norm of the sampled step function: max over the
// policy's cubes Q of |Q|^{1/p-1/q} (mass in Q)^{1/q}. The maximizing cube is
// recorded in the witness. Deterministic for any thread count.
NormValue morrey_norm_grid(const GridFunction& f, const MorreyParams& params,
                           const CubeSearchPolicy& policy);
NormValue morrey_norm_grid(const GridSet& set, const MorreyParams& params,
                           const CubeSearchPolicy& policy);

// Distinct nonzero sample magnitudes, strictly decreasing.
struct LevelSweep {
  std::vector<double> lambdas;
};
LevelSweep level_sweep(const GridFunction& f);

// sup_lambda lambda * ||chi_{|f|>lambda}||: evaluated just below each level v
// as v * ||chi_{|f|>=v}||, which is where the piecewise-linear objective
// peaks. Exact for step functions up to the cube-family discretization.
NormValue weak_morrey_norm_grid(const GridFunction& f,
                                const MorreyParams& params,
                                const CubeSearchPolicy& policy);

// Dense sweep of the one-dimensional reduction
//   F(R) = R^{n/p-n/q} prod_i min(s_i, R)^{1/q}
// over log-spaced R in [min side / pad, max finite side * pad], with the
// breakpoints R = s_i added. Independent oracle for the closed forms.
struct SweepSpec {
  std::size_t points = 1000000;
  double pad = 1e3;
};
NormValue oracle_r_sweep(const std::vector<double>& sides,
                         const MorreyParams& params,
                         const SweepSpec& sweep = {});

// Smallest grid of spacing h covering the box, anchored at its corner,
// optionally padded by whole cells on every side.
GridSpec cover_box(const AxisBox& box, double h, std::size_t pad_cells = 0);

// Cell-center rasterization of a box indicator.
GridFunction box_indicator_grid(const AxisBox& box, const GridSpec& grid);

// Indicator of [0,thickness] x [0,T] sampled at spacing h (n = 2).
GridFunction truncated_slab_grid(double thickness, double T, double h);

// Flat row-major values, comma/whitespace separated; paired with a GridSpec.
GridFunction grid_function_from_csv(std::istream& values, GridSpec grid);

}  // namespace morreylab
