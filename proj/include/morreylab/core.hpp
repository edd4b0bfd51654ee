#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace morreylab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Exponent triple (n, p, q) with 0 < q <= p < inf and n >= 1.
struct MorreyParams {
  int n = 1;
  double p = 1.0;
  double q = 1.0;
};

// Validates and returns the triple; throws std::invalid_argument otherwise.
MorreyParams make_params(int n, double p, double q);

// Regime index m in [1, n]: the smallest m with m*p >= n*q. m == 1 is the
// slab regime n*q <= p. At an exact regime boundary the smaller m wins;
// the closed-form candidates coincide there, so norm values are unaffected.
struct RegimeIndex {
  int m = 1;
};
RegimeIndex regime_index(const MorreyParams& params);

// Axis-parallel box [lower, lower + sides), sides > 0; an infinite side
// (kInf) marks a slab direction. A cube is a box with equal finite sides.
struct AxisBox {
  std::vector<double> lower;
  std::vector<double> sides;

  int dim() const { return static_cast<int>(sides.size()); }
};

AxisBox make_box(std::vector<double> lower, std::vector<double> sides);
// Box anchored at the origin.
AxisBox make_box(std::vector<double> sides);

// Product of extents; infinity if any side is infinite.
double box_volume(const AxisBox& box);
bool box_all_finite(const AxisBox& box);

// Finite extents ascending, infinite markers last.
std::vector<double> sorted_sides(const AxisBox& box);
struct SortedSides {
  std::vector<double> sides;
  std::vector<int> perm;  // sides[i] came from box.sides[perm[i]]
};
SortedSides sorted_sides_with_perm(const AxisBox& box);

// Uniform cell lattice: cell (i_0,..,i_{n-1}) covers
// [origin_d + i_d*h, origin_d + (i_d+1)*h) per axis.
struct GridSpec {
  std::vector<double> origin;
  double h = 1.0;
  std::vector<std::size_t> shape;

  int dim() const { return static_cast<int>(shape.size()); }
};

GridSpec make_grid(std::vector<double> origin, double h,
                   std::vector<std::size_t> shape);

std::size_t cell_count(const GridSpec& grid);
double cell_volume(const GridSpec& grid);  // h^n
// Row-major strides; linear index = sum_d idx[d]*stride[d].
std::vector<std::size_t> grid_strides(const GridSpec& grid);
// Center of a cell given per-axis indices.
std::vector<double> cell_center(const GridSpec& grid,
                                const std::vector<std::size_t>& idx);

// Sampled function (row-major cell values); values outside the grid are 0.
struct GridFunction {
  GridSpec grid;
  std::vector<double> values;
};
GridFunction make_grid_function(GridSpec grid, std::vector<double> values);

// Lattice mask; measure = (#true cells) * h^n.
struct GridSet {
  GridSpec grid;
  std::vector<std::uint8_t> mask;
};
GridSet make_grid_set(GridSpec grid, std::vector<std::uint8_t> mask);
double set_measure(const GridSet& set);

// JSON schema (consumed by the CLI):
//   MorreyParams {"n":int,"p":float,"q":float}
//   AxisBox     {"lower":[...],"sides":[... or "inf"]}
//   GridSpec    {"origin":[...],"h":float,"shape":[...]}
MorreyParams params_from_json(const nlohmann::json& j);
AxisBox box_from_json(const nlohmann::json& j);
GridSpec gridspec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MorreyParams& params);
nlohmann::json to_json(const AxisBox& box);
nlohmann::json to_json(const GridSpec& grid);

}  // namespace morreylab
