#include "morreylab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace morreylab {

MorreyParams make_params(int n, double p, double q) {
  if (n < 1) throw std::invalid_argument("MorreyParams: n must be >= 1");
  if (!(q > 0.0) || !std::isfinite(q))
    throw std::invalid_argument("MorreyParams: q must be positive and finite");
  if (!(p >= q) || !std::isfinite(p))
    throw std::invalid_argument("MorreyParams: need 0 < q <= p < inf");
  return MorreyParams{n, p, q};
}

RegimeIndex regime_index(const MorreyParams& params) {
  // Smallest m in [1, n] with m*p >= n*q; exists because n*p >= n*q.
  for (int m = 1; m < params.n; ++m) {
    if (static_cast<double>(m) * params.p >= params.n * params.q)
      return RegimeIndex{m};
  }
  return RegimeIndex{params.n};
}

AxisBox make_box(std::vector<double> lower, std::vector<double> sides) {
  if (lower.size() != sides.size())
    throw std::invalid_argument("AxisBox: lower/sides dimension mismatch");
  if (sides.empty()) throw std::invalid_argument("AxisBox: empty");
  for (double a : lower) {
    if (!std::isfinite(a))
      throw std::invalid_argument("AxisBox: anchor must be finite");
  }
  for (double s : sides) {
    if (std::isnan(s) || s <= 0.0)
      throw std::invalid_argument("AxisBox: sides must be positive");
  }
  return AxisBox{std::move(lower), std::move(sides)};
}

AxisBox make_box(std::vector<double> sides) {
  std::vector<double> lower(sides.size(), 0.0);
  return make_box(std::move(lower), std::move(sides));
}

double box_volume(const AxisBox& box) {
  double v = 1.0;
  for (double s : box.sides) v *= s;
  return v;
}

bool box_all_finite(const AxisBox& box) {
  return std::all_of(box.sides.begin(), box.sides.end(),
                     [](double s) { return std::isfinite(s); });
}

SortedSides sorted_sides_with_perm(const AxisBox& box) {
  SortedSides out;
  out.perm.resize(box.sides.size());
  std::iota(out.perm.begin(), out.perm.end(), 0);
  // Stable so equal extents keep their axis order; inf sorts last.
  std::stable_sort(out.perm.begin(), out.perm.end(), [&](int a, int b) {
    return box.sides[a] < box.sides[b];
  });
  out.sides.reserve(box.sides.size());
  for (int i : out.perm) out.sides.push_back(box.sides[i]);
  return out;
}

std::vector<double> sorted_sides(const AxisBox& box) {
  return sorted_sides_with_perm(box).sides;
}

GridSpec make_grid(std::vector<double> origin, double h,
                   std::vector<std::size_t> shape) {
  if (origin.size() != shape.size())
    throw std::invalid_argument("GridSpec: origin/shape dimension mismatch");
  if (shape.empty()) throw std::invalid_argument("GridSpec: empty shape");
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("GridSpec: spacing must be positive");
  for (std::size_t s : shape) {
    if (s == 0) throw std::invalid_argument("GridSpec: zero extent");
  }
  return GridSpec{std::move(origin), h, std::move(shape)};
}

std::size_t cell_count(const GridSpec& grid) {
  std::size_t n = 1;
  for (std::size_t s : grid.shape) n *= s;
  return n;
}

double cell_volume(const GridSpec& grid) {
  return std::pow(grid.h, static_cast<double>(grid.dim()));
}

std::vector<std::size_t> grid_strides(const GridSpec& grid) {
  const int n = grid.dim();
  std::vector<std::size_t> strides(n);
  std::size_t acc = 1;
  for (int d = n - 1; d >= 0; --d) {
    strides[d] = acc;
    acc *= grid.shape[d];
  }
  return strides;
}

std::vector<double> cell_center(const GridSpec& grid,
                                const std::vector<std::size_t>& idx) {
  std::vector<double> x(grid.dim());
  for (int d = 0; d < grid.dim(); ++d)
    x[d] = grid.origin[d] + (static_cast<double>(idx[d]) + 0.5) * grid.h;
  return x;
}

GridFunction make_grid_function(GridSpec grid, std::vector<double> values) {
  if (values.size() != cell_count(grid))
    throw std::invalid_argument("GridFunction: value count != cell count");
  for (double v : values) {
    if (!std::isfinite(v))
      throw std::invalid_argument("GridFunction: values must be finite");
  }
  return GridFunction{std::move(grid), std::move(values)};
}

GridSet make_grid_set(GridSpec grid, std::vector<std::uint8_t> mask) {
  if (mask.size() != cell_count(grid))
    throw std::invalid_argument("GridSet: mask size != cell count");
  return GridSet{std::move(grid), std::move(mask)};
}

double set_measure(const GridSet& set) {
  std::size_t count = 0;
  for (std::uint8_t m : set.mask) count += (m != 0);
  return static_cast<double>(count) * cell_volume(set.grid);
}

MorreyParams params_from_json(const nlohmann::json& j) {
  return make_params(j.at("n").get<int>(), j.at("p").get<double>(),
                     j.at("q").get<double>());
}

AxisBox box_from_json(const nlohmann::json& j) {
  std::vector<double> sides;
  for (const auto& s : j.at("sides")) {
    if (s.is_string()) {
      if (s.get<std::string>() != "inf")
        throw std::invalid_argument("AxisBox: side must be a number or \"inf\"");
      sides.push_back(kInf);
    } else {
      sides.push_back(s.get<double>());
    }
  }
  std::vector<double> lower(sides.size(), 0.0);
  if (j.contains("lower")) lower = j.at("lower").get<std::vector<double>>();
  return make_box(std::move(lower), std::move(sides));
}

GridSpec gridspec_from_json(const nlohmann::json& j) {
  return make_grid(j.at("origin").get<std::vector<double>>(),
                   j.at("h").get<double>(),
                   j.at("shape").get<std::vector<std::size_t>>());
}

nlohmann::json to_json(const MorreyParams& params) {
  return {{"n", params.n}, {"p", params.p}, {"q", params.q}};
}

nlohmann::json to_json(const AxisBox& box) {
  nlohmann::json sides = nlohmann::json::array();
  for (double s : box.sides) {
    if (std::isinf(s))
      sides.push_back("inf");
    else
      sides.push_back(s);
  }
  return {{"lower", box.lower}, {"sides", sides}};
}

nlohmann::json to_json(const GridSpec& grid) {
  return {{"origin", grid.origin}, {"h", grid.h}, {"shape", grid.shape}};
}

}  // namespace morreylab
