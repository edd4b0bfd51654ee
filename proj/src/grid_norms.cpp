#include "morreylab/grid_norms.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "morreylab/parallel.hpp"

namespace morreylab {

namespace {

// Running compensated (Kahan) prefix sums along one axis, every fiber.
void prefix_axis(std::vector<double>& data, const GridSpec& grid, int axis) {
  const auto strides = grid_strides(grid);
  const int n = grid.dim();
  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    // idx has idx[axis] == 0: walk the fiber.
    std::size_t offset = 0;
    for (int d = 0; d < n; ++d) offset += idx[d] * strides[d];
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < grid.shape[axis]; ++i) {
      const std::size_t at = offset + i * strides[axis];
      const double y = data[at] - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
      data[at] = sum;
    }
    // Odometer over the remaining axes.
    int d = n - 1;
    for (; d >= 0; --d) {
      if (d == axis) continue;
      if (++idx[d] < grid.shape[d]) break;
      idx[d] = 0;
    }
    if (d < 0) break;
  }
}

PrefixSumTable build_table(GridSpec grid, std::vector<double> masses, double q) {
  for (double m : masses) {
    if (!std::isfinite(m))
      throw std::domain_error("prefix table: |f|^q overflowed to inf/NaN");
  }
  PrefixSumTable table{std::move(grid), q, std::move(masses)};
  for (int d = 0; d < table.grid.dim(); ++d)
    prefix_axis(table.cumulative, table.grid, d);
  return table;
}

}  // namespace

PrefixSumTable build_prefix_table(const GridFunction& f, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("prefix table: q must be positive");
  const double hn = cell_volume(f.grid);
  std::vector<double> masses(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i)
    masses[i] = std::pow(std::abs(f.values[i]), q) * hn;
  return build_table(f.grid, std::move(masses), q);
}

PrefixSumTable build_prefix_table(const GridSet& set, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("prefix table: q must be positive");
  const double hn = cell_volume(set.grid);
  std::vector<double> masses(set.mask.size());
  for (std::size_t i = 0; i < set.mask.size(); ++i)
    masses[i] = set.mask[i] ? hn : 0.0;  // chi^q = chi
  return build_table(set.grid, std::move(masses), q);
}

double PrefixSumTable::query_cells(const std::vector<long>& lo,
                                   const std::vector<long>& hi) const {
  const int n = grid.dim();
  const auto strides = grid_strides(grid);
  std::vector<long> clo(n), chi(n);
  for (int d = 0; d < n; ++d) {
    clo[d] = std::max(lo[d], 0L);
    chi[d] = std::min(hi[d], static_cast<long>(grid.shape[d]) - 1);
    if (clo[d] > chi[d]) return 0.0;
  }
  double total = 0.0;
  const unsigned corners = 1u << n;
  for (unsigned mask = 0; mask < corners; ++mask) {
    std::size_t at = 0;
    int sign = 1;
    bool vanishes = false;
    for (int d = 0; d < n; ++d) {
      long j;
      if (mask & (1u << d)) {
        j = clo[d] - 1;
        if (j < 0) {
          vanishes = true;
          break;
        }
        sign = -sign;
      } else {
        j = chi[d];
      }
      at += static_cast<std::size_t>(j) * strides[d];
    }
    if (!vanishes) total += sign * cumulative[at];
  }
  return total;
}

double PrefixSumTable::total() const {
  return cumulative.empty() ? 0.0 : cumulative.back();
}

CubeSearchPolicy CubeSearchPolicy::default_for(int n) {
  CubeSearchPolicy policy;
  policy.sizes = n <= 2 ? Sizes::all : Sizes::dyadic;
  return policy;
}

namespace {

struct BestCandidate {
  double value = -1.0;
  std::size_t index = static_cast<std::size_t>(-1);
};

void merge_best(BestCandidate& acc, const BestCandidate& other) {
  if (other.value > acc.value ||
      (other.value == acc.value && other.index < acc.index))
    acc = other;
}

std::vector<std::size_t> cube_sizes(const GridSpec& grid,
                                    const CubeSearchPolicy& policy) {
  std::size_t cmax = 0;
  for (std::size_t s : grid.shape) cmax = std::max(cmax, s);
  const double cap_d = std::pow(static_cast<double>(policy.max_cube_cells),
                                1.0 / grid.dim());
  const std::size_t cap =
      cap_d >= static_cast<double>(cmax) * 2.0
          ? cmax * 2
          : static_cast<std::size_t>(cap_d);
  std::vector<std::size_t> sizes;
  if (policy.sizes == CubeSearchPolicy::Sizes::all) {
    for (std::size_t c = 1; c <= cmax && c <= cap; ++c) sizes.push_back(c);
  } else {
    // Powers of two through the first one covering the largest axis; the
    // covering cube may overhang the grid, which the mass query clips.
    for (std::size_t c = 1; c <= cap; c *= 2) {
      sizes.push_back(c);
      if (c >= cmax) break;
    }
  }
  if (sizes.empty())
    throw std::invalid_argument("cube search: policy admits no cube sizes");
  return sizes;
}

struct CubeEnumeration {
  std::vector<std::size_t> sizes;
  std::size_t stride = 1;
  // anchorCounts[si][d]: anchors along axis d for size si.
  std::vector<std::vector<std::size_t>> anchorCounts;
  std::vector<std::size_t> cumTotals;  // exclusive prefix; back() == total
  std::size_t total = 0;

  void decode(std::size_t g, const GridSpec& grid, std::size_t& si,
              std::vector<long>& anchor) const {
    std::size_t lo = 0, hi = sizes.size();
    while (lo + 1 < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumTotals[mid] <= g)
        lo = mid;
      else
        hi = mid;
    }
    si = lo;
    std::size_t rem = g - cumTotals[si];
    const long c = static_cast<long>(sizes[si]);
    const int n = grid.dim();
    for (int d = n - 1; d >= 0; --d) {
      const std::size_t count = anchorCounts[si][d];
      const std::size_t a = rem % count;
      rem /= count;
      anchor[d] = -(c - 1) + static_cast<long>(a * stride);
    }
  }
};

CubeEnumeration enumerate_cubes(const GridSpec& grid,
                                const CubeSearchPolicy& policy) {
  CubeEnumeration e;
  e.sizes = cube_sizes(grid, policy);
  e.stride =
      policy.anchors == CubeSearchPolicy::Anchors::strided ? policy.stride : 1;
  if (e.stride < 1)
    throw std::invalid_argument("cube search: stride must be >= 1");
  e.anchorCounts.resize(e.sizes.size());
  e.cumTotals.resize(e.sizes.size());
  for (std::size_t si = 0; si < e.sizes.size(); ++si) {
    e.cumTotals[si] = e.total;
    const std::size_t c = e.sizes[si];
    std::size_t count = 1;
    e.anchorCounts[si].resize(grid.dim());
    for (int d = 0; d < grid.dim(); ++d) {
      const std::size_t span = grid.shape[d] + c - 1;  // anchors at stride 1
      const std::size_t cd = (span - 1) / e.stride + 1;
      e.anchorCounts[si][d] = cd;
      count *= cd;
    }
    e.total += count;
  }
  return e;
}

NormValue cube_search(const PrefixSumTable& table, const MorreyParams& params,
                      const CubeSearchPolicy& policy) {
  const GridSpec& grid = table.grid;
  if (grid.dim() != params.n)
    throw std::invalid_argument("cube search: dimension mismatch");
  const CubeEnumeration e = enumerate_cubes(grid, policy);

  const double volExponent =
      params.n * (1.0 / params.p - 1.0 / params.q);  // |Q|^{1/p-1/q}
  std::vector<double> volFactor(e.sizes.size());
  for (std::size_t si = 0; si < e.sizes.size(); ++si)
    volFactor[si] =
        std::pow(static_cast<double>(e.sizes[si]) * grid.h, volExponent);

  const int n = grid.dim();
  auto map = [&](std::size_t begin, std::size_t end) {
    BestCandidate best;
    std::vector<long> anchor(n), lo(n), hi(n);
    std::size_t si = 0;
    for (std::size_t g = begin; g < end; ++g) {
      e.decode(g, grid, si, anchor);
      const long c = static_cast<long>(e.sizes[si]);
      for (int d = 0; d < n; ++d) {
        lo[d] = anchor[d];
        hi[d] = anchor[d] + c - 1;
      }
      const double mass = table.query_cells(lo, hi);
      double value = 0.0;
      if (mass > 0.0)
        value = volFactor[si] * std::pow(mass, 1.0 / params.q);
      merge_best(best, BestCandidate{value, g});
    }
    return best;
  };
  const BestCandidate best =
      chunked_reduce<BestCandidate>(e.total, BestCandidate{}, map, merge_best);

  std::ostringstream witness;
  if (best.index != static_cast<std::size_t>(-1)) {
    std::size_t si = 0;
    std::vector<long> anchor(n);
    e.decode(best.index, grid, si, anchor);
    witness << "cube side=" << e.sizes[si] << " cells (len="
            << static_cast<double>(e.sizes[si]) * grid.h << ") anchor_cells=[";
    for (int d = 0; d < n; ++d) witness << (d ? "," : "") << anchor[d];
    witness << "]";
  }
  return NormValue{std::max(best.value, 0.0), NormKind::lower_bound,
                   witness.str()};
}

}  // namespace

NormValue morrey_norm_grid(const GridFunction& f, const MorreyParams& params,
                           const CubeSearchPolicy& policy) {
  return cube_search(build_prefix_table(f, params.q), params, policy);
}

NormValue morrey_norm_grid(const GridSet& set, const MorreyParams& params,
                           const CubeSearchPolicy& policy) {
  return cube_search(build_prefix_table(set, params.q), params, policy);
}

LevelSweep level_sweep(const GridFunction& f) {
  std::vector<double> levels;
  levels.reserve(f.values.size());
  for (double v : f.values) {
    const double a = std::abs(v);
    if (a > 0.0) levels.push_back(a);
  }
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return LevelSweep{std::move(levels)};
}

NormValue weak_morrey_norm_grid(const GridFunction& f,
                                const MorreyParams& params,
                                const CubeSearchPolicy& policy) {
  const LevelSweep levels = level_sweep(f);
  NormValue best{0.0, NormKind::lower_bound, "f == 0"};
  for (double v : levels.lambdas) {
    std::vector<std::uint8_t> mask(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i)
      mask[i] = std::abs(f.values[i]) >= v ? 1 : 0;
    const NormValue level_norm =
        morrey_norm_grid(GridSet{f.grid, std::move(mask)}, params, policy);
    const double value = v * level_norm.value;
    if (value > best.value) {
      std::ostringstream witness;
      witness << "lambda->" << v << "^-; " << level_norm.witness;
      best = NormValue{value, NormKind::lower_bound, witness.str()};
    }
  }
  return best;
}

NormValue oracle_r_sweep(const std::vector<double>& sides,
                         const MorreyParams& params, const SweepSpec& sweep) {
  std::vector<double> finite;
  for (double s : sides) {
    if (std::isnan(s) || s <= 0.0)
      throw std::invalid_argument("oracle_r_sweep: sides must be positive");
    if (std::isfinite(s)) finite.push_back(s);
  }
  if (sides.size() != static_cast<std::size_t>(params.n))
    throw std::invalid_argument("oracle_r_sweep: dimension mismatch");
  if (finite.empty())
    return NormValue{kInf, NormKind::lower_bound, "full-space indicator"};

  const auto [mn, mx] = std::minmax_element(finite.begin(), finite.end());
  const double rMin = *mn / sweep.pad;
  const double rMax = *mx * sweep.pad;
  const std::size_t points = std::max<std::size_t>(sweep.points, 2);
  const double logMin = std::log(rMin);
  const double step = (std::log(rMax) - logMin) / (points - 1);

  const double expoR = params.n / params.p - params.n / params.q;
  auto evalAt = [&](double r) {
    double prodMin = 1.0;
    for (double s : sides) prodMin *= std::min(s, r);
    return std::pow(r, expoR) * std::pow(prodMin, 1.0 / params.q);
  };
  // Index space: log-spaced points first, then the breakpoints R = s_i.
  const std::size_t total = points + finite.size();
  auto rAt = [&](std::size_t i) {
    return i < points ? std::exp(logMin + step * i) : finite[i - points];
  };

  auto map = [&](std::size_t begin, std::size_t end) {
    BestCandidate best;
    for (std::size_t i = begin; i < end; ++i)
      merge_best(best, BestCandidate{evalAt(rAt(i)), i});
    return best;
  };
  const BestCandidate best =
      chunked_reduce<BestCandidate>(total, BestCandidate{}, map, merge_best);

  std::ostringstream witness;
  witness << "R=" << rAt(best.index)
          << (best.index >= points ? " (breakpoint)" : " (sweep)");
  return NormValue{best.value, NormKind::lower_bound, witness.str()};
}

GridSpec cover_box(const AxisBox& box, double h, std::size_t pad_cells) {
  if (!box_all_finite(box))
    throw std::invalid_argument("cover_box: box must be finite");
  const int n = box.dim();
  std::vector<double> origin(n);
  std::vector<std::size_t> shape(n);
  for (int d = 0; d < n; ++d) {
    origin[d] = box.lower[d] - static_cast<double>(pad_cells) * h;
    const double cells = std::ceil(box.sides[d] / h - 1e-9);
    shape[d] = static_cast<std::size_t>(std::max(cells, 1.0)) + 2 * pad_cells;
  }
  return make_grid(std::move(origin), h, std::move(shape));
}

GridFunction box_indicator_grid(const AxisBox& box, const GridSpec& grid) {
  if (box.dim() != grid.dim())
    throw std::invalid_argument("box_indicator_grid: dimension mismatch");
  const int n = grid.dim();
  const std::size_t count = cell_count(grid);
  std::vector<double> values(count, 0.0);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t lin = 0; lin < count; ++lin) {
    bool inside = true;
    for (int d = 0; d < n && inside; ++d) {
      const double x = grid.origin[d] + (idx[d] + 0.5) * grid.h;
      inside = x >= box.lower[d] && x < box.lower[d] + box.sides[d];
    }
    values[lin] = inside ? 1.0 : 0.0;
    for (int d = n - 1; d >= 0; --d) {
      if (++idx[d] < grid.shape[d]) break;
      idx[d] = 0;
    }
  }
  return GridFunction{grid, std::move(values)};
}

GridFunction truncated_slab_grid(double thickness, double T, double h) {
  const AxisBox box = make_box({thickness, T});
  return box_indicator_grid(box, cover_box(box, h));
}

GridFunction grid_function_from_csv(std::istream& values, GridSpec grid) {
  const std::size_t count = cell_count(grid);
  std::vector<double> data;
  data.reserve(count);
  std::string token;
  while (data.size() < count && values >> token) {
    // Tokens may carry trailing commas from CSV rows.
    std::replace(token.begin(), token.end(), ',', ' ');
    std::istringstream fields(token);
    double v;
    while (fields >> v) data.push_back(v);
  }
  if (data.size() != count)
    throw std::invalid_argument("grid CSV: expected " + std::to_string(count) +
                                " values, got " + std::to_string(data.size()));
  return make_grid_function(std::move(grid), std::move(data));
}

}  // namespace morreylab
