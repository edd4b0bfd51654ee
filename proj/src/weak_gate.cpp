#include "morreylab/weak_gate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "morreylab/parallel.hpp"

namespace morreylab {

FiniteSpace make_finite_space(std::vector<double> weights,
                              std::vector<std::size_t> layout) {
  if (weights.empty())
    throw std::invalid_argument("FiniteSpace: need at least one cell");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("FiniteSpace: weights must be positive");
  if (!layout.empty()) {
    std::size_t cells = 1;
    for (std::size_t s : layout) cells *= s;
    if (cells != weights.size())
      throw std::invalid_argument("FiniteSpace: layout cell count mismatch");
    if (layout.size() > 2)
      throw std::invalid_argument("FiniteSpace: layout must be 1-D or 2-D");
  }
  return FiniteSpace{std::move(weights), std::move(layout)};
}

FiniteSpace finite_space_from_json(const nlohmann::json& j) {
  std::vector<std::size_t> layout;
  if (j.contains("layout"))
    layout = j.at("layout").get<std::vector<std::size_t>>();
  if (j.contains("weights"))
    return make_finite_space(j.at("weights").get<std::vector<double>>(),
                             std::move(layout));
  const std::size_t N = j.at("N").get<std::size_t>();
  if (layout.empty()) layout = {N};
  return make_finite_space(std::vector<double>(N, 1.0), std::move(layout));
}

LatticeNorm lp_norm(double p) {
  if (!(p > 0.0)) throw std::invalid_argument("lp_norm: p must be positive");
  LatticeNorm norm;
  norm.name = "l" + std::to_string(p);
  norm.quasi = p < 1.0;
  norm.eval = [p](const FiniteSpace& space, const std::vector<double>& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      sum += std::pow(std::abs(f[i]), p) * space.weights[i];
    return std::pow(sum, 1.0 / p);
  };
  return norm;
}

LatticeNorm morrey1d_norm(double p, double q) {
  if (!(q > 0.0) || !(p >= q))
    throw std::invalid_argument("morrey1d_norm: need 0 < q <= p");
  LatticeNorm norm;
  std::ostringstream name;
  name << "morrey1d(p=" << p << ",q=" << q << ")";
  norm.name = name.str();
  norm.quasi = q < 1.0;
  norm.eval = [p, q](const FiniteSpace& space, const std::vector<double>& f) {
    const std::size_t N = space.size();
    if (!space.layout.empty() && space.layout.size() != 1)
      throw std::invalid_argument("morrey1d: space layout is not 1-D");
    std::vector<double> mu(N + 1, 0.0), mass(N + 1, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      mu[i + 1] = mu[i] + space.weights[i];
      mass[i + 1] =
          mass[i] + std::pow(std::abs(f[i]), q) * space.weights[i];
    }
    double best = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i; j < N; ++j) {
        const double measure = mu[j + 1] - mu[i];
        const double m = mass[j + 1] - mass[i];
        if (m <= 0.0) continue;
        best = std::max(best, std::pow(measure, 1.0 / p - 1.0 / q) *
                                  std::pow(m, 1.0 / q));
      }
    return best;
  };
  return norm;
}

LatticeNorm morrey2d_norm(double p, double q) {
  if (!(q > 0.0) || !(p >= q))
    throw std::invalid_argument("morrey2d_norm: need 0 < q <= p");
  LatticeNorm norm;
  std::ostringstream name;
  name << "morrey2d(p=" << p << ",q=" << q << ")";
  norm.name = name.str();
  norm.quasi = q < 1.0;
  norm.eval = [p, q](const FiniteSpace& space, const std::vector<double>& f) {
    if (space.layout.size() != 2)
      throw std::invalid_argument("morrey2d: space layout is not 2-D");
    const std::size_t R = space.layout[0], C = space.layout[1];
    // Inclusive 2-D prefix sums with a zero border.
    std::vector<double> mu((R + 1) * (C + 1), 0.0), mass((R + 1) * (C + 1), 0.0);
    auto at = [C](std::size_t r, std::size_t c) { return r * (C + 1) + c; };
    for (std::size_t r = 0; r < R; ++r)
      for (std::size_t c = 0; c < C; ++c) {
        const std::size_t i = r * C + c;
        const double w = space.weights[i];
        const double m = std::pow(std::abs(f[i]), q) * w;
        mu[at(r + 1, c + 1)] = mu[at(r, c + 1)] + mu[at(r + 1, c)] -
                               mu[at(r, c)] + w;
        mass[at(r + 1, c + 1)] = mass[at(r, c + 1)] + mass[at(r + 1, c)] -
                                 mass[at(r, c)] + m;
      }
    double best = 0.0;
    for (std::size_t r0 = 0; r0 < R; ++r0)
      for (std::size_t r1 = r0; r1 < R; ++r1)
        for (std::size_t c0 = 0; c0 < C; ++c0)
          for (std::size_t c1 = c0; c1 < C; ++c1) {
            const double measure = mu[at(r1 + 1, c1 + 1)] - mu[at(r0, c1 + 1)] -
                                   mu[at(r1 + 1, c0)] + mu[at(r0, c0)];
            const double m = mass[at(r1 + 1, c1 + 1)] - mass[at(r0, c1 + 1)] -
                             mass[at(r1 + 1, c0)] + mass[at(r0, c0)];
            if (m <= 0.0) continue;
            best = std::max(best, std::pow(measure, 1.0 / p - 1.0 / q) *
                                      std::pow(m, 1.0 / q));
          }
    return best;
  };
  return norm;
}

LatticeNorm norm_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "lp") return lp_norm(j.at("p").get<double>());
  if (kind == "morrey1d")
    return morrey1d_norm(j.at("p").get<double>(), j.at("q").get<double>());
  if (kind == "morrey2d")
    return morrey2d_norm(j.at("p").get<double>(), j.at("q").get<double>());
  throw std::invalid_argument("norm_from_json: unknown kind '" + kind + "'");
}

CellMap make_cell_map(std::vector<std::size_t> sigma, std::size_t N) {
  if (sigma.size() != N)
    throw std::invalid_argument("CellMap: sigma must be total on the cells");
  for (std::size_t target : sigma)
    if (target >= N)
      throw std::invalid_argument("CellMap: sigma target out of range");
  return CellMap{std::move(sigma)};
}

CellMap cellmap_from_json(const nlohmann::json& j, std::size_t N) {
  return make_cell_map(j.at("sigma").get<std::vector<std::size_t>>(), N);
}

std::vector<double> compose_cells(const CellMap& map,
                                  const std::vector<double>& f) {
  std::vector<double> out(map.sigma.size());
  for (std::size_t i = 0; i < map.sigma.size(); ++i) out[i] = f[map.sigma[i]];
  return out;
}

std::vector<double> preimage_indicator(const CellMap& map,
                                       const std::vector<double>& chiE) {
  return compose_cells(map, chiE);  // chi_{sigma^{-1}(E)} = chi_E o sigma
}

double weak_norm_finite(const std::vector<double>& f, const FiniteSpace& space,
                        const LatticeNorm& norm) {
  if (f.size() != space.size())
    throw std::invalid_argument("weak_norm_finite: size mismatch");
  std::vector<double> levels;
  levels.reserve(f.size());
  for (double v : f) {
    const double a = std::abs(v);
    if (a > 0.0) levels.push_back(a);
  }
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  double best = 0.0;
  std::vector<double> chi(f.size());
  for (double v : levels) {
    for (std::size_t i = 0; i < f.size(); ++i)
      chi[i] = std::abs(f[i]) >= v ? 1.0 : 0.0;
    // sup over lambda in the interval below v is attained as lambda -> v^-.
    best = std::max(best, v * norm(space, chi));
  }
  return best;
}

namespace {

struct BestSubset {
  double ratio = -1.0;
  std::uint64_t mask = ~0ull;
};

void merge_subset(BestSubset& acc, const BestSubset& other) {
  if (other.ratio > acc.ratio ||
      (other.ratio == acc.ratio && other.mask < acc.mask))
    acc = other;
}

std::vector<std::size_t> mask_cells(std::uint64_t mask, std::size_t N) {
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < N; ++i)
    if (mask & (1ull << i)) cells.push_back(i);
  return cells;
}

double subset_ratio(std::uint64_t mask, const CellMap& map,
                    const FiniteSpace& space, const LatticeNorm& norm,
                    std::vector<double>& chiE, std::vector<double>& chiPre) {
  const std::size_t N = space.size();
  for (std::size_t i = 0; i < N; ++i)
    chiE[i] = (mask & (1ull << i)) ? 1.0 : 0.0;
  const double denom = norm(space, chiE);
  if (!(denom > 0.0)) return -1.0;
  for (std::size_t i = 0; i < N; ++i) chiPre[i] = chiE[map.sigma[i]];
  return norm(space, chiPre) / denom;
}

}  // namespace

RatioResult indicator_ratio_sup(const CellMap& map, const FiniteSpace& space,
                                const LatticeNorm& norm) {
  const std::size_t N = space.size();
  if (map.sigma.size() != N)
    throw std::invalid_argument("indicator_ratio_sup: map size mismatch");

  RatioResult result;
  if (N <= 20) {
    const std::uint64_t subsets = (1ull << N) - 1;  // nonempty masks 1..2^N-1
    auto mapChunk = [&](std::size_t begin, std::size_t end) {
      BestSubset best;
      std::vector<double> chiE(N), chiPre(N);
      for (std::size_t g = begin; g < end; ++g) {
        const std::uint64_t mask = g + 1;
        merge_subset(best, BestSubset{subset_ratio(mask, map, space, norm,
                                                   chiE, chiPre),
                                      mask});
      }
      return best;
    };
    const BestSubset best = chunked_reduce<BestSubset>(
        subsets, BestSubset{}, mapChunk, merge_subset);
    result.K = best.ratio;
    result.witness = mask_cells(best.mask, N);
    result.exact = true;
    return result;
  }

  // Too many subsets to exhaust: sampled bound, flagged non-exact.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  BestSubset best;
  std::vector<double> chiE(N), chiPre(N);
  for (std::size_t i = 0; i < N; ++i)
    merge_subset(best, BestSubset{subset_ratio(1ull << i, map, space, norm,
                                               chiE, chiPre),
                                  1ull << i});
  for (int trial = 0; trial < 4096; ++trial) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < N; ++i)
      if (rng() & 1u) mask |= 1ull << i;
    if (mask == 0) continue;
    merge_subset(best,
                 BestSubset{subset_ratio(mask, map, space, norm, chiE, chiPre),
                            mask});
  }
  result.K = best.ratio;
  result.witness = mask_cells(best.mask, N);
  result.exact = false;
  return result;
}

double weak_opnorm_empirical(const CellMap& map, const FiniteSpace& space,
                             const LatticeNorm& norm,
                             const EmpiricalFamilyConfig& config) {
  const std::size_t N = space.size();
  double best = -1.0;
  auto consider = [&](const std::vector<double>& f) {
    const double denom = weak_norm_finite(f, space, norm);
    if (!(denom > 0.0)) return;  // zero weak norm: skipped
    best = std::max(best, weak_norm_finite(compose_cells(map, f), space, norm) /
                              denom);
  };

  std::vector<double> f(N, 0.0);
  if (N <= 20) {
    for (std::uint64_t mask = 1; mask < (1ull << N); ++mask) {
      for (std::size_t i = 0; i < N; ++i)
        f[i] = (mask & (1ull << i)) ? 1.0 : 0.0;
      consider(f);
    }
  }
  if (N <= 8) {
    const std::size_t total = static_cast<std::size_t>(std::pow(3.0, N));
    for (std::size_t code = 1; code < total; ++code) {
      std::size_t rest = code;
      for (std::size_t i = 0; i < N; ++i) {
        f[i] = static_cast<double>(rest % 3);
        rest /= 3;
      }
      consider(f);
    }
  }
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> value(0.0, 2.0);
  std::uniform_real_distribution<double> gate(0.0, 1.0);
  for (std::size_t trial = 0; trial < config.random_count; ++trial) {
    for (std::size_t i = 0; i < N; ++i)
      f[i] = gate(rng) < 0.25 ? 0.0 : value(rng);
    consider(f);
  }
  return best;
}

bool preflight_norm(const FiniteSpace& space, const LatticeNorm& norm,
                    std::uint64_t seed, std::string* why) {
  const std::size_t N = space.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(0.0, 3.0);
  std::uniform_real_distribution<double> shrink(0.0, 1.0);
  auto fail = [&](const std::string& message) {
    if (why) *why = message;
    return false;
  };
  for (int trial = 0; trial < 16; ++trial) {
    std::vector<double> f(N), signedF(N), g(N);
    for (std::size_t i = 0; i < N; ++i) {
      f[i] = value(rng);
      signedF[i] = (rng() & 1u) ? -f[i] : f[i];
      g[i] = f[i] * shrink(rng);
    }
    const double nf = norm(space, f);
    if (!(nf >= 0.0) || !std::isfinite(nf))
      return fail("norm produced a non-finite value");
    if (norm(space, signedF) != nf)
      return fail("norm is not absolute-value invariant");
    const double c = 0.5 + shrink(rng);
    std::vector<double> cf(N);
    for (std::size_t i = 0; i < N; ++i) cf[i] = c * f[i];
    if (std::abs(norm(space, cf) - c * nf) > 1e-12 * std::max(1.0, c * nf))
      return fail("norm is not positively homogeneous");
    if (norm(space, g) > nf * (1.0 + 1e-12))
      return fail("norm is not lattice monotone");
  }
  return true;
}

GateReport verify_gate(const CellMap& map, const FiniteSpace& space,
                       const LatticeNorm& norm,
                       const EmpiricalFamilyConfig& config) {
  std::string why;
  if (!preflight_norm(space, norm, 0xC0FFEEull, &why))
    throw std::invalid_argument("verify_gate: norm preflight failed: " + why);

  GateReport report;
  const RatioResult ratio = indicator_ratio_sup(map, space, norm);
  report.K = ratio.K;
  report.witness = ratio.witness;
  report.empirical = weak_opnorm_empirical(map, space, norm, config);
  report.pass = report.empirical <= report.K * (1.0 + 1e-12) &&
                report.empirical >= report.K * (1.0 - 1e-12);
  std::ostringstream detail;
  detail << "K=" << report.K << " empirical=" << report.empirical
         << (ratio.exact ? " (exhaustive)" : " (sampled)")
         << (norm.quasi ? " [quasi-norm instance: reported, not asserted]"
                        : "");
  report.detail = detail.str();
  return report;
}

}  // namespace morreylab
