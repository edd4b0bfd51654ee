#include "morreylab/exact_norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace morreylab {

const char* norm_kind_name(NormKind kind) {
  switch (kind) {
    case NormKind::exact:
      return "exact";
    case NormKind::lower_bound:
      return "lower_bound";
    case NormKind::approximation:
      return "approximation";
  }
  return "unknown";
}

std::vector<double> box_norm_candidates(const std::vector<double>& s,
                                        const MorreyParams& params) {
  const double n = static_cast<double>(params.n);
  std::vector<double> candidates;
  candidates.reserve(s.size());
  double prefix = 1.0;  // prod_{i<k} s_i
  for (std::size_t k = 1; k <= s.size(); ++k) {
    const double expo = n / params.p - static_cast<double>(k - 1) / params.q;
    candidates.push_back(std::pow(prefix, 1.0 / params.q) *
                         std::pow(s[k - 1], expo));
    prefix *= s[k - 1];
  }
  return candidates;
}

namespace {

NormValue max_candidate(const std::vector<double>& sides,
                        const std::vector<double>& candidates) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < candidates.size(); ++k)
    if (candidates[k] > candidates[best]) best = k;
  std::ostringstream witness;
  witness << "R=" << sides[best] << " (breakpoint k=" << best + 1 << ")";
  return NormValue{candidates[best], NormKind::exact, witness.str()};
}

}  // namespace

NormValue box_indicator_norm(const AxisBox& box, const MorreyParams& params) {
  if (box.dim() != params.n)
    throw std::invalid_argument("box_indicator_norm: dimension mismatch");
  if (!box_all_finite(box))
    throw std::invalid_argument("box_indicator_norm: sides must be finite");
  const std::vector<double> s = sorted_sides(box);
  return max_candidate(s, box_norm_candidates(s, params));
}

NormValue slab_indicator_norm(std::vector<double> finiteSides,
                              const MorreyParams& params) {
  const std::size_t k = finiteSides.size();
  if (k > static_cast<std::size_t>(params.n))
    throw std::invalid_argument("slab_indicator_norm: too many finite sides");
  for (double s : finiteSides) {
    if (!(s > 0.0) || !std::isfinite(s))
      throw std::invalid_argument("slab_indicator_norm: sides must be finite positive");
  }
  if (k == static_cast<std::size_t>(params.n)) {
    // No infinite directions left; same as a box.
    return box_indicator_norm(make_box(std::move(finiteSides)), params);
  }

  const double n = static_cast<double>(params.n);
  const double tail = n * params.q - static_cast<double>(k) * params.p;
  if (k == 0 || tail > 0.0) {
    // Objective grows like R^{n/p - k/q} with positive exponent: unbounded.
    return NormValue{kInf, NormKind::exact,
                     k == 0 ? "full-space indicator" : "R->inf (n*q > k*p)"};
  }

  std::sort(finiteSides.begin(), finiteSides.end());
  // Breakpoint candidates carry the same closed form as the box case: each
  // infinite direction contributes min(inf, R) = R, which cancels into the
  // R^{n/p-n/q} prefactor.
  std::vector<double> candidates = box_norm_candidates(finiteSides, params);
  NormValue best = max_candidate(finiteSides, candidates);
  if (tail == 0.0) {
    // Limit candidate for R -> inf; coincides with candidate k.
    double prod = 1.0;
    for (double s : finiteSides) prod *= s;
    const double limit = std::pow(prod, 1.0 / params.q);
    if (limit > best.value)
      best = NormValue{limit, NormKind::exact, "R->inf limit (n*q = k*p)"};
  }
  return best;
}

NormValue indicator_norm(const AxisBox& box, const MorreyParams& params) {
  if (box_all_finite(box)) return box_indicator_norm(box, params);
  std::vector<double> finite;
  for (double s : box.sides)
    if (std::isfinite(s)) finite.push_back(s);
  return slab_indicator_norm(std::move(finite), params);
}

double dilation_norm_factor(double t, const MorreyParams& params,
                            Dilation direction) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw std::invalid_argument("dilation_norm_factor: t must be positive");
  const double e = static_cast<double>(params.n) / params.p;
  return std::pow(t, direction == Dilation::precompose ? -e : e);
}

NormValue indicator_weak_norm(const NormValue& strong) {
  NormValue weak = strong;
  weak.witness = strong.witness.empty()
                     ? "weak norm = strong norm on indicators"
                     : strong.witness + "; weak = strong on indicators";
  return weak;
}

}  // namespace morreylab
