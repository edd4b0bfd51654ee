#pragma once

#include <string>
#include <vector>

#include "morreylab/core.hpp"

namespace morreylab {

enum class NormKind { exact, lower_bound, approximation };

const char* norm_kind_name(NormKind kind);

struct NormValue {
  double value = 0.0;  // nonnegative; kInf marks an unbounded norm
  NormKind kind = NormKind::exact;
  std::string witness;  // maximizing R / cube / level, when known

  bool finite() const { return value < kInf; }
};

// Candidate values of sup_R R^{n/p-n/q} prod_i min(s_i,R)^{1/q} at the
// breakpoints R = s_k, for ascending finite sides s. candidate k (1-based)
// equals (prod_{i<k} s_i)^{1/q} * s_k^{n/p-(k-1)/q}. Adjacent candidates
// agree when p sits exactly on the regime boundary n*q/m.
std::vector<double> box_norm_candidates(const std::vector<double>& ascendingSides,
                                        const MorreyParams& params);

// Exact Morrey norm of a box indicator (all sides finite). The objective is
// a piecewise power of the cube side R with decreasing exponents, so the
// supremum sits at a breakpoint; the maximizing R is recorded as witness.
// Reduces to |B|^{1/p} when p == q.
NormValue box_indicator_norm(const AxisBox& box, const MorreyParams& params);

// Exact Morrey norm of a slab indicator: k finite extents, n-k infinite.
// Unbounded (kInf) iff n*q > k*p; at n*q == k*p the R->inf limit candidate
// (prod s_i)^{1/q} joins the breakpoint candidates (it equals candidate k).
// finiteSides may be empty (full-space indicator: unbounded, flagged).
NormValue slab_indicator_norm(std::vector<double> finiteSides,
                              const MorreyParams& params);

// Dispatches on the box's infinite markers.
NormValue indicator_norm(const AxisBox& box, const MorreyParams& params);

enum class Dilation { precompose, support_scale };

// t^{-n/p} for precompose (||f(t.)|| = t^{-n/p} ||f||),
// t^{+n/p} for support_scale (||chi_{tB}|| = t^{n/p} ||chi_B||).
double dilation_norm_factor(double t, const MorreyParams& params,
                            Dilation direction);

// Weak and strong norms agree on indicators; returns the value re-tagged.
NormValue indicator_weak_norm(const NormValue& strong);

}  // namespace morreylab
