#include "morreylab/composition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace morreylab {

namespace {

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

std::string describe_box(const AxisBox& box) {
  std::ostringstream out;
  out << "box sides=[";
  for (int d = 0; d < box.dim(); ++d) {
    out << (d ? "," : "");
    if (std::isinf(box.sides[d]))
      out << "inf";
    else
      out << box.sides[d];
  }
  out << "] at [";
  for (int d = 0; d < box.dim(); ++d) out << (d ? "," : "") << box.lower[d];
  out << "]";
  return out.str();
}

}  // namespace

AffineMap make_affine(Eigen::MatrixXd A, Eigen::VectorXd b) {
  if (A.rows() != A.cols() || A.rows() == 0)
    throw std::invalid_argument("AffineMap: matrix must be square");
  if (b.size() != A.rows())
    throw std::invalid_argument("AffineMap: offset dimension mismatch");
  if (!all_finite(A) || !b.allFinite())
    throw std::invalid_argument("AffineMap: entries must be finite");
  const double det = A.determinant();
  if (!(std::abs(det) > 0.0) || !std::isfinite(det))
    throw std::invalid_argument("AffineMap: matrix must be invertible");
  return AffineMap{std::move(A), std::move(b)};
}

AffineMap identity_affine(int n) {
  return make_affine(Eigen::MatrixXd::Identity(n, n),
                     Eigen::VectorXd::Zero(n));
}

AffineMap diag_affine(const std::vector<double>& entries) {
  const int n = static_cast<int>(entries.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int d = 0; d < n; ++d) A(d, d) = entries[d];
  return make_affine(std::move(A), Eigen::VectorXd::Zero(n));
}

AffineMap affine_inverse(const AffineMap& map) {
  const Eigen::MatrixXd inv = map.A.inverse();
  return make_affine(inv, -inv * map.b);
}

bool is_diagonal(const AffineMap& map) {
  for (int i = 0; i < map.A.rows(); ++i)
    for (int j = 0; j < map.A.cols(); ++j)
      if (i != j && map.A(i, j) != 0.0) return false;
  return true;
}

Map map_from_affine(AffineMap affine, std::string name) {
  Map map;
  map.name = std::move(name);
  map.n = affine.dim();
  const AffineMap inv = affine_inverse(affine);
  const Eigen::MatrixXd A = affine.A;
  const Eigen::VectorXd b = affine.b;
  map.eval = [A, b](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return A * x + b;
  };
  map.jacobian = [A](const Eigen::VectorXd&) { return A; };
  map.inverse = [inv](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return inv.A * y + inv.b;
  };
  map.affine = std::move(affine);
  return map;
}

Map identity_map(int n) { return map_from_affine(identity_affine(n), "identity"); }

Map diag_map(const std::vector<double>& entries) {
  return map_from_affine(diag_affine(entries), "diag");
}

Map exp1d_map() {
  Map map;
  map.name = "exp1d";
  map.n = 1;
  map.eval = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(1);
    y(0) = x(0) >= 0.0 ? std::expm1(x(0)) : x(0);
    return y;
  };
  map.jacobian = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd J(1, 1);
    J(0, 0) = x(0) >= 0.0 ? std::exp(x(0)) : 1.0;
    return J;
  };
  map.inverse = [](const Eigen::VectorXd& y) {
    Eigen::VectorXd x(1);
    x(0) = y(0) >= 0.0 ? std::log1p(y(0)) : y(0);
    return x;
  };
  return map;
}

namespace {

// Real root of x^3 + x = y (strictly increasing cubic). Cardano with the
// stable product form v = -1/(3u) to avoid cancellation for large |y|.
double cubic_shear_inverse(double y) {
  if (y == 0.0) return 0.0;
  const double a = std::abs(y);
  const double s = std::sqrt(0.25 * a * a + 1.0 / 27.0);
  const double u = std::cbrt(0.5 * a + s);
  const double x = u - 1.0 / (3.0 * u);
  return y > 0.0 ? x : -x;
}

}  // namespace

Map shear_cubic_map() {
  Map map;
  map.name = "shear-cubic";
  map.n = 2;
  map.eval = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(2);
    const double s = 3.0 * x(0) * x(0) + 1.0;
    y(0) = x(0) * x(0) * x(0) + x(0);
    y(1) = x(1) / s;
    return y;
  };
  map.jacobian = [](const Eigen::VectorXd& x) {
    const double s = 3.0 * x(0) * x(0) + 1.0;
    Eigen::MatrixXd J(2, 2);
    J(0, 0) = s;
    J(0, 1) = 0.0;
    J(1, 0) = -6.0 * x(0) * x(1) / (s * s);
    J(1, 1) = 1.0 / s;
    return J;
  };
  map.inverse = [](const Eigen::VectorXd& y) {
    Eigen::VectorXd x(2);
    x(0) = cubic_shear_inverse(y(0));
    x(1) = y(1) * (3.0 * x(0) * x(0) + 1.0);
    return x;
  };
  map.preimage_window = [](const AxisBox& box) {
    const double x1a = cubic_shear_inverse(box.lower[0]);
    const double x1b = cubic_shear_inverse(box.lower[0] + box.sides[0]);
    const double x1lo = std::min(x1a, x1b), x1hi = std::max(x1a, x1b);
    // Stretch factor 3 x1^2 + 1 over the x1 range.
    double m2 = std::max(x1lo * x1lo, x1hi * x1hi);
    double sMax = 3.0 * m2 + 1.0;
    double sMin = (x1lo <= 0.0 && x1hi >= 0.0)
                      ? 1.0
                      : 3.0 * std::min(x1lo * x1lo, x1hi * x1hi) + 1.0;
    const double y2lo = box.lower[1], y2hi = box.lower[1] + box.sides[1];
    double x2lo = kInf, x2hi = -kInf;
    for (double y2 : {y2lo, y2hi})
      for (double s : {sMin, sMax}) {
        x2lo = std::min(x2lo, y2 * s);
        x2hi = std::max(x2hi, y2 * s);
      }
    return make_box({x1lo, x2lo},
                    {std::max(x1hi - x1lo, 1e-12), std::max(x2hi - x2lo, 1e-12)});
  };
  return map;
}

std::optional<AxisBox> exact_preimage_box(const Map& map, const AxisBox& box) {
  if (box.dim() != map.n) return std::nullopt;
  if (map.affine && is_diagonal(*map.affine)) {
    const AffineMap& aff = *map.affine;
    std::vector<double> lower(map.n), sides(map.n);
    for (int d = 0; d < map.n; ++d) {
      const double a = aff.A(d, d);
      const double lo = (box.lower[d] - aff.b(d)) / a;
      if (std::isinf(box.sides[d])) {
        if (a < 0.0) return std::nullopt;  // preimage anchored at -inf
        lower[d] = lo;
        sides[d] = kInf;
      } else {
        const double hi = (box.lower[d] + box.sides[d] - aff.b(d)) / a;
        lower[d] = std::min(lo, hi);
        sides[d] = std::abs(hi - lo);
      }
    }
    return make_box(std::move(lower), std::move(sides));
  }
  if (map.n == 1 && map.inverse) {
    // Built-in 1-D maps are strictly monotone increasing.
    Eigen::VectorXd lo(1), hi(1);
    lo(0) = box.lower[0];
    const double a = map.inverse(lo)(0);
    if (std::isinf(box.sides[0])) return make_box({a}, {kInf});
    hi(0) = box.lower[0] + box.sides[0];
    const double b = map.inverse(hi)(0);
    return make_box({std::min(a, b)}, {std::abs(b - a)});
  }
  return std::nullopt;
}

AxisBox preimage_bounds(const Map& map, const AxisBox& box) {
  if (const auto exact = exact_preimage_box(map, box)) return *exact;
  if (map.preimage_window) return map.preimage_window(box);
  if (map.affine) {
    if (!box_all_finite(box))
      throw std::invalid_argument("preimage_bounds: box must be finite");
    const AffineMap inv = affine_inverse(*map.affine);
    const int n = map.n;
    std::vector<double> lo(n, kInf), hi(n, -kInf);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      Eigen::VectorXd corner(n);
      for (int d = 0; d < n; ++d)
        corner(d) = box.lower[d] + ((mask >> d) & 1u ? box.sides[d] : 0.0);
      const Eigen::VectorXd x = inv.A * corner + inv.b;
      for (int d = 0; d < n; ++d) {
        lo[d] = std::min(lo[d], x(d));
        hi[d] = std::max(hi[d], x(d));
      }
    }
    std::vector<double> sides(n);
    for (int d = 0; d < n; ++d) sides[d] = std::max(hi[d] - lo[d], 1e-12);
    return make_box(std::move(lo), std::move(sides));
  }
  throw std::invalid_argument(
      "preimage_bounds: map '" + map.name + "' has no preimage window");
}

const char* bound_direction_name(BoundDirection direction) {
  switch (direction) {
    case BoundDirection::lower:
      return "lower";
    case BoundDirection::upper:
      return "upper";
    case BoundDirection::exact:
      return "exact";
  }
  return "unknown";
}

SvdResult svd_ascending(const Eigen::MatrixXd& matrix) {
  if (!all_finite(matrix))
    throw std::invalid_argument("svd_ascending: entries must be finite");
  if (matrix.rows() != matrix.cols())
    throw std::invalid_argument("svd_ascending: matrix must be square");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const int n = static_cast<int>(matrix.rows());
  SvdResult out;
  out.alpha.resize(n);
  out.U.resize(n, n);
  out.V.resize(n, n);
  // Eigen returns singular values descending; flip to ascending.
  for (int i = 0; i < n; ++i) {
    out.alpha(i) = svd.singularValues()(n - 1 - i);
    out.U.col(i) = svd.matrixU().col(n - 1 - i);
    out.V.col(i) = svd.matrixV().col(n - 1 - i);
  }
  return out;
}

OperatorBound lebesgue_opnorm_affine(const AffineMap& map, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("lebesgue_opnorm_affine: p > 0");
  const double det = std::abs(map.A.determinant());
  std::ostringstream source;
  source << "|det|^{-1/p}, det=" << det;
  return OperatorBound{std::pow(det, -1.0 / p), BoundDirection::exact,
                       source.str()};
}

OperatorBound morrey_opnorm_upper_affine(const AffineMap& map,
                                         const MorreyParams& params) {
  if (map.dim() != params.n)
    throw std::invalid_argument("morrey_opnorm_upper_affine: dimension");
  const double L = svd_ascending(map.A).alpha(params.n - 1);
  const double det = std::abs(map.A.determinant());
  const double stretch = std::max(1.0, std::sqrt(params.n) * L);
  const double value =
      std::pow(stretch, params.n / params.q - params.n / params.p) *
      std::pow(det, -1.0 / params.q);
  std::ostringstream source;
  source << "(max(1,sqrt(n)L))^{n/q-n/p} |det|^{-1/q}, L=" << L
         << ", det=" << det;
  return OperatorBound{value, BoundDirection::upper, source.str()};
}

OperatorBound diag_opnorm_lower(const std::vector<double>& entries,
                                const MorreyParams& params,
                                const std::vector<AxisBox>& witnesses) {
  if (entries.size() != static_cast<std::size_t>(params.n))
    throw std::invalid_argument("diag_opnorm_lower: dimension mismatch");
  for (double d : entries)
    if (!(d > 0.0) || !std::isfinite(d))
      throw std::invalid_argument("diag_opnorm_lower: entries must be positive");
  if (witnesses.empty())
    throw std::invalid_argument("diag_opnorm_lower: empty witness family");

  std::vector<double> sorted = entries;
  std::sort(sorted.begin(), sorted.end());

  OperatorBound best{-1.0, BoundDirection::lower, ""};
  for (const AxisBox& witness : witnesses) {
    if (!box_all_finite(witness))
      throw std::invalid_argument("diag_opnorm_lower: witnesses must be finite");
    std::vector<double> pre(witness.sides);
    // Witness boxes live in the sorted-entry frame; the norm is
    // permutation invariant, so this matches some axis assignment.
    for (int d = 0; d < params.n; ++d) pre[d] /= sorted[d];
    const double numer = box_indicator_norm(make_box(pre), params).value;
    const double denom = box_indicator_norm(witness, params).value;
    const double ratio = numer / denom;
    if (ratio > best.value)
      best = OperatorBound{ratio, BoundDirection::lower,
                           describe_box(witness)};
  }
  return best;
}

std::vector<AxisBox> diag_witness_family(const std::vector<double>& entries) {
  std::vector<double> sorted = entries;
  std::sort(sorted.begin(), sorted.end());
  const int n = static_cast<int>(sorted.size());
  std::vector<AxisBox> family;
  if (n == 1) {
    family.push_back(make_box({1.0}));
    family.push_back(make_box({2.0}));
    return family;
  }
  // sides (1, R_1, ..., R_{n-1}) with R_i in {a_i, a_i^2, 2 a_i^2}.
  std::vector<std::array<double, 3>> choices(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    const double a = sorted[i + 1] / sorted[0];
    choices[i] = {a, a * a, 2.0 * a * a};
  }
  std::vector<int> pick(n - 1, 0);
  for (;;) {
    std::vector<double> sides(n, 1.0);
    for (int i = 0; i < n - 1; ++i) sides[i + 1] = choices[i][pick[i]];
    family.push_back(make_box(std::move(sides)));
    int i = n - 2;
    for (; i >= 0; --i) {
      if (++pick[i] < 3) break;
      pick[i] = 0;
    }
    if (i < 0) break;
  }
  family.push_back(make_box(std::vector<double>(n, 1.0)));
  return family;
}

double min_entry_lower_bound(double M, const MorreyParams& params) {
  if (regime_index(params).m != 1)
    throw std::domain_error(
        "min_entry_lower_bound: requires the slab regime n*q <= p");
  if (!(M > 0.0))
    throw std::invalid_argument("min_entry_lower_bound: M must be positive");
  return std::pow(M, -params.p / params.n);
}

namespace {

double box_measure_or_throw(const AxisBox& box) {
  if (!box_all_finite(box))
    throw std::invalid_argument("set ratio: sets must have finite measure");
  const double vol = box_volume(box);
  if (!(vol > 0.0))
    throw std::invalid_argument("set ratio: set of zero measure in the family");
  return vol;
}

bool point_in_box(const Eigen::VectorXd& y, const AxisBox& box) {
  for (int d = 0; d < box.dim(); ++d) {
    if (y(d) < box.lower[d] || y(d) >= box.lower[d] + box.sides[d])
      return false;
  }
  return true;
}

// Forward counting of {x : phi(x) in E} on a window grid; refined until two
// successive resolutions agree.
double counted_preimage_measure(const Map& map, const AxisBox& set,
                                const SetRatioConfig& config) {
  const AxisBox window = preimage_bounds(map, set);
  const int n = map.n;
  double previous = -1.0;
  double measure = 0.0;
  std::size_t cells = config.initial_cells;
  for (int refine = 0; refine <= config.max_refines; ++refine, cells *= 2) {
    std::size_t count = 0;
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> step(n);
    double cellVol = 1.0;
    for (int d = 0; d < n; ++d) {
      step[d] = window.sides[d] / static_cast<double>(cells);
      cellVol *= step[d];
    }
    Eigen::VectorXd x(n);
    for (;;) {
      for (int d = 0; d < n; ++d)
        x(d) = window.lower[d] + (static_cast<double>(idx[d]) + 0.5) * step[d];
      if (point_in_box(map.eval(x), set)) ++count;
      int d = n - 1;
      for (; d >= 0; --d) {
        if (++idx[d] < cells) break;
        idx[d] = 0;
      }
      if (d < 0) break;
    }
    measure = static_cast<double>(count) * cellVol;
    if (previous >= 0.0 &&
        std::abs(measure - previous) <=
            config.agree_rel * std::max(measure, 1e-300))
      break;
    previous = measure;
  }
  return measure;
}

}  // namespace

OperatorBound set_ratio_estimator(const Map& map,
                                  const std::vector<AxisBox>& sets,
                                  const SetRatioConfig& config) {
  if (sets.empty())
    throw std::invalid_argument("set_ratio_estimator: empty family");
  OperatorBound best{-1.0, BoundDirection::lower, ""};
  for (const AxisBox& set : sets) {
    const double setMeasure = box_measure_or_throw(set);
    double preMeasure;
    std::string how;
    if (map.affine) {
      preMeasure = setMeasure / std::abs(map.affine->A.determinant());
      how = "exact affine";
    } else if (const auto pre = exact_preimage_box(map, set)) {
      preMeasure = box_volume(*pre);
      how = "exact preimage box";
    } else {
      preMeasure = counted_preimage_measure(map, set, config);
      how = "grid counting";
    }
    const double ratio = preMeasure / setMeasure;
    if (ratio > best.value)
      best = OperatorBound{ratio, BoundDirection::lower,
                           how + ": " + describe_box(set)};
  }
  return best;
}

SingularProfile jacobian_profile(const Map& map, const AxisBox& domain,
                                 std::size_t samples_per_axis) {
  if (domain.dim() != map.n)
    throw std::invalid_argument("jacobian_profile: dimension mismatch");
  if (!box_all_finite(domain))
    throw std::invalid_argument("jacobian_profile: domain must be finite");
  if (samples_per_axis < 1)
    throw std::invalid_argument("jacobian_profile: need samples");

  const int n = map.n;
  SingularProfile profile;
  profile.n = n;
  profile.shape.assign(static_cast<std::size_t>(n), samples_per_axis);
  profile.spacing = 0.0;
  std::vector<double> step(n, 0.0);
  for (int d = 0; d < n; ++d) {
    step[d] = samples_per_axis > 1
                  ? domain.sides[d] / static_cast<double>(samples_per_axis - 1)
                  : 0.0;
    profile.spacing = std::max(profile.spacing, step[d]);
  }

  auto jacobian_at = [&](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    if (map.jacobian) return map.jacobian(x);
    // Central differences, step 1e-5 (1 + |x_j|) per coordinate.
    Eigen::MatrixXd J(n, n);
    for (int j = 0; j < n; ++j) {
      const double h = 1e-5 * (1.0 + std::abs(x(j)));
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      J.col(j) = (map.eval(xp) - map.eval(xm)) / (2.0 * h);
    }
    return J;
  };

  std::vector<std::size_t> idx(n, 0);
  for (;;) {
    Eigen::VectorXd x(n);
    for (int d = 0; d < n; ++d)
      x(d) = samples_per_axis > 1
                 ? domain.lower[d] + static_cast<double>(idx[d]) * step[d]
                 : domain.lower[d] + 0.5 * domain.sides[d];
    const Eigen::MatrixXd J = jacobian_at(x);
    const double det = J.determinant();
    Eigen::VectorXd alpha;
    bool bad = !J.allFinite();
    if (!bad) {
      alpha = svd_ascending(J).alpha;
      bad = !(alpha(0) > 0.0);
    } else {
      alpha = Eigen::VectorXd::Zero(n);
    }
    if (bad) profile.flagged.push_back(profile.points.size());
    profile.points.push_back(x);
    profile.alphas.push_back(alpha);
    profile.dets.push_back(det);

    int d = n - 1;
    for (; d >= 0; --d) {
      if (++idx[d] < samples_per_axis) break;
      idx[d] = 0;
    }
    if (d < 0) break;
  }
  return profile;
}

const char* cert_verdict_name(CertVerdict verdict) {
  switch (verdict) {
    case CertVerdict::certified:
      return "certified";
    case CertVerdict::failed:
      return "failed";
    case CertVerdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

BiLipCertificate bilip_certify(const SingularProfile& profile, double C,
                               const CertifyOptions& options) {
  if (profile.points.empty())
    throw std::invalid_argument("bilip_certify: empty profile");
  if (!(C > 0.0))
    throw std::invalid_argument("bilip_certify: threshold must be positive");

  BiLipCertificate cert;
  cert.spacing = profile.spacing;
  cert.c_lower = kInf;
  cert.L_upper = 0.0;
  const int n = profile.n;
  for (std::size_t i = 0; i < profile.alphas.size(); ++i) {
    cert.c_lower = std::min(cert.c_lower, profile.alphas[i](0));
    cert.L_upper = std::max(cert.L_upper, profile.alphas[i](n - 1));
  }
  cert.inverse_lipschitz_bound = std::sqrt(static_cast<double>(n)) / cert.c_lower;

  if (!profile.flagged.empty()) {
    cert.verdict = CertVerdict::failed;
    cert.detail = "singular or non-finite Jacobian at sampled points";
    return cert;
  }
  if (cert.c_lower < C) {
    cert.verdict = CertVerdict::failed;
    std::ostringstream detail;
    detail << "sampled alpha_1=" << cert.c_lower << " < C=" << C;
    cert.detail = detail.str();
    return cert;
  }
  if (profile.spacing > options.max_spacing) {
    cert.verdict = CertVerdict::inconclusive;
    cert.detail = "sample spacing above the configured bound";
    return cert;
  }
  // Neighbor variation of alpha_1 on the sample lattice: large jumps mean
  // the sampling cannot vouch for the space between points.
  double maxJump = 0.0;
  if (!profile.shape.empty()) {
    std::vector<std::size_t> strides(profile.shape.size());
    std::size_t acc = 1;
    for (int d = static_cast<int>(profile.shape.size()) - 1; d >= 0; --d) {
      strides[d] = acc;
      acc *= profile.shape[d];
    }
    for (std::size_t i = 0; i < profile.alphas.size(); ++i) {
      for (std::size_t d = 0; d < profile.shape.size(); ++d) {
        const std::size_t coord = (i / strides[d]) % profile.shape[d];
        if (coord + 1 >= profile.shape[d]) continue;
        const double a = profile.alphas[i](0);
        const double b = profile.alphas[i + strides[d]](0);
        maxJump = std::max(maxJump,
                           std::abs(a - b) / std::max({a, b, 1e-300}));
      }
    }
  }
  if (maxJump > options.max_neighbor_jump) {
    std::ostringstream detail;
    detail << "alpha_1 varies " << maxJump * 100.0
           << "% between neighboring samples";
    cert.verdict = CertVerdict::inconclusive;
    cert.detail = detail.str();
    return cert;
  }
  cert.verdict = CertVerdict::certified;
  std::ostringstream detail;
  detail << "inf alpha_1=" << cert.c_lower << " >= C=" << C;
  cert.detail = detail.str();
  return cert;
}

GridFunction pullback_grid(const GridFunction& f, const Map& map,
                           const GridSpec& target) {
  if (target.dim() != map.n || f.grid.dim() != map.n)
    throw std::invalid_argument("pullback_grid: dimension mismatch");
  const int n = map.n;
  const auto strides = grid_strides(f.grid);

  auto sample = [&](const std::vector<long>& cell) -> double {
    std::size_t at = 0;
    for (int d = 0; d < n; ++d) {
      if (cell[d] < 0 || cell[d] >= static_cast<long>(f.grid.shape[d]))
        return 0.0;
      at += static_cast<std::size_t>(cell[d]) * strides[d];
    }
    return f.values[at];
  };

  const std::size_t count = cell_count(target);
  std::vector<double> values(count, 0.0);
  std::vector<std::size_t> idx(n, 0);
  Eigen::VectorXd x(n);
  std::vector<long> base(n), cell(n);
  std::vector<double> w(n);
  for (std::size_t lin = 0; lin < count; ++lin) {
    for (int d = 0; d < n; ++d)
      x(d) = target.origin[d] + (static_cast<double>(idx[d]) + 0.5) * target.h;
    const Eigen::VectorXd y = map.eval(x);
    // Multilinear interpolation on the cell-center lattice of f.
    for (int d = 0; d < n; ++d) {
      const double t = (y(d) - f.grid.origin[d]) / f.grid.h - 0.5;
      const double fl = std::floor(t);
      base[d] = static_cast<long>(fl);
      w[d] = t - fl;
    }
    double value = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      double weight = 1.0;
      for (int d = 0; d < n; ++d) {
        const bool hi = (mask >> d) & 1u;
        weight *= hi ? w[d] : 1.0 - w[d];
        cell[d] = base[d] + (hi ? 1 : 0);
      }
      if (weight != 0.0) value += weight * sample(cell);
    }
    values[lin] = value;

    int d = n - 1;
    for (; d >= 0; --d) {
      if (++idx[d] < target.shape[d]) break;
      idx[d] = 0;
    }
    if (d < 0) break;
  }
  return GridFunction{target, std::move(values)};
}

GridSet pullback_box_indicator(const AxisBox& box, const Map& map,
                               const GridSpec& target, Raster mode) {
  if (target.dim() != map.n || box.dim() != map.n)
    throw std::invalid_argument("pullback_box_indicator: dimension mismatch");
  const int n = map.n;
  const std::size_t count = cell_count(target);
  std::vector<std::uint8_t> mask(count, 0);
  std::vector<std::size_t> idx(n, 0);
  Eigen::VectorXd x(n);

  auto inClosed = [&](const Eigen::VectorXd& y) {
    for (int d = 0; d < n; ++d)
      if (y(d) < box.lower[d] || y(d) > box.lower[d] + box.sides[d])
        return false;
    return true;
  };

  for (std::size_t lin = 0; lin < count; ++lin) {
    bool inside;
    if (mode == Raster::center) {
      for (int d = 0; d < n; ++d)
        x(d) = target.origin[d] + (static_cast<double>(idx[d]) + 0.5) * target.h;
      inside = point_in_box(map.eval(x), box);
    } else {
      inside = true;
      for (unsigned corner = 0; corner < (1u << n) && inside; ++corner) {
        for (int d = 0; d < n; ++d)
          x(d) = target.origin[d] +
                 (static_cast<double>(idx[d]) + ((corner >> d) & 1u)) * target.h;
        inside = inClosed(map.eval(x));
      }
    }
    mask[lin] = inside ? 1 : 0;

    int d = n - 1;
    for (; d >= 0; --d) {
      if (++idx[d] < target.shape[d]) break;
      idx[d] = 0;
    }
    if (d < 0) break;
  }
  return GridSet{target, std::move(mask)};
}

namespace {

AxisBox grid_bounding_box(const GridSpec& grid) {
  std::vector<double> sides(grid.dim());
  for (int d = 0; d < grid.dim(); ++d)
    sides[d] = static_cast<double>(grid.shape[d]) * grid.h;
  return make_box(grid.origin, std::move(sides));
}

GridSpec raster_grid_for(const AxisBox& window, std::size_t cells_per_axis) {
  double maxSide = 0.0;
  for (double s : window.sides) maxSide = std::max(maxSide, s);
  const double h = maxSide / static_cast<double>(cells_per_axis);
  return cover_box(window, h, 2);
}

}  // namespace

OperatorBound opnorm_lower_search(const Map& map, const MorreyParams& params,
                                  const TestFamily& family,
                                  const LowerSearchOptions& options) {
  if (family.boxes.empty() && family.functions.empty())
    throw std::invalid_argument("opnorm_lower_search: empty family");

  OperatorBound best{-1.0, BoundDirection::lower, ""};
  std::string skipped;

  auto consider = [&](double ratio, const std::string& source) {
    if (ratio > best.value)
      best = OperatorBound{ratio, BoundDirection::lower, source};
  };

  for (const AxisBox& box : family.boxes) {
    const NormValue denom = indicator_norm(box, params);
    if (!(denom.value > 0.0) || !denom.finite()) {
      skipped += " [skipped zero/unbounded-norm " + describe_box(box) + "]";
      continue;
    }
    if (const auto pre = exact_preimage_box(map, box)) {
      const NormValue numer = indicator_norm(*pre, params);
      consider(numer.value / denom.value,
               "exact: " + describe_box(box));
    } else {
      const AxisBox window = preimage_bounds(map, box);
      const GridSpec grid = raster_grid_for(window, options.raster_cells);
      const GridSet pulled =
          pullback_box_indicator(box, map, grid, options.raster);
      const NormValue numer = morrey_norm_grid(pulled, params, options.policy);
      consider(numer.value / denom.value, "grid: " + describe_box(box));
    }
  }

  for (std::size_t i = 0; i < family.functions.size(); ++i) {
    const GridFunction& f = family.functions[i];
    const NormValue denom = morrey_norm_grid(f, params, options.policy);
    if (!(denom.value > 0.0)) {
      skipped += " [skipped zero-norm grid function]";
      continue;
    }
    const AxisBox window = preimage_bounds(map, grid_bounding_box(f.grid));
    const GridSpec target = cover_box(window, f.grid.h, 2);
    const GridFunction pulled = pullback_grid(f, map, target);
    const NormValue numer = morrey_norm_grid(pulled, params, options.policy);
    std::ostringstream source;
    source << "grid function #" << i;
    consider(numer.value / denom.value, source.str());
  }

  if (best.value < 0.0)
    throw std::invalid_argument(
        "opnorm_lower_search: no usable test function" + skipped);
  best.source += skipped;
  return best;
}

}  // namespace morreylab
