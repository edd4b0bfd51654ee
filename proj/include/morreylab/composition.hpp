#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "morreylab/core.hpp"
#include "morreylab/exact_norms.hpp"
#include "morreylab/grid_norms.hpp"

namespace morreylab {

// Invertible x -> Ax + b.
struct AffineMap {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  int dim() const { return static_cast<int>(A.rows()); }
};

AffineMap make_affine(Eigen::MatrixXd A, Eigen::VectorXd b);
AffineMap identity_affine(int n);
AffineMap diag_affine(const std::vector<double>& entries);
AffineMap affine_inverse(const AffineMap& map);
bool is_diagonal(const AffineMap& map);

// A self-map of R^n with whatever analytic structure is available. Exact
// norm/measure paths switch on the optional fields; anything missing falls
// back to sampling.
struct Map {
  std::string name;
  int n = 1;
  std::optional<AffineMap> affine;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;  // optional
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> inverse;   // optional
  // Bounding box of the preimage of a finite box (for rasterization windows).
  std::function<AxisBox(const AxisBox&)> preimage_window;  // optional
};

Map map_from_affine(AffineMap affine, std::string name = "affine");
Map identity_map(int n);
Map diag_map(const std::vector<double>& entries);
// 1-D piecewise map: x for x < 0, e^x - 1 for x >= 0. Volume ratio <= 1 on
// intervals but the derivative is unbounded (not Lipschitz).
Map exp1d_map();
// (x1, x2) -> (x1^3 + x1, x2 / (3 x1^2 + 1)); determinant 1 everywhere.
Map shear_cubic_map();

// Preimage of a box when it is itself a box: diagonal affine maps in any
// dimension, monotone 1-D maps with an inverse.
std::optional<AxisBox> exact_preimage_box(const Map& map, const AxisBox& box);

// Bounding box of the preimage of a finite box. Exact for affine maps
// (image of the corners under the inverse); built-ins install their own.
AxisBox preimage_bounds(const Map& map, const AxisBox& box);

enum class BoundDirection { lower, upper, exact };
const char* bound_direction_name(BoundDirection direction);

struct OperatorBound {
  double value = 0.0;
  BoundDirection direction = BoundDirection::lower;
  std::string source;
};

// A = U diag(alpha) V^T with alpha ascending, U and V orthogonal.
struct SvdResult {
  Eigen::VectorXd alpha;
  Eigen::MatrixXd U;
  Eigen::MatrixXd V;
};
SvdResult svd_ascending(const Eigen::MatrixXd& matrix);

// Exact Lebesgue operator norm |det A|^{-1/p} of a composition with an
// invertible affine map (the measure ratio is constant over all sets).
OperatorBound lebesgue_opnorm_affine(const AffineMap& map, double p);

// Upper bound (max(1, sqrt(n) L))^{n/q - n/p} * |det A|^{-1/q} on the Morrey
// operator norm, with L the largest singular value of A.
OperatorBound morrey_opnorm_upper_affine(const AffineMap& map,
                                         const MorreyParams& params);

// Certified lower bound for a diagonal map: sup over witness boxes B of
// ||chi_{D^{-1}B}|| / ||chi_B||, all norms in closed form.
OperatorBound diag_opnorm_lower(const std::vector<double>& entries,
                                const MorreyParams& params,
                                const std::vector<AxisBox>& witnesses);
// Canonical witness family [0,1] x [0,R_1] x ... in the sorted-entry frame,
// R_i over {a_i, a_i^2, 2 a_i^2} with a_i the entry ratios.
std::vector<AxisBox> diag_witness_family(const std::vector<double>& entries);

// In the slab regime (n q <= p), a diagonal map of operator norm <= M must
// have every entry >= M^{-p/n}.
double min_entry_lower_bound(double M, const MorreyParams& params);

// sup over the set family of measure(phi^{-1}(E)) / measure(E). Exact for
// affine maps and monotone 1-D maps with an inverse; otherwise preimages are
// counted on a forward grid refined until two resolutions agree.
struct SetRatioConfig {
  std::size_t initial_cells = 64;  // per axis
  double agree_rel = 0.01;
  int max_refines = 6;
};
OperatorBound set_ratio_estimator(const Map& map,
                                  const std::vector<AxisBox>& sets,
                                  const SetRatioConfig& config = {});

// Per-point ascending singular values and determinants of the Jacobian over
// a uniform sample lattice.
struct SingularProfile {
  int n = 0;
  std::vector<Eigen::VectorXd> points;
  std::vector<Eigen::VectorXd> alphas;  // ascending per point
  std::vector<double> dets;
  std::vector<std::size_t> shape;  // sample lattice shape
  double spacing = 0.0;            // largest axis step
  std::vector<std::size_t> flagged;  // singular / non-finite samples
};
SingularProfile jacobian_profile(const Map& map, const AxisBox& domain,
                                 std::size_t samples_per_axis = 33);

enum class CertVerdict { certified, failed, inconclusive };
const char* cert_verdict_name(CertVerdict verdict);

struct BiLipCertificate {
  double L_upper = 0.0;   // sup of the largest singular value
  double c_lower = 0.0;   // inf of the smallest singular value
  double inverse_lipschitz_bound = 0.0;  // sqrt(n) / c_lower
  double spacing = 0.0;
  CertVerdict verdict = CertVerdict::inconclusive;
  std::string detail;
};

struct CertifyOptions {
  double max_spacing = kInf;
  double max_neighbor_jump = 0.10;  // relative alpha_1 change between samples
};
// certified iff every sampled alpha_1 >= C and the samples are fine enough
// to trust; failed iff some sampled alpha_1 < C.
BiLipCertificate bilip_certify(const SingularProfile& profile, double C,
                               const CertifyOptions& options = {});

// g(x) = f(phi(x)) via multilinear interpolation of the samples; zero
// outside f's grid.
GridFunction pullback_grid(const GridFunction& f, const Map& map,
                           const GridSpec& target);

enum class Raster {
  center,  // cell center lands in the box
  inner,   // every cell corner lands in the (closed) box: for maps with
           // convex box preimages this certifies cell subset containment
};
// chi_{phi^{-1}(box)} sampled on the target grid without interpolation.
GridSet pullback_box_indicator(const AxisBox& box, const Map& map,
                               const GridSpec& target,
                               Raster mode = Raster::center);

// Empirical operator-norm lower bound: max of ||C_phi f|| / ||f|| over a
// finite test family. Box indicators use exact norms whenever the preimage
// is a box; everything else goes through the grid estimator.
struct TestFamily {
  std::vector<AxisBox> boxes;
  std::vector<GridFunction> functions;
};
struct LowerSearchOptions {
  CubeSearchPolicy policy;
  std::size_t raster_cells = 96;  // per axis for rasterized box preimages
  Raster raster = Raster::center;
};
OperatorBound opnorm_lower_search(const Map& map, const MorreyParams& params,
                                  const TestFamily& family,
                                  const LowerSearchOptions& options);

}  // namespace morreylab
