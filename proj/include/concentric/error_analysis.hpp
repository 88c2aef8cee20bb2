#pragma once

#include <concentric/design_matrices.hpp>
#include <concentric/geometry.hpp>
#include <concentric/types.hpp>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace concentric {

/// Noiseless scene: the true parameters and exact points on the rings.
/// All theoretical quantities below are sigma^2-free factors evaluated in the
/// unit-norm, sign-canonical gauge of `theta`.
struct TrueScene {
  ConcentricTheta theta;
  DataSet points;
};

/// Checks that every point lies on its ring (|residual| <= 1e-12 ||xi||)
/// and that f0 and ring counts agree.
TrueScene make_true_scene(ConcentricTheta theta, DataSet points);

/// Moore-Penrose inverse of the exact scatter matrix. The kernel direction
/// theta is deflated explicitly rather than found by eigenvalue truncation.
Matrix true_pinv(const TrueScene& scene);

/// M' = sum (theta^T V0 theta) xi xi^T.
Matrix m_prime(const TrueScene& scene);

/// M^- M' M^-: the leading covariance of every algebraic estimator divided
/// by sigma^2.
Matrix leading_variance(const TrueScene& scene);

/// Pi = sum Pi_ij with Pi_ij = (xi^T M^- xi) V0 + 2 S[V0 M^- xi xi^T].
Matrix pi_matrix(const TrueScene& scene);

/// pi = sum (xi^T M^- xi) V0 theta + (theta^T V0 M^- xi) xi, evaluated
/// termwise.
Vector pi_vector(const TrueScene& scene);

/// E[T] / sigma^2 = N_S - Pi - sum tr[M^- V0] xi xi^T.
Matrix expected_T(const TrueScene& scene);

/// E[T] theta / sigma^2 = N_S theta - pi.
Vector expected_T_theta(const TrueScene& scene);

/// Second-order bias of an arbitrary constraint N:
/// M^- ( (theta^T E[T] theta / theta^T N theta) N theta - E[T] theta ).
/// Throws DegenerateConstraint when theta^T N theta vanishes.
Vector general_bias(const TrueScene& scene, const Matrix& n);

struct BiasReport {
  Method method = Method::LS;
  /// bias / sigma^2; always the sum of the three parts below.
  Vector bias;
  Vector essential_common;
  Vector nonessential;
  Vector essential_diff;
  /// tr[M^- M'] / theta^T N_OL theta
  double p = 0.0;
  /// tr[M^- M'] / theta^T N_T theta
  double q = 0.0;
};

BiasReport theoretical_bias(const TrueScene& scene, Method method);

struct BiasScanRow {
  double sweep_value = 0.0;
  /// ||bias / sigma^2|| per method; empty when the constraint is degenerate.
  std::vector<std::optional<double>> bias_norms;
  std::vector<std::string> warnings;
};

struct BiasScanTable {
  std::string sweep_name;
  std::vector<Method> methods;
  std::vector<BiasScanRow> rows;
};

BiasScanTable bias_scan(std::string sweep_name, std::span<const double> grid,
                        const std::function<TrueScene(double)>& scene_at,
                        std::span<const Method> methods);

}  // namespace concentric
