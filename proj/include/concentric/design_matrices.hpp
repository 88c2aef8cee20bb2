#pragma once

#include <concentric/types.hpp>

#include <cstddef>
#include <vector>

namespace concentric {

/// Observed points grouped by ring (ring 0 is the innermost), with the
/// scale factor f0 used to build carriers.
struct DataSet {
  std::vector<std::vector<Point>> rings;
  double f0 = 1.0;

  std::size_t ring_count() const { return rings.size(); }
  std::size_t total_points() const;
  /// Length of theta, 5 + K.
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(5 + rings.size()); }
};

/// Throws EmptyRing, InsufficientPoints (fewer than 6 + K points) or
/// InputError (no rings, non-finite coordinates, f0 <= 0).
void validate(const DataSet& data);

/// Default relative cutoff for truncated_pinv.
inline constexpr double kPinvThreshold = 1e-6;

/// xi = (x^2, 2xy, y^2, 2 f0 x, 2 f0 y, f0^2 delta_{ring,0}, ..., f0^2 delta_{ring,K-1}).
Vector carrier(const Point& p, std::size_t ring, std::size_t ring_count, double f0);

/// Normalized first-order covariance V0[xi] of a carrier under isotropic
/// unit noise. The F block rows and columns are zero.
Matrix v0_matrix(const Point& p, std::size_t ring_count, double f0);

/// M = sum of xi xi^T over every point.
Matrix assemble_M(const DataSet& data);

/// N_T = sum of V0[xi] over every point.
Matrix assemble_NT(const DataSet& data);

/// Constraint theta^T N theta = AC - B^2.
Matrix oleary_N(std::size_t ring_count);

/// xi_c = sum of carriers.
Vector carrier_sum(const DataSet& data);

/// e = (1, 0, 1, 0, 0, 0, ..., 0), the expected second-order carrier drift.
Vector drift_vector(std::size_t ring_count);

/// S[A] = (A + A^T) / 2.
Matrix symmetrize(const Matrix& a);

/// N_S = N_T + 2 S[xi_c e^T].
Matrix assemble_NS(const DataSet& data);

/// Pi_ij = (xi^T M^- xi) V0 + 2 S[V0 M^- xi xi^T] for a single carrier.
Matrix perturbation_term(const Vector& xi, const Matrix& v0, const Matrix& m_pinv);

/// N_H = N_S - sum( tr[M^- V0] xi xi^T + Pi_ij ). Pass the truncated
/// pseudoinverse of assemble_M(data) as `m_pinv`.
Matrix assemble_NH(const DataSet& data, const Matrix& m_pinv);

/// Pseudoinverse of a symmetric matrix through its eigendecomposition.
/// Eigenvalues with |beta| <= threshold * max|beta| are treated as zero.
Matrix truncated_pinv(const Matrix& m, double threshold = kPinvThreshold);

}  // namespace concentric
