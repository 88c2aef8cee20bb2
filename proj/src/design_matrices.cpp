#include <concentric/design_matrices.hpp>

#include <concentric/errors.hpp>

#include <cmath>
#include <string>

namespace concentric {

std::size_t DataSet::total_points() const {
  std::size_t n = 0;
  for (const auto& ring : rings) n += ring.size();
  return n;
}

void validate(const DataSet& data) {
  if (data.rings.empty()) throw InputError("data set has no rings");
  if (!(data.f0 > 0.0) || !std::isfinite(data.f0)) throw InputError("f0 must be positive");
  for (std::size_t i = 0; i < data.rings.size(); ++i) {
    if (data.rings[i].empty()) throw EmptyRing("ring " + std::to_string(i + 1) + " has no points");
    for (const auto& p : data.rings[i]) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InputError("non-finite coordinate");
    }
  }
  const std::size_t needed = 6 + data.rings.size();
  if (data.total_points() < needed) {
    throw InsufficientPoints("insufficient points: need at least " + std::to_string(needed) +
                             ", got " + std::to_string(data.total_points()));
  }
}

Vector carrier(const Point& p, std::size_t ring, std::size_t ring_count, double f0) {
  Vector xi = Vector::Zero(static_cast<Eigen::Index>(5 + ring_count));
  xi[0] = p.x * p.x;
  xi[1] = 2.0 * p.x * p.y;
  xi[2] = p.y * p.y;
  xi[3] = 2.0 * f0 * p.x;
  xi[4] = 2.0 * f0 * p.y;
  xi[static_cast<Eigen::Index>(5 + ring)] = f0 * f0;
  return xi;
}

Matrix v0_matrix(const Point& p, std::size_t ring_count, double f0) {
  const double x = p.x;
  const double y = p.y;
  const auto d = static_cast<Eigen::Index>(5 + ring_count);
  Matrix v = Matrix::Zero(d, d);
  v(0, 0) = x * x;
  v(0, 1) = v(1, 0) = x * y;
  v(0, 3) = v(3, 0) = f0 * x;
  v(1, 1) = x * x + y * y;
  v(1, 2) = v(2, 1) = x * y;
  v(1, 3) = v(3, 1) = f0 * y;
  v(1, 4) = v(4, 1) = f0 * x;
  v(2, 2) = y * y;
  v(2, 4) = v(4, 2) = f0 * y;
  v(3, 3) = f0 * f0;
  v(4, 4) = f0 * f0;
  return 4.0 * v;
}

Matrix assemble_M(const DataSet& data) {
  const Eigen::Index d = data.dimension();
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < data.ring_count(); ++i) {
    for (const auto& p : data.rings[i]) {
      const Vector xi = carrier(p, i, data.ring_count(), data.f0);
      m.selfadjointView<Eigen::Lower>().rankUpdate(xi);
    }
  }
  return m.selfadjointView<Eigen::Lower>();
}

Matrix assemble_NT(const DataSet& data) {
  const Eigen::Index d = data.dimension();
  Matrix n = Matrix::Zero(d, d);
  for (const auto& ring : data.rings) {
    for (const auto& p : ring) n += v0_matrix(p, data.ring_count(), data.f0);
  }
  return n;
}

Matrix oleary_N(std::size_t ring_count) {
  const auto d = static_cast<Eigen::Index>(5 + ring_count);
  Matrix n = Matrix::Zero(d, d);
  n(0, 2) = n(2, 0) = 0.5;
  n(1, 1) = -1.0;
  return n;
}

Vector carrier_sum(const DataSet& data) {
  Vector sum = Vector::Zero(data.dimension());
  for (std::size_t i = 0; i < data.ring_count(); ++i) {
    for (const auto& p : data.rings[i]) sum += carrier(p, i, data.ring_count(), data.f0);
  }
  return sum;
}

Vector drift_vector(std::size_t ring_count) {
  Vector e = Vector::Zero(static_cast<Eigen::Index>(5 + ring_count));
  e[0] = 1.0;
  e[2] = 1.0;
  return e;
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

Matrix assemble_NS(const DataSet& data) {
  const Vector xc = carrier_sum(data);
  const Vector e = drift_vector(data.ring_count());
  return assemble_NT(data) + xc * e.transpose() + e * xc.transpose();
}

Matrix perturbation_term(const Vector& xi, const Matrix& v0, const Matrix& m_pinv) {
  const Vector u = m_pinv * xi;
  const Vector w = v0 * u;
  return xi.dot(u) * v0 + w * xi.transpose() + xi * w.transpose();
}

Matrix assemble_NH(const DataSet& data, const Matrix& m_pinv) {
  Matrix nh = assemble_NS(data);
  const std::size_t k = data.ring_count();
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& p : data.rings[i]) {
      const Vector xi = carrier(p, i, k, data.f0);
      const Matrix v0 = v0_matrix(p, k, data.f0);
      const double trace = m_pinv.cwiseProduct(v0).sum();
      nh -= trace * xi * xi.transpose() + perturbation_term(xi, v0, m_pinv);
    }
  }
  return nh;
}

Matrix truncated_pinv(const Matrix& m, double threshold) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");
  const Vector& beta = es.eigenvalues();
  const double cutoff = threshold * beta.cwiseAbs().maxCoeff();
  Vector inv = Vector::Zero(beta.size());
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    if (std::abs(beta[i]) > cutoff) inv[i] = 1.0 / beta[i];
  }
  const Matrix& u = es.eigenvectors();
  return u * inv.asDiagonal() * u.transpose();
}

}  // namespace concentric
