#include <concentric/error_analysis.hpp>

#include <concentric/errors.hpp>

#include <cmath>
#include <string>

namespace concentric {
namespace {

// Exact carriers and their covariances, reused by every quantity.
struct Terms {
  std::vector<Vector> xi;
  std::vector<Matrix> v0;
};

Terms collect(const DataSet& data) {
  Terms t;
  const std::size_t k = data.ring_count();
  t.xi.reserve(data.total_points());
  t.v0.reserve(data.total_points());
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& p : data.rings[i]) {
      t.xi.push_back(carrier(p, i, k, data.f0));
      t.v0.push_back(v0_matrix(p, k, data.f0));
    }
  }
  return t;
}

double trace_of_product(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b.transpose()).sum(); }

Matrix m_prime_from(const Terms& t, const Vector& theta) {
  const auto d = theta.size();
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < t.xi.size(); ++j) {
    out.selfadjointView<Eigen::Lower>().rankUpdate(t.xi[j], theta.dot(t.v0[j] * theta));
  }
  return out.selfadjointView<Eigen::Lower>();
}

Vector pi_from(const Terms& t, const Vector& theta, const Matrix& pinv) {
  Vector out = Vector::Zero(theta.size());
  for (std::size_t j = 0; j < t.xi.size(); ++j) {
    const Vector u = pinv * t.xi[j];
    const Vector v0_theta = t.v0[j] * theta;
    out += t.xi[j].dot(u) * v0_theta + v0_theta.dot(u) * t.xi[j];
  }
  return out;
}

void require_nondegenerate(double quadratic, const Matrix& n, const char* what) {
  if (!(std::abs(quadratic) > 1e-14 * std::max(1.0, n.norm()))) {
    throw DegenerateConstraint(std::string("theta^T N theta vanishes for ") + what);
  }
}

}  // namespace

TrueScene make_true_scene(ConcentricTheta theta, DataSet points) {
  validate(points);
  if (points.ring_count() != theta.ring_count()) throw InputError("ring count mismatch");
  if (points.f0 != theta.f0()) throw InputError("f0 mismatch between theta and points");
  const std::size_t k = points.ring_count();
  for (std::size_t i = 0; i < k; ++i) {
    for (const auto& p : points.rings[i]) {
      const double scale = carrier(p, i, k, points.f0).norm();
      if (std::abs(residual(theta, p, i)) > 1e-12 * scale) {
        throw InputError("true point does not lie on its ring");
      }
    }
  }
  return {std::move(theta), std::move(points)};
}

Matrix true_pinv(const TrueScene& scene) {
  const Vector& theta = scene.theta.vector();
  const Matrix m = assemble_M(scene.points);
  // With M theta = 0 and |theta| = 1, (M + c theta theta^T)^-1 equals
  // M^- + theta theta^T / c exactly.
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const double c = es.eigenvalues().cwiseAbs().maxCoeff();
  const Matrix shifted = m + c * theta * theta.transpose();
  Matrix inv = shifted.llt().solve(Matrix::Identity(m.rows(), m.cols()));
  inv -= theta * theta.transpose() / c;
  const Matrix proj = Matrix::Identity(m.rows(), m.cols()) - theta * theta.transpose();
  return symmetrize(proj * inv * proj);
}

Matrix m_prime(const TrueScene& scene) {
  return m_prime_from(collect(scene.points), scene.theta.vector());
}

Matrix leading_variance(const TrueScene& scene) {
  const Matrix pinv = true_pinv(scene);
  return symmetrize(pinv * m_prime(scene) * pinv);
}

Matrix pi_matrix(const TrueScene& scene) {
  const Terms t = collect(scene.points);
  const Matrix pinv = true_pinv(scene);
  const auto d = scene.points.dimension();
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < t.xi.size(); ++j) out += perturbation_term(t.xi[j], t.v0[j], pinv);
  return out;
}

Vector pi_vector(const TrueScene& scene) {
  return pi_from(collect(scene.points), scene.theta.vector(), true_pinv(scene));
}

Matrix expected_T(const TrueScene& scene) {
  const Terms t = collect(scene.points);
  const Matrix pinv = true_pinv(scene);
  Matrix out = assemble_NS(scene.points);
  for (std::size_t j = 0; j < t.xi.size(); ++j) {
    out -= perturbation_term(t.xi[j], t.v0[j], pinv);
    out -= trace_of_product(pinv, t.v0[j]) * t.xi[j] * t.xi[j].transpose();
  }
  return out;
}

Vector expected_T_theta(const TrueScene& scene) {
  return assemble_NS(scene.points) * scene.theta.vector() - pi_vector(scene);
}

Vector general_bias(const TrueScene& scene, const Matrix& n) {
  const Vector& theta = scene.theta.vector();
  const Matrix et = expected_T(scene);
  const double tnt = theta.dot(n * theta);
  require_nondegenerate(tnt, n, "the supplied constraint");
  const Vector et_theta = et * theta;
  return true_pinv(scene) * ((theta.dot(et_theta) / tnt) * (n * theta) - et_theta);
}

BiasReport theoretical_bias(const TrueScene& scene, Method method) {
  const Terms t = collect(scene.points);
  const Vector& theta = scene.theta.vector();
  const Matrix pinv = true_pinv(scene);
  const Matrix nt = assemble_NT(scene.points);
  const Matrix nol = oleary_N(scene.points.ring_count());
  const Vector xc = carrier_sum(scene.points);
  const Vector e = drift_vector(scene.points.ring_count());
  const Vector pi = pi_from(t, theta, pinv);
  const double tr = trace_of_product(pinv, m_prime_from(t, theta));

  const double t_nt = theta.dot(nt * theta);
  const double t_nol = theta.dot(nol * theta);

  BiasReport r;
  r.method = method;
  r.p = tr / t_nol;
  r.q = tr / t_nt;

  const Vector common = -theta.dot(e) * (pinv * xc);
  r.nonessential = pinv * pi;
  const auto d = theta.size();

  switch (method) {
    case Method::LS:
      r.essential_common = common;
      r.essential_diff = -(pinv * (nt * theta));
      break;
    case Method::OLeary:
      // N_T theta and (theta^T N_T theta / theta^T N_OL theta) N_OL theta are
      // different vectors, so both survive in the difference term.
      require_nondegenerate(t_nol, nol, "OLeary");
      r.essential_common = common;
      r.essential_diff = pinv * ((t_nt / t_nol - r.p) * (nol * theta) - nt * theta);
      break;
    case Method::Taubin:
      require_nondegenerate(t_nt, nt, "Taubin");
      r.essential_common = common;
      r.essential_diff = -r.q * (pinv * (nt * theta));
      break;
    case Method::SemiHyper:
      require_nondegenerate(t_nt, nt, "SemiHyper");
      r.essential_common = r.q * common;
      r.essential_diff = -r.q * (pinv * (nt * theta));
      break;
    case Method::Hyper:
      // theta^T N_H theta = theta^T N_T theta - tr[M^- M'].
      require_nondegenerate(t_nt - tr, nt, "Hyper");
      r.essential_common = Vector::Zero(d);
      r.nonessential = Vector::Zero(d);
      r.essential_diff = Vector::Zero(d);
      break;
  }
  r.bias = r.essential_common + r.nonessential + r.essential_diff;
  return r;
}

BiasScanTable bias_scan(std::string sweep_name, std::span<const double> grid,
                        const std::function<TrueScene(double)>& scene_at,
                        std::span<const Method> methods) {
  BiasScanTable table;
  table.sweep_name = std::move(sweep_name);
  table.methods.assign(methods.begin(), methods.end());
  for (double value : grid) {
    BiasScanRow row;
    row.sweep_value = value;
    const TrueScene scene = scene_at(value);
    for (Method method : methods) {
      try {
        row.bias_norms.push_back(theoretical_bias(scene, method).bias.norm());
      } catch (const DegenerateConstraint& e) {
        row.bias_norms.push_back(std::nullopt);
        row.warnings.push_back(std::string(to_string(method)) + ": " + e.what());
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace concentric
