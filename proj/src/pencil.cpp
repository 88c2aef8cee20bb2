#include <concentric/pencil.hpp>

#include <concentric/errors.hpp>
#include <concentric/geometry.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace concentric {
namespace {

// Relative size below which M is treated as singular and an eta as zero.
constexpr double kSingularTol = 1e-13;
constexpr double kZeroEtaTol = 1e-12;

bool lexicographic_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

PencilSolution sorted(std::vector<double> values, std::vector<Vector> vectors) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (values[i] != values[j]) return values[i] < values[j];
    return lexicographic_less(vectors[i], vectors[j]);
  });
  PencilSolution out;
  out.eigenvalues.reserve(order.size());
  out.eigenvectors.reserve(order.size());
  for (auto i : order) {
    out.eigenvalues.push_back(values[i]);
    out.eigenvectors.push_back(std::move(vectors[i]));
  }
  return out;
}

PencilSolution solve_by_qz(const Matrix& m, const Matrix& n) {
  Eigen::GeneralizedEigenSolver<Matrix> ges(m, n, true);
  if (ges.info() != Eigen::Success) throw NumericalFailure("QZ decomposition failed");
  const auto alphas = ges.alphas();
  const auto betas = ges.betas();
  const auto vecs = ges.eigenvectors();
  const double scale = std::max(m.norm(), n.norm());

  std::vector<double> values;
  std::vector<Vector> vectors;
  for (Eigen::Index i = 0; i < alphas.size(); ++i) {
    const double beta = betas[i];
    const auto alpha = alphas[i];
    if (std::abs(beta) <= kZeroEtaTol * scale) continue;  // infinite
    if (std::abs(alpha.imag()) > 1e-10 * (std::abs(alpha.real()) + std::abs(beta))) continue;
    Vector x = vecs.col(i).real();
    if (!(x.norm() > 0.0)) continue;
    values.push_back(alpha.real() / beta);
    vectors.push_back(canonicalize(x));
  }
  return sorted(std::move(values), std::move(vectors));
}

}  // namespace

PencilSolution solve_dual_pencil(const Matrix& n, const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) throw NumericalFailure("M is not positive definite");
  const auto l = llt.matrixL();
  // C = L^-1 N L^-T, symmetric, with eigenpairs (eta, L^T x).
  const Matrix half = l.solve(n);
  Matrix c = l.solve(half.transpose());
  c = 0.5 * (c + c.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  if (es.info() != Eigen::Success) throw NumericalFailure("eigendecomposition failed");

  std::vector<double> values;
  std::vector<Vector> vectors;
  const auto lt = llt.matrixU();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    Vector x = lt.solve(es.eigenvectors().col(i));
    values.push_back(es.eigenvalues()[i]);
    vectors.push_back(canonicalize(x));
  }
  return sorted(std::move(values), std::move(vectors));
}

PencilSolution solve_symmetric_pencil(const Matrix& m, const Matrix& n) {
  if (m.rows() != m.cols() || n.rows() != n.cols() || m.rows() != n.rows()) {
    throw InputError("pencil matrices must be square and of equal size");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const Vector& beta = es.eigenvalues();
  const bool definite = beta.minCoeff() > kSingularTol * beta.cwiseAbs().maxCoeff();

  PencilSolution out;
  if (definite) {
    const PencilSolution dual = solve_dual_pencil(n, m);
    double eta_scale = 0.0;
    for (double eta : dual.eigenvalues) eta_scale = std::max(eta_scale, std::abs(eta));
    std::vector<double> values;
    std::vector<Vector> vectors;
    for (std::size_t i = 0; i < dual.size(); ++i) {
      const double eta = dual.eigenvalues[i];
      if (std::abs(eta) <= kZeroEtaTol * eta_scale) continue;
      values.push_back(1.0 / eta);
      vectors.push_back(dual.eigenvectors[i]);
    }
    out = sorted(std::move(values), std::move(vectors));
  } else {
    out = solve_by_qz(m, n);
  }
  if (out.size() == 0) throw NumericalFailure("pencil has no finite real eigenpair");
  return out;
}

double pencil_residual(const Matrix& m, const Matrix& n, double lambda, const Vector& x) {
  return (m * x - lambda * (n * x)).norm();
}

}  // namespace concentric
