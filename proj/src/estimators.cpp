#include <concentric/estimators.hpp>

#include <concentric/errors.hpp>
#include <concentric/pencil.hpp>

#include <chrono>
#include <cmath>

namespace concentric {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Scatter {
  Matrix m;
  Eigen::SelfAdjointEigenSolver<Matrix> eig;
  double norm = 0.0;
  bool singular = false;
};

Scatter make_scatter(const DataSet& data, const FitOptions& options) {
  Scatter s;
  s.m = assemble_M(data);
  s.eig.compute(s.m);
  if (s.eig.info() != Eigen::Success) throw NumericalFailure("eigendecomposition of M failed");
  const Vector& beta = s.eig.eigenvalues();
  s.norm = beta.cwiseAbs().maxCoeff();
  if (!(s.norm > 0.0)) throw NumericalFailure("scatter matrix is zero");
  s.singular = beta[0] <= options.kernel_tolerance * s.norm;
  return s;
}

// Index of the largest eta with eta > 0.
std::size_t largest_positive(const PencilSolution& sol) {
  double scale = 0.0;
  for (double eta : sol.eigenvalues) scale = std::max(scale, std::abs(eta));
  for (std::size_t i = sol.size(); i-- > 0;) {
    if (sol.eigenvalues[i] > 1e-12 * scale) return i;
  }
  throw NumericalFailure("pencil has no positive eigenvalue");
}

// Index of the largest |eta|, ignoring non-finite values. Eigenvalues are
// sorted, so the candidates are the two ends.
std::size_t largest_magnitude(const PencilSolution& sol) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < sol.size(); ++i) {
    const double eta = sol.eigenvalues[i];
    if (!std::isfinite(eta) || eta == 0.0) continue;
    if (!best || std::abs(eta) > std::abs(sol.eigenvalues[*best])) best = i;
  }
  if (!best) throw NumericalFailure("pencil has no finite nonzero eigenvalue");
  return *best;
}

FitResult finish(Method method, const DataSet& data, const Scatter& s, const Matrix& n,
                 const Vector& theta, double lambda) {
  FitResult r;
  r.method = method;
  r.theta = ConcentricTheta(theta, data.f0);
  r.eigenvalue = lambda;
  r.valid = is_concentric_ellipses(r.theta);
  r.relative_residual = pencil_residual(s.m, n, lambda, r.theta.vector()) / s.norm;
  return r;
}

Matrix constraint_for(Method method, const DataSet& data, const Scatter& s,
                      const FitOptions& options) {
  switch (method) {
    case Method::LS: return Matrix::Identity(s.m.rows(), s.m.cols());
    case Method::OLeary: return oleary_N(data.ring_count());
    case Method::Taubin: return assemble_NT(data);
    case Method::SemiHyper: return assemble_NS(data);
    case Method::Hyper: return assemble_NH(data, truncated_pinv(s.m, options.pinv_threshold));
  }
  throw InputError("unknown method");
}

// Taubin through the Schur complement of the F block, which is diagonal
// with entries n_i f0^4. N_T vanishes on that block.
std::pair<Vector, double> solve_taubin(const DataSet& data, const Scatter& s, const Matrix& nt) {
  const std::size_t k = data.ring_count();
  const auto kk = static_cast<Eigen::Index>(k);
  const Matrix m11 = s.m.topLeftCorner(5, 5);
  const Matrix m12 = s.m.topRightCorner(5, kk);
  const Vector m22 = s.m.bottomRightCorner(kk, kk).diagonal();
  if ((m22.array() <= 0.0).any()) throw EmptyRing("Taubin needs every ring populated");
  const Vector inv22 = m22.cwiseInverse();

  const Matrix reduced_m = m11 - m12 * inv22.asDiagonal() * m12.transpose();
  const Matrix reduced_n = nt.topLeftCorner(5, 5);
  const PencilSolution dual = solve_dual_pencil(reduced_n, reduced_m);
  const Vector theta1 = dual.eigenvectors[largest_positive(dual)];

  Vector theta(s.m.rows());
  theta << theta1, -(inv22.asDiagonal() * (m12.transpose() * theta1));
  theta.normalize();
  const double lambda = theta.dot(s.m * theta) / theta.dot(nt * theta);
  return {theta, lambda};
}

FitResult fit_prepared(Method method, const DataSet& data, const Scatter& s,
                       const FitOptions& options) {
  const Matrix n = constraint_for(method, data, s, options);

  // Noiseless data: M has a one-dimensional kernel spanned by the true theta,
  // which every method returns.
  if (s.singular) {
    const Vector kernel = s.eig.eigenvectors().col(0);
    const double lambda = method == Method::LS ? s.eig.eigenvalues()[0] : 0.0;
    return finish(method, data, s, n, kernel, lambda);
  }

  switch (method) {
    case Method::LS:
      return finish(method, data, s, n, s.eig.eigenvectors().col(0), s.eig.eigenvalues()[0]);
    case Method::OLeary: {
      const PencilSolution dual = solve_dual_pencil(n, s.m);
      const std::size_t i = largest_positive(dual);
      return finish(method, data, s, n, dual.eigenvectors[i], 1.0 / dual.eigenvalues[i]);
    }
    case Method::Taubin: {
      const auto [theta, lambda] = solve_taubin(data, s, n);
      return finish(method, data, s, n, theta, lambda);
    }
    case Method::SemiHyper:
    case Method::Hyper: {
      const PencilSolution dual = solve_dual_pencil(n, s.m);
      const std::size_t i = largest_magnitude(dual);
      return finish(method, data, s, n, dual.eigenvectors[i], 1.0 / dual.eigenvalues[i]);
    }
  }
  throw InputError("unknown method");
}

}  // namespace

FitResult fit(Method method, const DataSet& data, const FitOptions& options) {
  validate(data);
  const auto start = Clock::now();
  const Scatter s = make_scatter(data, options);
  FitResult r = fit_prepared(method, data, s, options);
  r.elapsed_seconds = seconds_since(start);
  return r;
}

FitResult fit_ls(const DataSet& data, const FitOptions& options) {
  return fit(Method::LS, data, options);
}
FitResult fit_oleary(const DataSet& data, const FitOptions& options) {
  return fit(Method::OLeary, data, options);
}
FitResult fit_taubin(const DataSet& data, const FitOptions& options) {
  return fit(Method::Taubin, data, options);
}
FitResult fit_semi_hyper(const DataSet& data, const FitOptions& options) {
  return fit(Method::SemiHyper, data, options);
}
FitResult fit_hyper(const DataSet& data, const FitOptions& options) {
  return fit(Method::Hyper, data, options);
}

std::vector<MethodOutcome> fit_all(const DataSet& data, std::span<const Method> methods,
                                   const FitOptions& options) {
  validate(data);
  const auto start = Clock::now();
  const Scatter s = make_scatter(data, options);
  const double shared = seconds_since(start);

  std::vector<MethodOutcome> out;
  out.reserve(methods.size());
  for (Method method : methods) {
    MethodOutcome outcome;
    outcome.method = method;
    const auto t0 = Clock::now();
    try {
      FitResult r = fit_prepared(method, data, s, options);
      r.elapsed_seconds = shared + seconds_since(t0);
      outcome.result = std::move(r);
    } catch (const Error& e) {
      outcome.error = e.what();
    }
    out.push_back(std::move(outcome));
  }
  return out;
}

}  // namespace concentric
