#pragma once

#include <concentric/types.hpp>

#include <vector>

namespace concentric {

/// Finite real eigenpairs of a symmetric pencil, sorted by eigenvalue
/// (ties broken by lexicographic order of the eigenvectors). Eigenvectors
/// are unit-norm and sign-canonical.
struct PencilSolution {
  std::vector<double> eigenvalues;
  std::vector<Vector> eigenvectors;

  std::size_t size() const { return eigenvalues.size(); }
};

/// All finite real pairs of M x = lambda N x. N may be singular or
/// indefinite. When M is positive definite the problem is solved in the
/// dual form N x = eta M x (a symmetric-definite problem, so every eta is
/// real) and lambda = 1 / eta; otherwise a QZ decomposition is used and
/// complex or infinite pairs are dropped. Throws NumericalFailure when no
/// finite pair exists.
PencilSolution solve_symmetric_pencil(const Matrix& m, const Matrix& n);

/// Pairs of N x = eta M x for symmetric positive definite M, including
/// eta == 0. The returned eigenvalues are the etas. Throws NumericalFailure
/// if the Cholesky factorization of M fails.
PencilSolution solve_dual_pencil(const Matrix& n, const Matrix& m);

/// ||M x - lambda N x||.
double pencil_residual(const Matrix& m, const Matrix& n, double lambda, const Vector& x);

}  // namespace concentric
