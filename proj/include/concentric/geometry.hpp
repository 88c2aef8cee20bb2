#pragma once

#include <concentric/types.hpp>

#include <cstddef>
#include <vector>

namespace concentric {

/// Semi-axes of one ring, a >= b > 0.
struct RingAxes {
  double a = 0.0;
  double b = 0.0;
};

/// A single ellipse in geometric form. psi is the tilt of the a-axis,
/// normalized to [-pi/2, pi/2).
struct Ellipse {
  double x_c = 0.0;
  double y_c = 0.0;
  double a = 0.0;
  double b = 0.0;
  double psi = 0.0;
};

/// K concentric ellipses sharing center and tilt. Rings are ordered inner
/// to outer.
struct GeometricParams {
  double x_c = 0.0;
  double y_c = 0.0;
  std::vector<RingAxes> rings;
  double psi = 0.0;

  std::size_t ring_count() const { return rings.size(); }
  Ellipse ring(std::size_t i) const { return {x_c, y_c, rings[i].a, rings[i].b, psi}; }
};

/// Unscaled conic A x^2 + 2B xy + C y^2 + 2D x + 2E y + F = 0.
struct Conic {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
  double E = 0.0;
  double F = 0.0;

  double discriminant() const { return A * C - B * B; }
  double evaluate(double x, double y) const {
    return A * x * x + 2.0 * B * x * y + C * y * y + 2.0 * D * x + 2.0 * E * y + F;
  }
};

/// Algebraic parameters (A, B, C, D, E, F_1, ..., F_K) of K concentric
/// ellipses in the f0-scaled form
///
///   A x^2 + 2B xy + C y^2 + 2 f0 D x + 2 f0 E y + f0^2 F_i = 0.
///
/// The stored vector is always unit-norm and sign-canonical (A > 0, or the
/// first nonzero entry positive when A == 0).
class ConcentricTheta {
 public:
  ConcentricTheta() = default;

  /// Normalizes and canonicalizes `theta`. Throws InputError for a vector
  /// shorter than 6 entries, a zero vector, or a non-positive f0.
  ConcentricTheta(Vector theta, double f0);

  const Vector& vector() const { return theta_; }
  double f0() const { return f0_; }
  std::size_t ring_count() const { return static_cast<std::size_t>(theta_.size()) - 5; }
  std::size_t dimension() const { return static_cast<std::size_t>(theta_.size()); }

  double A() const { return theta_[0]; }
  double B() const { return theta_[1]; }
  double C() const { return theta_[2]; }
  double D() const { return theta_[3]; }
  double E() const { return theta_[4]; }
  /// Constant term of ring `ring` (0-based).
  double F(std::size_t ring) const { return theta_[static_cast<Eigen::Index>(5 + ring)]; }

  /// Unscaled single conic for one ring (D, E multiplied by f0, F by f0^2).
  Conic ring_conic(std::size_t ring) const;

 private:
  Vector theta_;
  double f0_ = 1.0;
};

/// Scales to unit norm and flips the sign so that A > 0 (or the first
/// nonzero entry is positive).
Vector canonicalize(const Vector& v);

/// Throws InputError unless the rings are nonempty, a_i >= b_i > 0, and
/// strictly nested.
void validate(const GeometricParams& phi);

Conic geo_to_alg_single(const Ellipse& ellipse);

/// Inverse of geo_to_alg_single up to scale. Throws NotAnEllipse when the
/// quadratic part is not definite or the locus is empty.
Ellipse alg_to_geo_single(const Conic& conic);

/// Builds the shared-coefficient theta for a concentric scene. The ring axes
/// must be proportional: a_i / a_1 == b_i / b_1 to relative 1e-9.
ConcentricTheta assemble_concentric_theta(const GeometricParams& phi, double f0);

/// Recovers the geometry of every ring. Throws NotConcentricEllipses when
/// any ring is not a real ellipse; this is the validity predicate used for
/// convergence rates. Ring nesting is not enforced here.
GeometricParams theta_to_geo(const ConcentricTheta& theta);

/// Non-throwing form of theta_to_geo's validity test.
bool is_concentric_ellipses(const ConcentricTheta& theta);

/// Algebraic residual of `p` against ring `ring` (0-based).
double residual(const ConcentricTheta& theta, const Point& p, std::size_t ring);

/// Maps any angle into [-pi/2, pi/2).
double normalize_tilt(double psi);

}  // namespace concentric
