#include <concentric/geometry.hpp>

#include <concentric/errors.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace concentric {

namespace {

constexpr double kPi = std::numbers::pi;

// Core of alg_to_geo_single without exceptions, so the Monte Carlo validity
// predicate stays cheap.
std::optional<Ellipse> try_alg_to_geo(Conic c) {
  if (!(std::isfinite(c.A) && std::isfinite(c.B) && std::isfinite(c.C) && std::isfinite(c.D) &&
        std::isfinite(c.E) && std::isfinite(c.F))) {
    return std::nullopt;
  }
  // Scale-equivalence: make the quadratic part positive definite.
  if (c.A + c.C < 0.0) {
    c = {-c.A, -c.B, -c.C, -c.D, -c.E, -c.F};
  }
  const double den = c.B * c.B - c.A * c.C;
  if (!(den < 0.0)) return std::nullopt;

  Ellipse e;
  e.x_c = (c.C * c.D - c.B * c.E) / den;
  e.y_c = (c.A * c.E - c.B * c.D) / den;

  const double x = c.A * c.E * c.E + c.C * c.D * c.D - 2.0 * c.B * c.D * c.E + den * c.F;
  const double root = std::hypot(c.A - c.C, 2.0 * c.B);
  const double ra = 2.0 * x * (c.A + c.C + root);
  const double rb = 2.0 * x * (c.A + c.C - root);
  if (!(ra > 0.0) || !(rb > 0.0)) return std::nullopt;

  e.a = std::sqrt(ra) / (-2.0 * den);
  e.b = std::sqrt(rb) / (-2.0 * den);

  if (root <= 1e-12 * (c.A + c.C)) {
    // A circle up to rounding: any tilt fits, report 0.
    e.psi = 0.0;
  } else if (c.B == 0.0) {
    e.psi = c.A <= c.C ? 0.0 : normalize_tilt(kPi / 2.0);
  } else {
    e.psi = normalize_tilt(0.5 * std::atan2(-2.0 * c.B, c.C - c.A));
  }
  if (!(std::isfinite(e.a) && std::isfinite(e.b) && std::isfinite(e.x_c) && std::isfinite(e.y_c))) {
    return std::nullopt;
  }
  return e;
}

}  // namespace

double normalize_tilt(double psi) {
  double out = psi - kPi * std::floor((psi + kPi / 2.0) / kPi);
  // Guard the half-open upper end against rounding.
  if (out >= kPi / 2.0) out -= kPi;
  return out;
}

Vector canonicalize(const Vector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InputError("cannot canonicalize a zero or non-finite parameter vector");
  }
  Vector out = v / norm;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] != 0.0) {
      if (out[i] < 0.0) out = -out;
      break;
    }
  }
  return out;
}

ConcentricTheta::ConcentricTheta(Vector theta, double f0) : f0_(f0) {
  if (theta.size() < 6) throw InputError("theta needs at least 6 entries (K >= 1)");
  if (!(f0 > 0.0)) throw InputError("f0 must be positive");
  theta_ = canonicalize(theta);
}

Conic ConcentricTheta::ring_conic(std::size_t ring) const {
  return {A(), B(), C(), D() * f0_, E() * f0_, F(ring) * f0_ * f0_};
}

void validate(const GeometricParams& phi) {
  if (phi.rings.empty()) throw InputError("geometry needs at least one ring");
  for (std::size_t i = 0; i < phi.rings.size(); ++i) {
    const auto& r = phi.rings[i];
    if (!(r.b > 0.0) || !(r.a >= r.b)) {
      throw InputError("ring " + std::to_string(i + 1) + " violates a >= b > 0");
    }
    if (i > 0 && !(r.a > phi.rings[i - 1].a && r.b > phi.rings[i - 1].b)) {
      throw InputError("rings must be strictly nested, inner first");
    }
  }
}

Conic geo_to_alg_single(const Ellipse& e) {
  const double c = std::cos(e.psi);
  const double s = std::sin(e.psi);
  const double ia2 = 1.0 / (e.a * e.a);
  const double ib2 = 1.0 / (e.b * e.b);
  Conic out;
  out.A = c * c * ia2 + s * s * ib2;
  out.B = c * s * (ia2 - ib2);
  out.C = s * s * ia2 + c * c * ib2;
  out.D = -out.A * e.x_c - out.B * e.y_c;
  out.E = -out.C * e.y_c - out.B * e.x_c;
  out.F = out.A * e.x_c * e.x_c + out.C * e.y_c * e.y_c + 2.0 * out.B * e.x_c * e.y_c - 1.0;
  return out;
}

Ellipse alg_to_geo_single(const Conic& conic) {
  auto e = try_alg_to_geo(conic);
  if (!e) throw NotAnEllipse("conic coefficients do not describe a real ellipse");
  return *e;
}

ConcentricTheta assemble_concentric_theta(const GeometricParams& phi, double f0) {
  validate(phi);
  if (!(f0 > 0.0)) throw InputError("f0 must be positive");
  const auto& inner = phi.rings.front();
  const std::size_t k = phi.ring_count();

  std::vector<double> scale(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double ra = phi.rings[i].a / inner.a;
    const double rb = phi.rings[i].b / inner.b;
    if (std::abs(ra - rb) > 1e-9 * ra) {
      throw NotProportional("ring " + std::to_string(i + 1) +
                            " axes are not a common multiple of the inner ring");
    }
    scale[i] = ra;
  }

  const Conic c = geo_to_alg_single(phi.ring(0));
  const double quad = c.A * phi.x_c * phi.x_c + 2.0 * c.B * phi.x_c * phi.y_c +
                      c.C * phi.y_c * phi.y_c;
  Vector theta(static_cast<Eigen::Index>(5 + k));
  theta << c.A, c.B, c.C, c.D / f0, c.E / f0, Vector::Zero(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    // Ring i shares A..E once its equation is multiplied by scale_i^2.
    theta[static_cast<Eigen::Index>(5 + i)] = (quad - scale[i] * scale[i]) / (f0 * f0);
  }
  return ConcentricTheta(theta, f0);
}

GeometricParams theta_to_geo(const ConcentricTheta& theta) {
  GeometricParams out;
  out.rings.reserve(theta.ring_count());
  for (std::size_t i = 0; i < theta.ring_count(); ++i) {
    auto e = try_alg_to_geo(theta.ring_conic(i));
    if (!e) {
      throw NotConcentricEllipses("ring " + std::to_string(i + 1) + " is not a real ellipse");
    }
    if (i == 0) {
      out.x_c = e->x_c;
      out.y_c = e->y_c;
      out.psi = e->psi;
    }
    out.rings.push_back({e->a, e->b});
  }
  return out;
}

bool is_concentric_ellipses(const ConcentricTheta& theta) {
  for (std::size_t i = 0; i < theta.ring_count(); ++i) {
    if (!try_alg_to_geo(theta.ring_conic(i))) return false;
  }
  return true;
}

double residual(const ConcentricTheta& theta, const Point& p, std::size_t ring) {
  if (ring >= theta.ring_count()) throw InputError("ring index out of range");
  const double f0 = theta.f0();
  return theta.A() * p.x * p.x + 2.0 * theta.B() * p.x * p.y + theta.C() * p.y * p.y +
         2.0 * f0 * theta.D() * p.x + 2.0 * f0 * theta.E() * p.y + f0 * f0 * theta.F(ring);
}

}  // namespace concentric
