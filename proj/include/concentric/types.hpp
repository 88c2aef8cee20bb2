#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <string_view>

namespace concentric {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A 2-D observation in data units.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// The five non-iterative estimators. Each one differs only in the
/// constraint matrix N of the pencil M theta = lambda N theta.
enum class Method { LS, OLeary, Taubin, SemiHyper, Hyper };

inline constexpr std::array<Method, 5> kAllMethods = {
    Method::LS, Method::OLeary, Method::Taubin, Method::SemiHyper, Method::Hyper};

std::string_view to_string(Method method);

/// Accepts the short names used on the command line (ls, oleary, taubin,
/// semi, hyper) case-insensitively. Throws InputError otherwise.
Method parse_method(std::string_view name);

}  // namespace concentric
