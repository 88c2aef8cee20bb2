#pragma once

#include <concentric/design_matrices.hpp>
#include <concentric/geometry.hpp>
#include <concentric/types.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace concentric {

struct FitOptions {
  /// Relative eigenvalue cutoff for the pseudoinverse of M used by Hyper.
  double pinv_threshold = kPinvThreshold;
  /// M is treated as exactly singular (noiseless data) when its smallest
  /// eigenvalue is at most this fraction of its largest.
  double kernel_tolerance = 1e-12;
};

struct FitResult {
  Method method = Method::LS;
  ConcentricTheta theta;
  /// lambda of M theta = lambda N theta (1 / eta for Hyper and Semi-Hyper).
  double eigenvalue = 0.0;
  /// theta describes K real concentric ellipses.
  bool valid = false;
  double elapsed_seconds = 0.0;
  /// ||M theta - lambda N theta|| / ||M||_2.
  double relative_residual = 0.0;
};

FitResult fit_ls(const DataSet& data, const FitOptions& options = {});
FitResult fit_oleary(const DataSet& data, const FitOptions& options = {});
FitResult fit_taubin(const DataSet& data, const FitOptions& options = {});
FitResult fit_semi_hyper(const DataSet& data, const FitOptions& options = {});
FitResult fit_hyper(const DataSet& data, const FitOptions& options = {});

FitResult fit(Method method, const DataSet& data, const FitOptions& options = {});

/// Result of one method inside fit_all: either a fit or the failure text.
struct MethodOutcome {
  Method method = Method::LS;
  std::optional<FitResult> result;
  std::string error;
};

/// Runs the requested methods on one shared scatter matrix. A failure in one
/// method is recorded in its outcome and does not affect the others. Input
/// validation errors are still thrown.
std::vector<MethodOutcome> fit_all(const DataSet& data,
                                   std::span<const Method> methods = kAllMethods,
                                   const FitOptions& options = {});

}  // namespace concentric
