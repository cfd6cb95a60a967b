#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tmyag/error.hpp"

namespace tmyag::fitting {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Parameter {
  std::string name;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  /// Typical magnitude; the solver works on p / scale.
  double scale = 1.0;
};

/// Weighted least-squares problem: minimise 1/2 |r(p)|^2 where r is
/// (model - data) / sigma.
struct FitProblem {
  std::vector<Parameter> parameters;
  std::size_t residual_count = 0;
  std::function<Vector(const Vector&)> residuals;
  /// Optional analytic d r / d p; central differences are used when empty.
  std::function<Matrix(const Vector&)> jacobian;
  std::string description;
};

struct FitOptions {
  double xtol = 1e-10;  // relative step
  double ftol = 1e-12;  // relative cost decrease
  int max_iterations = 500;
  double initial_damping = 1e-3;
  double max_damping = 1e16;
  /// Multiply the covariance by the reduced chi-square; for data without
  /// meaningful sigmas.
  bool scale_covariance = false;
};

struct FitResult {
  Vector params;
  Matrix covariance;
  Vector std_errors;
  double residual_norm = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, Vector best, std::vector<double> history)
      : Error("NoConvergence", what), best_(std::move(best)), history_(std::move(history)) {}

  const Vector& best_params() const noexcept { return best_; }
  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  Vector best_;
  std::vector<double> history_;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) with Marquardt diagonal scaling,
/// damping x10 on rejection and /10 on acceptance, bounds enforced by
/// projection with an active set. Converged when both the relative step and
/// the relative cost decrease fall below the tolerances, or when no damped
/// step can reduce the cost any more and the Gauss-Newton step is negligible.
FitResult least_squares(const FitProblem& problem, const Vector& init, const FitOptions& opts = {});

/// Central-difference d r / d p with per-parameter step max(1e-7 scale, 1e-12 |p|),
/// switching to a one-sided difference next to a bound.
Matrix numerical_jacobian(const FitProblem& problem, const Vector& p);

}  // namespace tmyag::fitting
