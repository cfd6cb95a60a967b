#include "tmyag/fitting.hpp"

#include <algorithm>
#include <cmath>

namespace tmyag::fitting {

namespace {

constexpr double kStallStep = 1e-6;

bool all_finite(const Vector& v) { return v.allFinite(); }

void check_problem(const FitProblem& problem, const Vector& init) {
  const auto n = problem.parameters.size();
  if (!problem.residuals) throw InvalidProblem("fit problem has no residual function");
  if (static_cast<std::size_t>(init.size()) != n) {
    throw InvalidProblem("initial vector has " + std::to_string(init.size()) + " entries, expected " +
                         std::to_string(n));
  }
  if (problem.residual_count < n) {
    throw InvalidProblem("fewer residuals (" + std::to_string(problem.residual_count) +
                         ") than parameters (" + std::to_string(n) + ")");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& par = problem.parameters[i];
    if (!(par.lower < par.upper)) throw BoundsViolation("parameter '" + par.name + "': lower >= upper");
    if (!(par.scale > 0) || !std::isfinite(par.scale)) {
      throw InvalidProblem("parameter '" + par.name + "': scale must be positive");
    }
    const double v = init[static_cast<Eigen::Index>(i)];
    if (!(v >= par.lower && v <= par.upper)) {
      throw BoundsViolation("initial value of '" + par.name + "' outside its bounds");
    }
  }
}

/// Works in scaled coordinates u = p / scale.
class Scaled {
 public:
  explicit Scaled(const FitProblem& problem) : problem_(problem) {
    const auto n = static_cast<Eigen::Index>(problem.parameters.size());
    scale_.resize(n);
    lower_.resize(n);
    upper_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& par = problem.parameters[static_cast<std::size_t>(i)];
      scale_[i] = par.scale;
      lower_[i] = par.lower / par.scale;
      upper_[i] = par.upper / par.scale;
    }
  }

  Vector to_physical(const Vector& u) const { return u.cwiseProduct(scale_); }
  Vector to_scaled(const Vector& p) const { return p.cwiseQuotient(scale_); }

  Vector project(const Vector& u) const { return u.cwiseMax(lower_).cwiseMin(upper_); }

  Vector residuals(const Vector& u) const {
    Vector r = problem_.residuals(to_physical(u));
    if (static_cast<std::size_t>(r.size()) != problem_.residual_count) {
      throw InvalidProblem("residual function returned " + std::to_string(r.size()) +
                           " entries, expected " + std::to_string(problem_.residual_count));
    }
    return r;
  }

  Matrix jacobian(const Vector& u) const {
    const Vector p = to_physical(u);
    Matrix j = problem_.jacobian ? problem_.jacobian(p) : numerical_jacobian(problem_, p);
    return j * scale_.asDiagonal();
  }

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Vector& scale() const { return scale_; }

 private:
  const FitProblem& problem_;
  Vector scale_, lower_, upper_;
};

Matrix pseudo_inverse(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  const Vector& values = eig.eigenvalues();
  const double cutoff = std::numeric_limits<double>::epsilon() * static_cast<double>(a.rows()) *
                        std::max(values.cwiseAbs().maxCoeff(), 0.0);
  Vector inv = Vector::Zero(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] > cutoff) inv[i] = 1.0 / values[i];
  }
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

/// Parameters pinned at a bound with the descent direction pointing outward.
std::vector<bool> active_set(const Vector& u, const Vector& gradient, const Scaled& s) {
  std::vector<bool> active(static_cast<std::size_t>(u.size()), false);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const bool at_lower = u[i] <= s.lower()[i] && gradient[i] > 0;
    const bool at_upper = u[i] >= s.upper()[i] && gradient[i] < 0;
    active[static_cast<std::size_t>(i)] = at_lower || at_upper;
  }
  return active;
}

/// Solves (A + damping * diag(A)) step = -g over the free parameters.
bool damped_step(const Matrix& a, const Vector& g, double damping, const std::vector<bool>& active,
                 Vector& step) {
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!active[static_cast<std::size_t>(i)]) free.push_back(i);
  }
  step = Vector::Zero(n);
  if (free.empty()) return true;

  const auto k = static_cast<Eigen::Index>(free.size());
  Matrix m(k, k);
  Vector rhs(k);
  double max_diag = 0;
  for (Eigen::Index i = 0; i < k; ++i) max_diag = std::max(max_diag, a(free[i], free[i]));
  const double floor = max_diag > 0 ? 1e-12 * max_diag : 1.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) m(i, j) = a(free[i], free[j]);
    m(i, i) += damping * std::max(a(free[i], free[i]), floor);
    rhs[i] = -g[free[i]];
  }
  Eigen::LDLT<Matrix> ldlt(m);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
  Vector x = ldlt.solve(rhs);
  if (!x.allFinite()) return false;
  for (Eigen::Index i = 0; i < k; ++i) step[free[i]] = x[i];
  return true;
}

}  // namespace

Matrix numerical_jacobian(const FitProblem& problem, const Vector& p) {
  const auto n = static_cast<Eigen::Index>(problem.parameters.size());
  const auto m = static_cast<Eigen::Index>(problem.residual_count);
  Matrix j(m, n);
  Vector r0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& par = problem.parameters[static_cast<std::size_t>(i)];
    const double h = std::max(1e-7 * par.scale, 1e-12 * std::abs(p[i]));
    Vector plus = p, minus = p;
    plus[i] += h;
    minus[i] -= h;
    const bool up_ok = plus[i] <= par.upper;
    const bool down_ok = minus[i] >= par.lower;
    if (up_ok && down_ok) {
      j.col(i) = (problem.residuals(plus) - problem.residuals(minus)) / (plus[i] - minus[i]);
    } else {
      if (r0.size() == 0) r0 = problem.residuals(p);
      if (up_ok || !down_ok) {
        j.col(i) = (problem.residuals(plus) - r0) / (plus[i] - p[i]);
      } else {
        j.col(i) = (r0 - problem.residuals(minus)) / (p[i] - minus[i]);
      }
    }
  }
  return j;
}

FitResult least_squares(const FitProblem& problem, const Vector& init, const FitOptions& opts) {
  check_problem(problem, init);
  const Scaled s(problem);

  Vector u = s.to_scaled(init);
  Vector r = s.residuals(u);
  if (!all_finite(r)) throw InvalidProblem("non-finite residuals at the initial point");
  double cost = 0.5 * r.squaredNorm();

  FitResult result;
  result.residual_history.push_back(std::sqrt(2 * cost));

  double damping = opts.initial_damping;
  bool converged = cost == 0;
  int iteration = 0;

  while (!converged && iteration < opts.max_iterations) {
    ++iteration;
    const Matrix j = s.jacobian(u);
    const Matrix a = j.transpose() * j;
    const Vector g = j.transpose() * r;
    const auto active = active_set(u, g, s);

    bool accepted = false;
    while (!accepted) {
      Vector step;
      Vector trial_u;
      Vector trial_r;
      double trial_cost = std::numeric_limits<double>::infinity();
      if (damped_step(a, g, damping, active, step)) {
        trial_u = s.project(u + step);
        trial_r = s.residuals(trial_u);
        if (all_finite(trial_r)) trial_cost = 0.5 * trial_r.squaredNorm();
      }

      if (trial_cost < cost) {
        const double rel_step = (trial_u - u).norm() / (u.norm() + opts.xtol);
        const double rel_decrease = (cost - trial_cost) / cost;
        u = trial_u;
        r = trial_r;
        cost = trial_cost;
        damping = std::max(damping / 10, 1e-15);
        result.residual_history.push_back(std::sqrt(2 * cost));
        accepted = true;
        if ((rel_step < opts.xtol && rel_decrease < opts.ftol) || cost == 0) converged = true;
        continue;
      }

      damping *= 10;
      if (damping > opts.max_damping) {
        // No damped step reduces the cost. This is a minimum to working
        // precision if the undamped step is negligible.
        Vector gn;
        const bool solved = damped_step(a, g, 0.0, active, gn) ||
                            damped_step(a, g, 1e-12, active, gn);
        const double gn_rel = solved ? (s.project(u + gn) - u).norm() / (u.norm() + opts.xtol)
                                     : std::numeric_limits<double>::infinity();
        if (gn_rel < kStallStep || g.cwiseAbs().maxCoeff() == 0) {
          converged = true;
          break;
        }
        throw SingularNormalEquations("damping exhausted without reducing the cost (relative "
                                      "Gauss-Newton step " + std::to_string(gn_rel) + ")");
      }
    }
  }

  if (!converged) {
    throw NoConvergence("no convergence after " + std::to_string(iteration) + " iterations",
                        s.to_physical(u), result.residual_history);
  }

  const Matrix j = s.jacobian(u);
  Matrix cov_u = pseudo_inverse(j.transpose() * j);
  const auto m = static_cast<double>(problem.residual_count);
  const auto n = static_cast<double>(problem.parameters.size());
  if (opts.scale_covariance && m > n) cov_u *= 2 * cost / (m - n);

  result.params = s.to_physical(u);
  result.covariance = s.scale().asDiagonal() * cov_u * s.scale().asDiagonal();
  result.covariance = 0.5 * (result.covariance + result.covariance.transpose()).eval();
  result.std_errors = result.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  result.residual_norm = std::sqrt(2 * cost);
  result.iterations = iteration;
  result.converged = true;
  return result;
}

}  // namespace tmyag::fitting
