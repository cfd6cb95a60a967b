#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "tmyag/error.hpp"
#include "tmyag/fitting.hpp"
#include "tmyag/relax_fit.hpp"
#include "tmyag/relaxation.hpp"

using namespace tmyag;
using namespace tmyag::fitting;

namespace {

struct Data {
  std::vector<double> x, y, sigma;
};

Data quadratic_data(double g2) {
  Data d;
  for (int i = 0; i <= 12; ++i) {
    const double b = 0.5 * i;
    d.x.push_back(b);
    d.y.push_back(g2 * b * b);
    d.sigma.push_back(1e8);
  }
  return d;
}

FitProblem quadratic_problem(const Data& d) {
  FitProblem p;
  p.parameters = {{"gamma2", -1e12, 1e12, 1e9}};
  p.residual_count = d.x.size();
  p.residuals = [&d](const Vector& q) {
    Vector r(d.x.size());
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      r[static_cast<Eigen::Index>(i)] = (q[0] * d.x[i] * d.x[i] - d.y[i]) / d.sigma[i];
    }
    return r;
  };
  p.jacobian = [&d](const Vector&) {
    Matrix j(d.x.size(), 1);
    for (std::size_t i = 0; i < d.x.size(); ++i) j(static_cast<Eigen::Index>(i), 0) = d.x[i] * d.x[i] / d.sigma[i];
    return j;
  };
  return p;
}

// y = a exp(-k x) + c with noisy data
FitProblem exp_problem(const Data& d) {
  FitProblem p;
  p.parameters = {{"a", 0, 100, 1}, {"k", 0, 10, 0.1}, {"c", -10, 10, 1}};
  p.residual_count = d.x.size();
  p.residuals = [&d](const Vector& q) {
    Vector r(d.x.size());
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      r[static_cast<Eigen::Index>(i)] = (q[0] * std::exp(-q[1] * d.x[i]) + q[2] - d.y[i]) / d.sigma[i];
    }
    return r;
  };
  p.jacobian = [&d](const Vector& q) {
    Matrix j(d.x.size(), 3);
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const double e = std::exp(-q[1] * d.x[i]);
      j(k, 0) = e / d.sigma[i];
      j(k, 1) = -q[0] * d.x[i] * e / d.sigma[i];
      j(k, 2) = 1 / d.sigma[i];
    }
    return j;
  };
  return p;
}

Data exp_data(std::uint64_t seed, double sigma_scale = 1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, 0.05);
  Data d;
  for (int i = 0; i < 40; ++i) {
    const double x = 0.25 * i;
    d.x.push_back(x);
    d.y.push_back(3 * std::exp(-0.7 * x) + 0.4 + n(rng));
    d.sigma.push_back(0.05 * sigma_scale);
  }
  return d;
}

// Componentwise 1e-6 relative agreement on top of the floating-point floor
// of the difference quotient, eps |r| / h.
void check_jacobian(const FitProblem& prob, const Vector& q) {
  const Matrix num = numerical_jacobian(prob, q);
  const Matrix ana = prob.jacobian(q);
  REQUIRE(num.rows() == ana.rows());
  REQUIRE(num.cols() == ana.cols());
  const double rmax = prob.residuals(q).cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < num.cols(); ++j) {
    const double h = std::max(1e-7 * prob.parameters[static_cast<std::size_t>(j)].scale, 1e-12 * std::abs(q[j]));
    const double floor = 16 * std::numeric_limits<double>::epsilon() * std::max(rmax, 1.0) / h;
    for (Eigen::Index i = 0; i < num.rows(); ++i) {
      CHECK(std::abs(num(i, j) - ana(i, j)) <= 1e-6 * std::abs(ana(i, j)) + floor);
    }
  }
}

}  // namespace

TEST_CASE("quadratic coefficient recovery") {
  const auto d = quadratic_data(4.69e9);
  const auto res = least_squares(quadratic_problem(d), Vector::Constant(1, 1e9));
  CHECK(res.converged);
  CHECK(std::abs(res.params[0] / 4.69e9 - 1) < 1e-9);
}

TEST_CASE("linear problem converges at once from the truth") {
  const auto d = quadratic_data(4.69e9);
  const auto res = least_squares(quadratic_problem(d), Vector::Constant(1, 4.69e9));
  CHECK(res.converged);
  CHECK(res.iterations <= 2);
  CHECK(res.residual_norm < 1e-9);
}

TEST_CASE("Rosenbrock valley") {
  FitProblem p;
  p.parameters = {{"x"}, {"y"}};
  p.residual_count = 2;
  p.residuals = [](const Vector& q) {
    Vector r(2);
    r << 10 * (q[1] - q[0] * q[0]), 1 - q[0];
    return r;
  };
  Vector init(2);
  init << -1.2, 1.0;
  const auto res = least_squares(p, init);
  CHECK(res.converged);
  CHECK(std::abs(res.params[0] - 1) < 1e-8);
  CHECK(std::abs(res.params[1] - 1) < 1e-8);
}

TEST_CASE("residual history decreases monotonically") {
  const auto d = exp_data(1);
  Vector init(3);
  init << 1, 0.2, 0;
  const auto res = least_squares(exp_problem(d), init);
  CHECK(res.converged);
  for (std::size_t i = 1; i < res.residual_history.size(); ++i) {
    CHECK(res.residual_history[i] <= res.residual_history[i - 1]);
  }
  CHECK(std::abs(res.params[1] - 0.7) < 0.05);
}

TEST_CASE("covariance is symmetric and matches the standard errors") {
  const auto d = exp_data(2);
  Vector init(3);
  init << 1, 0.2, 0;
  const auto res = least_squares(exp_problem(d), init);
  CHECK((res.covariance - res.covariance.transpose()).cwiseAbs().maxCoeff() == 0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(res.covariance);
  CHECK(es.eigenvalues().minCoeff() >= 0);
  for (Eigen::Index k = 0; k < 3; ++k) CHECK(res.std_errors[k] == std::sqrt(res.covariance(k, k)));
}

TEST_CASE("scaling every sigma scales the covariance quadratically") {
  const auto d1 = exp_data(3, 1);
  const auto d4 = exp_data(3, 4);
  Vector init(3);
  init << 1, 0.2, 0;
  const auto r1 = least_squares(exp_problem(d1), init);
  const auto r4 = least_squares(exp_problem(d4), init);
  for (Eigen::Index k = 0; k < 3; ++k) {
    CHECK(std::abs(r4.params[k] - r1.params[k]) <= 1e-8 * std::abs(r1.params[k]));
    for (Eigen::Index l = 0; l < 3; ++l) {
      CHECK(std::abs(r4.covariance(k, l) - 16 * r1.covariance(k, l)) <= 1e-6 * std::abs(16 * r1.covariance(k, l)));
    }
  }
}

TEST_CASE("numerical Jacobian agrees with the analytic one") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ua(0.5, 5), uk(0.1, 2), uc(-1, 1);
  const auto d = exp_data(4);
  const auto prob = exp_problem(d);
  for (int trial = 0; trial < 20; ++trial) {
    Vector q(3);
    q << ua(rng), uk(rng), uc(rng);
    check_jacobian(prob, q);
  }
}

TEST_CASE("numerical Jacobian of the quadratic model") {
  const auto d = quadratic_data(4.69e9);
  const auto prob = quadratic_problem(d);
  for (double g : {1e9, 4.69e9, -3e9}) check_jacobian(prob, Vector::Constant(1, g));
}

TEST_CASE("numerical Jacobian of the pooled relaxation model") {
  const double gamma = 4.0e8;
  const auto datasets = synthesize_relaxation_datasets(RelaxParams::published(), gamma, 0.1, 0);
  std::vector<RateRecord> recs;
  for (const auto& ds : datasets) recs.insert(recs.end(), ds.records.begin(), ds.records.end());
  const auto base = RelaxParams::published().to_array();

  FitProblem prob;
  for (std::size_t k = 0; k < base.size(); ++k) prob.parameters.push_back({std::string(RelaxParams::kNames[k]), 0, 1e300, base[k]});
  prob.residual_count = recs.size();
  auto unpack = [](const Vector& q) {
    std::array<double, RelaxParams::kCount> a{};
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = q[static_cast<Eigen::Index>(k)];
    return RelaxParams::from_array(a);
  };
  prob.residuals = [&](const Vector& q) {
    const auto p = unpack(q);
    Vector r(recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto& x = recs[i];
      r[static_cast<Eigen::Index>(i)] = std::log(rate(x.b, x.temp, gamma, p) / x.rate) / (x.sigma / x.rate);
    }
    return r;
  };
  prob.jacobian = [&](const Vector& q) {
    const auto p = unpack(q);
    Matrix j(recs.size(), RelaxParams::kCount);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto& x = recs[i];
      const double model = rate(x.b, x.temp, gamma, p);
      const auto g = rate_gradient(x.b, x.temp, gamma, p);
      for (std::size_t k = 0; k < g.size(); ++k) {
        j(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = g[k] / model / (x.sigma / x.rate);
      }
    }
    return j;
  };

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.6, 1.4);
  for (int trial = 0; trial < 20; ++trial) {
    Vector q(RelaxParams::kCount);
    for (std::size_t k = 0; k < base.size(); ++k) q[static_cast<Eigen::Index>(k)] = base[k] * u(rng);
    check_jacobian(prob, q);
  }
}

TEST_CASE("bounds are respected") {
  const auto d = exp_data(5);
  auto prob = exp_problem(d);
  prob.parameters[1].upper = 0.5;  // truth 0.7 lies outside
  Vector init(3);
  init << 1, 0.2, 0;
  const auto res = least_squares(prob, init);
  CHECK(res.params[1] <= 0.5);
  CHECK(res.params[1] > 0.49);

  Vector outside(3);
  outside << 1, 0.9, 0;
  CHECK_THROWS_AS(least_squares(prob, outside), BoundsViolation);
  prob.parameters[0].lower = 200;
  CHECK_THROWS_AS(least_squares(prob, init), BoundsViolation);
}

TEST_CASE("iteration limit reports the best point") {
  FitProblem p;
  p.parameters = {{"x"}, {"y"}};
  p.residual_count = 2;
  p.residuals = [](const Vector& q) {
    Vector r(2);
    r << 10 * (q[1] - q[0] * q[0]), 1 - q[0];
    return r;
  };
  Vector init(2);
  init << -1.2, 1.0;
  FitOptions opts;
  opts.max_iterations = 2;
  try {
    least_squares(p, init, opts);
    FAIL("expected NoConvergence");
  } catch (const NoConvergence& e) {
    CHECK(e.best_params().size() == 2);
    CHECK_FALSE(e.residual_history().empty());
  }
}

TEST_CASE("malformed problems") {
  FitProblem p;
  p.parameters = {{"a"}, {"b"}};
  p.residual_count = 1;
  p.residuals = [](const Vector& q) { return Vector::Constant(1, q[0] + q[1]); };
  CHECK_THROWS_AS(least_squares(p, Vector::Zero(2)), InvalidProblem);
}
