#include "tmyag/relaxation.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "tmyag/error.hpp"
#include "tmyag/zeeman.hpp"

namespace tmyag {

namespace {

using physics::kBoltzmann;
using physics::kPlanck;

constexpr double kModeledGamma = 1e8;  // Hz/T

void check_temperature(double temp) {
  if (!(temp > 0)) throw NonpositiveTemperature("temperature must be positive");
}

}  // namespace

RateTerms rate_terms(double b, double temp, double gamma, const RelaxParams& p) {
  check_temperature(temp);
  RateTerms t;
  const double b2 = b * b;
  t.residual = p.R0;
  t.direct = p.alpha_D * gamma * gamma * b2 * b2 * temp;
  const double x = kPlanck * crystal_field_splitting(b, p) / (kBoltzmann * temp);
  t.orbach = (p.alpha + p.beta * b2) / std::expm1(x);
  t.direct_validity_warning = kPlanck * std::abs(gamma * b) > 0.1 * kBoltzmann * temp;
  return t;
}

double rate(double b, double temp, double gamma, const RelaxParams& p) {
  return rate_terms(b, temp, gamma, p).total();
}

std::array<double, RelaxParams::kCount> rate_gradient(double b, double temp, double gamma,
                                                      const RelaxParams& p) {
  check_temperature(temp);
  const double b2 = b * b;
  const double kappa = kPlanck / (kBoltzmann * temp);
  const double x = kappa * crystal_field_splitting(b, p);
  const double em1 = std::expm1(x);
  const double prefactor = p.alpha + p.beta * b2;
  // d/dx [1 / (e^x - 1)] = -e^x / (e^x - 1)^2
  const double d_orbach_dx = -prefactor * (em1 + 1) / (em1 * em1);
  return {
      1.0,
      gamma * gamma * b2 * b2 * temp,
      1.0 / em1,
      b2 / em1,
      d_orbach_dx * kappa,
      d_orbach_dx * kappa * b2,
  };
}

double bleaney_alpha_d(double gamma, double rho, double v_l, double v_t) {
  if (!(gamma > 0) || !(rho > 0) || !(v_l > 0) || !(v_t > 0)) {
    throw NonpositiveInput("Bleaney estimate needs positive gamma, density and velocities");
  }
  const double v = (v_l + 2 * v_t) / 3;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return 24 * pi2 * kBoltzmann * gamma * gamma / (rho * std::pow(v, 5));
}

const char* to_string(Process p) {
  switch (p) {
    case Process::residual:
      return "residual";
    case Process::direct:
      return "direct";
    case Process::orbach:
      return "orbach";
  }
  return "?";
}

Process dominant_process(const RateTerms& t) {
  if (t.direct >= t.residual && t.direct >= t.orbach) return Process::direct;
  if (t.orbach >= t.residual && t.orbach >= t.direct) return Process::orbach;
  return Process::residual;
}

std::vector<DominanceCell> dominance_map(std::span<const double> fields, std::span<const double> temps,
                                         double gamma, const RelaxParams& p) {
  std::vector<DominanceCell> cells;
  cells.reserve(fields.size() * temps.size());
  for (double b : fields) {
    for (double temp : temps) {
      DominanceCell c;
      c.b = b;
      c.temp = temp;
      c.terms = rate_terms(b, temp, gamma, p);
      c.process = dominant_process(c.terms);
      cells.push_back(c);
    }
  }
  return cells;
}

bool relaxation_modeled(const SiteFrame& site, const Vec3& b_lab, const MaterialConstants& c) {
  if (b_lab.norm() == 0) return true;
  return effective_gamma(site, b_lab, State::ground, c) >= kModeledGamma;
}

std::vector<double> decay_times(double rate_hz, std::size_t count, double half_lives) {
  if (!(rate_hz > 0)) throw NonpositiveInput("decay rate must be positive");
  std::vector<double> t(count);
  const double span = half_lives * std::numbers::ln2 / rate_hz;
  for (std::size_t i = 0; i < count; ++i) {
    t[i] = count > 1 ? span * static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
  }
  return t;
}

HoleDecay simulate_hole_decay(double rate_hz, std::span<const double> times, double amplitude,
                              double noise, std::uint64_t seed) {
  if (!(rate_hz > 0)) throw NonpositiveInput("decay rate must be positive");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0 || (i > 0 && !(times[i] > times[i - 1]))) {
      throw InvalidDataset("hole-decay times must be nonnegative and increasing");
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  HoleDecay out;
  out.times.assign(times.begin(), times.end());
  out.areas.reserve(times.size());
  for (double t : times) {
    const double clean = amplitude * std::exp(-rate_hz * t);
    out.areas.push_back(noise > 0 ? clean * (1 + noise * gauss(rng)) : clean);
  }
  return out;
}

T1Estimate extract_T1(const HoleDecay& series) {
  const std::size_t n = series.times.size();
  if (n < 4 || series.areas.size() != n) {
    throw InvalidDataset("T1 extraction needs at least 4 (time, area) points");
  }
  for (double a : series.areas) {
    if (!(a > 0)) throw InvalidDataset("hole areas must be positive");
  }

  // log-linear regression for the starting point
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = series.times[i], y = std::log(series.areas[i]);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double dn = static_cast<double>(n);
  const double denom = dn * stt - st * st;
  if (!(denom > 0)) throw InvalidDataset("hole-decay times must not all coincide");
  const double slope = (dn * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / dn;
  const double rate0 = -slope;
  if (!(rate0 > 0)) throw NonPositiveRateEstimate("hole area does not decay");
  const double amp0 = std::exp(intercept);

  fitting::FitProblem problem;
  problem.description = "single-exponential hole decay";
  problem.parameters = {{"amplitude", 0.0, std::numeric_limits<double>::infinity(), amp0},
                        {"rate", 0.0, std::numeric_limits<double>::infinity(), rate0}};
  problem.residual_count = n;
  problem.residuals = [&series, n](const fitting::Vector& p) {
    fitting::Vector r(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      r[static_cast<Eigen::Index>(i)] = p[0] * std::exp(-p[1] * series.times[i]) / series.areas[i] - 1;
    }
    return r;
  };
  problem.jacobian = [&series, n](const fitting::Vector& p) {
    fitting::Matrix j(static_cast<Eigen::Index>(n), 2);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      const double e = std::exp(-p[1] * series.times[i]) / series.areas[i];
      j(row, 0) = e;
      j(row, 1) = -p[0] * series.times[i] * e;
    }
    return j;
  };

  fitting::FitOptions opts;
  opts.scale_covariance = true;
  fitting::Vector init(2);
  init << amp0, rate0;

  T1Estimate est;
  est.fit = fitting::least_squares(problem, init, opts);
  est.amplitude = est.fit.params[0];
  est.rate = est.fit.params[1];
  if (!(est.rate > 0)) throw NonPositiveRateEstimate("fitted decay rate is not positive");
  est.T1 = 1 / est.rate;
  est.sigma_T1 = est.fit.std_errors[1] / (est.rate * est.rate);
  est.relative_residual_rms = est.fit.residual_norm / std::sqrt(dn);
  return est;
}

}  // namespace tmyag
