#include "tmyag/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tmyag/error.hpp"
#include "tmyag/zeeman.hpp"

namespace tmyag {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTotalWeight = 2.0;

double half_width(const LineShape& l) { return 0.5 * l.fwhm; }

}  // namespace

double LineShape::area() const { return 0.5 * kPi * peak_alpha * fwhm; }

double LineShape::operator()(double detuning) const {
  const double x = (detuning - center) / half_width(*this);
  return peak_alpha / (1 + x * x);
}

LineShape LineShape::from_area(double center, double fwhm, double area) {
  return {center, fwhm, 2 * area / (kPi * fwhm)};
}

double truncated_area(const LineShape& line, double lo, double hi) {
  const double g = half_width(line);
  return line.area() / kPi * (std::atan((hi - line.center) / g) - std::atan((lo - line.center) / g));
}

void validate_grid(std::span<const double> grid) {
  if (grid.size() < 3) throw InvalidGrid("grid needs at least three points");
  const double step = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  if (!(step > 0) || !std::isfinite(step)) throw InvalidGrid("grid must be strictly increasing");
  const double scale = std::max({std::abs(grid.front()), std::abs(grid.back()), step});
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double d = grid[i] - grid[i - 1];
    if (!(d > 0)) throw InvalidGrid("grid must be strictly increasing");
    const double expected = grid.front() + step * static_cast<double>(i);
    if (std::abs(grid[i] - expected) > 1e-9 * scale) throw InvalidGrid("grid is not uniform");
  }
}

void validate(const Spectrum& s) {
  validate_grid(s.detuning);
  if (s.alpha.size() != s.detuning.size()) throw InvalidGrid("grid and values differ in length");
  for (double a : s.alpha) {
    if (!std::isfinite(a)) throw InvalidGrid("spectrum values must be finite");
  }
}

std::vector<double> uniform_grid(double center, double span, double step) {
  if (!(span > 0) || !(step > 0)) throw InvalidGrid("grid span and step must be positive");
  const auto n = static_cast<std::size_t>(std::llround(span / step)) + 1;
  if (n < 3) throw InvalidGrid("grid needs at least three points");
  std::vector<double> g(n);
  const double mid = 0.5 * static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = center + (static_cast<double>(i) - mid) * step;
  return g;
}

double integrated_area(const Spectrum& s) {
  double sum = 0;
  for (std::size_t i = 1; i < s.detuning.size(); ++i) {
    sum += 0.5 * (s.alpha[i] + s.alpha[i - 1]) * (s.detuning[i] - s.detuning[i - 1]);
  }
  return sum;
}

std::vector<double> to_transmission(std::span<const double> alpha, double length_cm) {
  std::vector<double> t(alpha.size());
  std::transform(alpha.begin(), alpha.end(), t.begin(),
                 [length_cm](double a) { return std::exp(-a * length_cm); });
  return t;
}

std::vector<double> from_transmission(std::span<const double> transmission, double length_cm) {
  if (!(length_cm > 0)) throw NonpositiveInput("crystal length must be positive");
  std::vector<double> a(transmission.size());
  std::transform(transmission.begin(), transmission.end(), a.begin(), [length_cm](double t) {
    if (!(t > 0)) throw InvalidDataset("transmission must be positive");
    return -std::log(t) / length_cm;
  });
  return a;
}

Synthesis synthesize_spectrum(const FieldConfig& field, const Vec3& polarization,
                              std::span<const double> grid, const MaterialConstants& c,
                              const SpectrumSettings& settings) {
  validate_grid(grid);
  const Vec3 b = field_vector(field);
  const LineShape& zf = settings.zero_field;

  Synthesis out;
  const double k0 = zf.area() / 1e9;  // GHz cm^-1
  const auto k = linestrength(field.magnitude, k0, settings.linestrength_coeff);
  out.negative_linestrength = k.negative;
  const double strength_ratio = k0 != 0 ? k.value / k0 : 1.0;
  const double fwhm =
      zf.fwhm + broadening(field.magnitude, settings.gamma_CF, settings.Gamma_CF, c.delta_CF0);

  Partition classes;
  if (b.norm() > 0) {
    classes = equivalence_classes(b);
  } else {
    classes = {{1, 2, 3, 4, 5, 6}};
  }

  for (auto& cls : classes) {
    SynthesizedLine line;
    for (int s : cls) {
      const double proj = dipole_projection(site_frame(s), polarization);
      line.weight += proj * proj;
    }
    const auto z = zeeman(site_frame(cls.front()), b, c);
    out.beyond_perturbative = out.beyond_perturbative || z.beyond_perturbative;
    const double area = zf.area() * line.weight / kTotalWeight * strength_ratio;
    line.line = LineShape::from_area(zf.center + z.optical_shift, fwhm, area);
    line.sites = std::move(cls);
    out.lines.push_back(std::move(line));
  }

  out.spectrum.detuning.assign(grid.begin(), grid.end());
  out.spectrum.alpha.assign(grid.size(), 0.0);
  for (const auto& l : out.lines) {
    if (l.weight == 0) continue;
    for (std::size_t i = 0; i < grid.size(); ++i) out.spectrum.alpha[i] += l.line(grid[i]);
  }
  return out;
}

void add_multiplicative_noise(Spectrum& s, double rel, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& a : s.alpha) a *= 1 + rel * gauss(rng);
  s.noise_sigma = rel;
}

namespace {

double estimate_fwhm(const Spectrum& s, std::size_t peak) {
  const double half = 0.5 * s.alpha[peak];
  auto crossing = [&](int dir) {
    auto i = static_cast<std::ptrdiff_t>(peak);
    const auto n = static_cast<std::ptrdiff_t>(s.alpha.size());
    while (i + dir >= 0 && i + dir < n && s.alpha[static_cast<std::size_t>(i + dir)] > half) i += dir;
    if (i + dir < 0 || i + dir >= n) return s.detuning[static_cast<std::size_t>(i)];
    const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(i + dir);
    const double f = (s.alpha[a] - half) / (s.alpha[a] - s.alpha[b]);
    return s.detuning[a] + f * (s.detuning[b] - s.detuning[a]);
  };
  const double step = s.detuning[1] - s.detuning[0];
  return std::max(crossing(1) - crossing(-1), 2 * step);
}

std::vector<LineShape> auto_init(const Spectrum& s, int n_lines) {
  std::vector<std::size_t> maxima;
  for (std::size_t i = 0; i < s.alpha.size(); ++i) {
    const bool left = i == 0 || s.alpha[i] >= s.alpha[i - 1];
    const bool right = i + 1 == s.alpha.size() || s.alpha[i] > s.alpha[i + 1];
    if (left && right && s.alpha[i] > 0) maxima.push_back(i);
  }
  if (maxima.empty()) {
    maxima.push_back(static_cast<std::size_t>(
        std::max_element(s.alpha.begin(), s.alpha.end()) - s.alpha.begin()));
  }
  std::stable_sort(maxima.begin(), maxima.end(),
                   [&](std::size_t a, std::size_t b) { return s.alpha[a] > s.alpha[b]; });

  const std::size_t strongest = maxima.front();
  const double width = estimate_fwhm(s, strongest);
  std::vector<LineShape> init;
  for (std::size_t k = 0; k < maxima.size() && init.size() < static_cast<std::size_t>(n_lines); ++k) {
    init.push_back({s.detuning[maxima[k]], width, s.alpha[maxima[k]]});
  }
  // Fewer maxima than lines: split the strongest peak symmetrically.
  for (int extra = 1; init.size() < static_cast<std::size_t>(n_lines); ++extra) {
    const double offset = 0.25 * width * ((extra + 1) / 2) * (extra % 2 ? 1 : -1);
    init.push_back({s.detuning[strongest] + offset, width, 0.5 * s.alpha[strongest]});
  }
  return init;
}

}  // namespace

LorentzFit fit_lorentzian(const Spectrum& s, int n_lines, const std::optional<std::vector<LineShape>>& init,
                          const fitting::FitOptions& opts) {
  validate(s);
  if (n_lines < 1) throw InvalidProblem("need at least one line");
  const double step = s.detuning[1] - s.detuning[0];
  const double span = s.detuning.back() - s.detuning.front();

  std::vector<LineShape> start = init ? *init : auto_init(s, n_lines);
  if (start.size() != static_cast<std::size_t>(n_lines)) {
    throw InvalidProblem("initial guess has " + std::to_string(start.size()) + " lines, expected " +
                         std::to_string(n_lines));
  }
  for (std::size_t i = 0; i < start.size(); ++i) {
    if (!(start[i].fwhm > 0)) throw InvalidProblem("initial FWHM must be positive");
    for (std::size_t j = i + 1; j < start.size(); ++j) {
      if (std::abs(start[i].center - start[j].center) < step) {
        throw DegenerateInit("initial centers of lines " + std::to_string(i) + " and " +
                             std::to_string(j) + " are closer than the grid step");
      }
    }
  }
  const double widest = std::max_element(start.begin(), start.end(), [](auto& a, auto& b) {
                          return a.fwhm < b.fwhm;
                        })->fwhm;
  if (span < 2 * widest) throw InvalidGrid("grid must span at least twice the widest FWHM");

  const double peak_scale =
      std::max(*std::max_element(s.alpha.begin(), s.alpha.end()), 1e-12);
  const auto inf = std::numeric_limits<double>::infinity();

  fitting::FitProblem problem;
  problem.description = std::to_string(n_lines) + "-line Lorentzian fit";
  for (int k = 0; k < n_lines; ++k) {
    const auto& l = start[static_cast<std::size_t>(k)];
    const std::string tag = std::to_string(k);
    problem.parameters.push_back(
        {"center" + tag, s.detuning.front() - span, s.detuning.back() + span, l.fwhm});
    problem.parameters.push_back({"fwhm" + tag, 0.1 * step, 10 * span, l.fwhm});
    problem.parameters.push_back({"peak" + tag, 0.0, inf, std::max(l.peak_alpha, 1e-3 * peak_scale)});
  }
  problem.residual_count = s.alpha.size();
  problem.residuals = [&s, n_lines](const fitting::Vector& p) {
    fitting::Vector r(static_cast<Eigen::Index>(s.alpha.size()));
    for (std::size_t i = 0; i < s.alpha.size(); ++i) {
      double model = 0;
      for (int k = 0; k < n_lines; ++k) {
        model += LineShape{p[3 * k], p[3 * k + 1], p[3 * k + 2]}(s.detuning[i]);
      }
      r[static_cast<Eigen::Index>(i)] = model - s.alpha[i];
    }
    return r;
  };
  problem.jacobian = [&s, n_lines](const fitting::Vector& p) {
    fitting::Matrix j(static_cast<Eigen::Index>(s.alpha.size()), 3 * n_lines);
    for (std::size_t i = 0; i < s.alpha.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      for (int k = 0; k < n_lines; ++k) {
        const double c = p[3 * k], w = p[3 * k + 1], a = p[3 * k + 2];
        const double x = 2 * (s.detuning[i] - c) / w;
        const double d = 1 + x * x;
        j(row, 3 * k) = a * 2 * x / (d * d) * 2 / w;
        j(row, 3 * k + 1) = a * 2 * x * x / (d * d) / w;
        j(row, 3 * k + 2) = 1 / d;
      }
    }
    return j;
  };

  fitting::Vector x0(3 * n_lines);
  for (int k = 0; k < n_lines; ++k) {
    const auto& l = start[static_cast<std::size_t>(k)];
    x0[3 * k] = l.center;
    x0[3 * k + 1] = l.fwhm;
    x0[3 * k + 2] = l.peak_alpha;
  }

  // Unit weights, so the covariance is rescaled by the reduced chi-square.
  fitting::FitOptions o = opts;
  o.scale_covariance = true;

  LorentzFit out;
  out.fit = fitting::least_squares(problem, x0, o);
  const auto& p = out.fit.params;
  const auto& e = out.fit.std_errors;

  std::vector<int> order(static_cast<std::size_t>(n_lines));
  for (int k = 0; k < n_lines; ++k) order[static_cast<std::size_t>(k)] = k;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p[3 * a] < p[3 * b]; });
  for (int k : order) {
    out.lines.push_back({p[3 * k], p[3 * k + 1], p[3 * k + 2]});
    out.std_errors.push_back({e[3 * k], e[3 * k + 1], e[3 * k + 2]});
  }
  out.residual_norm = out.fit.residual_norm;

  const auto& cov = out.fit.covariance;
  for (int a = 0; a < n_lines; ++a) {
    for (int b = a + 1; b < n_lines; ++b) {
      const double sep = std::abs(p[3 * a] - p[3 * b]);
      const double mean_fwhm = 0.5 * (p[3 * a + 1] + p[3 * b + 1]);
      const double denom = std::sqrt(cov(3 * a, 3 * a) * cov(3 * b, 3 * b));
      const double corr = denom > 0 ? cov(3 * a, 3 * b) / denom : 0.0;
      if (sep < mean_fwhm / std::sqrt(3.0) || std::abs(corr) > 0.95) out.ambiguous = true;
    }
  }
  return out;
}

}  // namespace tmyag
