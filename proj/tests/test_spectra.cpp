#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "tmyag/constants.hpp"
#include "tmyag/error.hpp"
#include "tmyag/geometry.hpp"
#include "tmyag/spectra.hpp"
#include "tmyag/zeeman.hpp"

using namespace tmyag;

namespace {

constexpr double kDeg = std::numbers::pi / 180;

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

Spectrum lorentz_spectrum(const std::vector<LineShape>& lines, double span, double step) {
  Spectrum s;
  s.detuning = uniform_grid(0, span, step);
  for (double x : s.detuning) {
    double a = 0;
    for (const auto& l : lines) a += l(x);
    s.alpha.push_back(a);
  }
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("Lorentzian shape") {
  const LineShape l{1e9, 17e9, 2.3};
  CHECK(l(1e9) == 2.3);
  CHECK(close(l(1e9 + 8.5e9), 1.15, 1e-14));
  CHECK(close(l.area(), std::numbers::pi / 2 * 2.3 * 17e9, 1e-15));
  const auto back = LineShape::from_area(1e9, 17e9, l.area());
  CHECK(close(back.peak_alpha, 2.3, 1e-15));
  CHECK(close(truncated_area(l, -1e15, 1e15), l.area(), 1e-4));
}

TEST_CASE("trapezoidal area approaches the truncated analytic area") {
  const LineShape l{0, 17e9, 2.3};
  const auto s = lorentz_spectrum({l}, 200e9, 50e6);
  CHECK(close(integrated_area(s), truncated_area(l, -100e9, 100e9), 1e-5));
}

TEST_CASE("grid validation") {
  const std::vector<double> two{0, 1};
  CHECK_THROWS_AS(validate_grid(two), InvalidGrid);
  const std::vector<double> uneven{0, 1, 3};
  CHECK_THROWS_AS(validate_grid(uneven), InvalidGrid);
  const std::vector<double> down{2, 1, 0};
  CHECK_THROWS_AS(validate_grid(down), InvalidGrid);
  const auto g = uniform_grid(0, 10, 1);
  CHECK(g.size() == 11);
  CHECK(g.front() == -5);
  CHECK(g.back() == 5);
  CHECK_NOTHROW(validate_grid(g));
}

TEST_CASE("transmission round trip") {
  const auto s = lorentz_spectrum({{0, 17e9, 2.3}}, 100e9, 1e9);
  const auto t = to_transmission(s.alpha, 0.5);
  CHECK(close(t[50], std::exp(-2.3 * 0.5), 1e-15));
  const auto a = from_transmission(t, 0.5);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(close(a[i], s.alpha[i], 1e-12));
}

TEST_CASE("zero-field synthesis is one line independent of polarization") {
  const auto c = default_constants();
  const auto grid = uniform_grid(0, 200e9, 250e6);
  const auto a = synthesize_spectrum({0, 0}, lab::dir_111(), grid, c);
  const auto b = synthesize_spectrum({0, 0}, lab::dir_m1m12(), grid, c);
  REQUIRE(a.lines.size() == 1);
  CHECK(a.lines[0].sites.size() == 6);
  CHECK(close(a.lines[0].weight, 2, 1e-12));
  CHECK(close(a.lines[0].line.peak_alpha, 2.3, 1e-12));
  CHECK(a.lines[0].line.fwhm == 17e9);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(close(a.spectrum.alpha[i], b.spectrum.alpha[i], 1e-12));
}

TEST_CASE("site weights sum to two for any polarization") {
  const auto c = default_constants();
  const auto grid = uniform_grid(0, 600e9, 1e9);
  for (double deg : {0.0, 17.0, 54.7356103172453, 90.0}) {
    for (const Vec3& e : {lab::dir_111(), lab::dir_m1m12(), Vec3(0.2, -0.4, 0.9)}) {
      const auto syn = synthesize_spectrum({6, deg * kDeg}, e, grid, c);
      double total = 0;
      for (const auto& l : syn.lines) total += l.weight;
      CHECK(close(total, 2, 1e-12));
    }
  }
}

TEST_CASE("orthogonal sites do not absorb") {
  const auto c = default_constants();
  const auto grid = uniform_grid(0, 600e9, 1e9);
  const auto syn = synthesize_spectrum({6, 0}, lab::dir_111(), grid, c);
  REQUIRE(syn.lines.size() == 2);
  for (const auto& l : syn.lines) {
    if (l.sites == SiteClass{2, 4, 6}) {
      CHECK(l.weight < 1e-24);
      CHECK(l.line.peak_alpha < 1e-20);
    } else {
      CHECK(close(l.weight, 2, 1e-12));
    }
  }
}

TEST_CASE("line position, width and strength at 6 T along [111]") {
  const auto c = default_constants();
  const auto grid = uniform_grid(0, 600e9, 1e9);
  const auto syn = synthesize_spectrum({6, 0}, lab::dir_111(), grid, c);
  const auto& main = syn.lines[0];
  CHECK(main.sites == SiteClass{1, 3, 5});
  CHECK(close(main.line.center, zeeman(site_frame(1), field_vector({6, 0}), c).optical_shift, 1e-12));
  CHECK(close(main.line.fwhm, 17e9 + broadening(6, 8e9, 2.7e10, c.delta_CF0), 1e-12));
  const double k0 = 2.3 * 17e9 * std::numbers::pi / 2 / 1e9;
  CHECK(close(main.line.area(), 2.3 * 17e9 * std::numbers::pi / 2 * (k0 - 1.3 * 36) / k0, 1e-12));
  CHECK_FALSE(syn.negative_linestrength);
}

TEST_CASE("noiseless single-line fit is exact") {
  const auto s = lorentz_spectrum({{0, 17e9, 2.3}}, 200e9, 250e6);
  const auto fit = fit_lorentzian(s, 1);
  REQUIRE(fit.lines.size() == 1);
  CHECK(std::abs(fit.lines[0].center) < 1e-6 * 17e9);
  CHECK(close(fit.lines[0].fwhm, 17e9, 1e-6));
  CHECK(close(fit.lines[0].peak_alpha, 2.3, 1e-6));
  CHECK_FALSE(fit.ambiguous);
}

TEST_CASE("fit with 1% noise keeps the width within 2%") {
  const auto clean = lorentz_spectrum({{0, 17e9, 2.3}}, 200e9, 250e6);
  std::vector<double> widths;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto s = clean;
    add_multiplicative_noise(s, 0.01, seed);
    CHECK(s.noise_sigma == 0.01);
    const auto fit = fit_lorentzian(s, 1);
    CHECK(close(fit.lines[0].fwhm, 17e9, 0.02));
    widths.push_back(fit.lines[0].fwhm);
  }
  CHECK(close(median(widths), 17e9, 0.005));
}

TEST_CASE("two well separated lines") {
  const std::vector<LineShape> truth{{-80e9, 20e9, 1.0}, {60e9, 25e9, 1.7}};
  const auto s = lorentz_spectrum(truth, 400e9, 500e6);
  const auto fit = fit_lorentzian(s, 2);
  REQUIRE(fit.lines.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(std::abs(fit.lines[k].center - truth[k].center) < 1e-6 * truth[k].fwhm);
    CHECK(close(fit.lines[k].fwhm, truth[k].fwhm, 1e-6));
    CHECK(close(fit.lines[k].peak_alpha, truth[k].peak_alpha, 1e-6));
  }
  CHECK_FALSE(fit.ambiguous);
}

TEST_CASE("unresolvable pair is flagged") {
  const std::vector<LineShape> truth{{-2e9, 17e9, 1.0}, {2e9, 17e9, 1.0}};
  const auto s = lorentz_spectrum(truth, 200e9, 250e6);
  std::vector<LineShape> init{{-3e9, 15e9, 0.9}, {3e9, 15e9, 0.9}};
  try {
    const auto fit = fit_lorentzian(s, 2, init);
    CHECK(fit.ambiguous);
  } catch (const Error& e) {
    // a degenerate pair may also end without a usable Jacobian
    CHECK(std::string(e.name()) == "SingularNormalEquations");
  }
}

TEST_CASE("fit input errors") {
  const auto s = lorentz_spectrum({{0, 17e9, 2.3}}, 200e9, 1e9);
  std::vector<LineShape> same{{0, 17e9, 1}, {0.1e9, 17e9, 1}};
  CHECK_THROWS_AS(fit_lorentzian(s, 2, same), DegenerateInit);
  const auto narrow = lorentz_spectrum({{0, 17e9, 2.3}}, 20e9, 1e9);
  CHECK_THROWS_AS(fit_lorentzian(narrow, 1), InvalidGrid);
}
