#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tmyag/constants.hpp"
#include "tmyag/fitting.hpp"
#include "tmyag/geometry.hpp"

namespace tmyag {

/// Lorentzian absorption line. `center` is the detuning from nu0 in Hz,
/// `fwhm` in Hz, `peak_alpha` in cm^-1.
struct LineShape {
  double center = 0;
  double fwhm = 1;
  double peak_alpha = 0;

  /// Integrated area pi/2 * peak * fwhm, in Hz cm^-1.
  double area() const;
  double operator()(double detuning) const;

  static LineShape from_area(double center, double fwhm, double area);
};

/// Area of `line` between detunings lo and hi (analytic arctangent).
double truncated_area(const LineShape& line, double lo, double hi);

struct Spectrum {
  std::vector<double> detuning;  // Hz, uniform and strictly increasing
  std::vector<double> alpha;     // cm^-1
  std::optional<double> noise_sigma;
};

/// Throws InvalidGrid unless the grid is uniform (1e-9 relative), strictly
/// increasing and has at least three points.
void validate_grid(std::span<const double> grid);
void validate(const Spectrum& s);

/// Points from center - span/2 to center + span/2 inclusive.
std::vector<double> uniform_grid(double center, double span, double step);

/// Trapezoidal integral of the absorption over the grid, Hz cm^-1.
double integrated_area(const Spectrum& s);

std::vector<double> to_transmission(std::span<const double> alpha, double length_cm);
std::vector<double> from_transmission(std::span<const double> transmission, double length_cm);

/// Zero-field line and field-dependence coefficients used for synthesis.
struct SpectrumSettings {
  LineShape zero_field{0.0, 17e9, 2.3};
  double gamma_CF = 8.0e9;              // Hz/T^2
  double Gamma_CF = 2.7e10;             // Hz
  double linestrength_coeff = -1.3;     // GHz cm^-1 T^-2
};

struct SynthesizedLine {
  SiteClass sites;
  /// Sum of |mu_hat . E_hat|^2 over the class.
  double weight = 0;
  LineShape line;
};

struct Synthesis {
  Spectrum spectrum;
  std::vector<SynthesizedLine> lines;
  bool negative_linestrength = false;
  bool beyond_perturbative = false;
};

/// Sum over equivalence classes of Lorentzians centred at the class shift,
/// with FWHM = zero-field FWHM + field broadening and area
///   zero-field area * weight / 2 * k(B) / k(0).
/// The weights of all six sites sum to 2 for any polarization, so the
/// zero-field spectrum is polarization independent.
Synthesis synthesize_spectrum(const FieldConfig& field, const Vec3& polarization,
                              std::span<const double> grid, const MaterialConstants& c,
                              const SpectrumSettings& settings = {});

/// alpha *= 1 + rel * N(0, 1), deterministic per seed; records noise_sigma.
void add_multiplicative_noise(Spectrum& s, double rel, std::uint64_t seed);

struct LorentzFit {
  std::vector<LineShape> lines;       // sorted by center
  std::vector<LineShape> std_errors;  // same order
  double residual_norm = 0;
  /// Some pair of lines sits closer than the two-peak resolvability limit
  /// (separation < mean FWHM / sqrt(3)) or their centers are >95% correlated.
  bool ambiguous = false;
  fitting::FitResult fit;
};

/// Least-squares fit of `n_lines` Lorentzians. Without `init` the starting
/// point comes from the strongest local maxima of the data.
LorentzFit fit_lorentzian(const Spectrum& s, int n_lines,
                          const std::optional<std::vector<LineShape>>& init = std::nullopt,
                          const fitting::FitOptions& opts = {});

}  // namespace tmyag
