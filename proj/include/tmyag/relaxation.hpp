#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tmyag/constants.hpp"
#include "tmyag/fitting.hpp"
#include "tmyag/geometry.hpp"
#include "tmyag/relax_params.hpp"

namespace tmyag {

/// The three contributions to the spin-lattice rate, in Hz.
struct RateTerms {
  double residual = 0;
  double direct = 0;
  double orbach = 0;
  /// h gamma B > 0.1 k_B T: the high-temperature direct-process form is
  /// outside its validity range.
  bool direct_validity_warning = false;

  double total() const { return residual + direct + orbach; }
};

/// Rate-law terms at field `b` (T), temperature `temp` (K), effective
/// ground-state gamma along the field (Hz/T). The Orbach exponent is
/// h Dcf(B) / (k_B T) because Dcf is stored in Hz.
RateTerms rate_terms(double b, double temp, double gamma, const RelaxParams& p);

double rate(double b, double temp, double gamma, const RelaxParams& p);

/// d rate / d (R0, alpha_D, alpha, beta, delta_CF0, gamma_CF).
std::array<double, RelaxParams::kCount> rate_gradient(double b, double temp, double gamma,
                                                      const RelaxParams& p);

/// Order-of-magnitude direct-process coefficient 24 pi^2 k_B gamma^2 / (rho v^5)
/// with v = (v_l + 2 v_t) / 3.
double bleaney_alpha_d(double gamma, double rho, double v_l, double v_t);

enum class Process { residual, direct, orbach };

const char* to_string(Process p);

/// Largest of the three terms.
Process dominant_process(const RateTerms& t);

struct DominanceCell {
  double b = 0;
  double temp = 0;
  Process process = Process::residual;
  RateTerms terms;
};

/// Row-major over (b, temp): index = i_b * temps.size() + i_t.
std::vector<DominanceCell> dominance_map(std::span<const double> fields, std::span<const double> temps,
                                         double gamma, const RelaxParams& p);

/// Whether the phonon rate law describes the site in this field. Sites whose
/// ground-state splitting along the field is below 100 MHz/T (site 2 for
/// B || [111]) relax through mechanisms the model does not include.
bool relaxation_modeled(const SiteFrame& site, const Vec3& b_lab, const MaterialConstants& c);

struct HoleDecay {
  std::vector<double> times;  // s
  std::vector<double> areas;  // arbitrary units
};

/// A(t) = A0 exp(-R t) (1 + noise * N(0, 1)); deterministic per seed.
HoleDecay simulate_hole_decay(double rate_hz, std::span<const double> times, double amplitude,
                              double noise, std::uint64_t seed);

/// `count` times evenly spaced over `half_lives` half-lives, starting at 0.
std::vector<double> decay_times(double rate_hz, std::size_t count, double half_lives);

struct T1Estimate {
  double T1 = 0;        // s
  double sigma_T1 = 0;  // s
  double rate = 0;      // Hz
  double amplitude = 0;
  /// RMS of the relative residuals; structure beyond noise suggests the decay
  /// is not single-exponential.
  double relative_residual_rms = 0;
  fitting::FitResult fit;
};

/// Single-exponential fit with relative weights, initialised by a log-linear
/// regression.
T1Estimate extract_T1(const HoleDecay& series);

}  // namespace tmyag
