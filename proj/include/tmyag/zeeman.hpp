#pragma once

#include <span>
#include <vector>

#include "tmyag/constants.hpp"
#include "tmyag/geometry.hpp"
#include "tmyag/relax_params.hpp"

namespace tmyag {

enum class State { ground, excited };

/// Enhanced nuclear Zeeman splitting |(gx Bx, gy By, gz Bz)| of the
/// spin-1/2 level, in Hz.
double hyperfine_splitting(const SiteFrame& site, const Vec3& b_lab, State state,
                           const MaterialConstants& c);

/// Splitting per tesla along `direction` (Hz/T); the gamma entering the
/// direct-phonon term of the rate law.
double effective_gamma(const SiteFrame& site, const Vec3& direction, State state,
                       const MaterialConstants& c);

/// Quadratic Zeeman displacement D_J / h in Hz:
///   g_J mu_B / (2 h A_J) * sum_a (gamma_J,a - gamma_n) B_a^2
/// with A_J in Hz and local field components B_a.
double quadratic_displacement(const SiteFrame& site, const Vec3& b_lab, State state,
                              const MaterialConstants& c);

struct ZeemanResult {
  int site_index = 0;
  double splitting_ground = 0;   // Hz
  double splitting_excited = 0;  // Hz
  double D_ground = 0;           // Hz
  double D_excited = 0;          // Hz
  double optical_shift = 0;      // Hz, D_ground - D_excited
  /// |shift| exceeds 10% of the zero-field crystal-field splitting; the
  /// quadratic model is outside its perturbative regime.
  bool beyond_perturbative = false;
};

ZeemanResult zeeman(const SiteFrame& site, const Vec3& b_lab, const MaterialConstants& c);

/// Optical shift per T^2 for a field along `direction` (any nonzero length).
double shift_coefficient(const SiteFrame& site, const Vec3& direction, const MaterialConstants& c);

struct ShiftCurvePoint {
  double theta = 0;  // rad
  SiteClass sites;   // equivalence class restricted to the requested sites
  double shift = 0;  // Hz
};

/// Optical shift of every equivalence class (restricted to `sites`) at each
/// scan angle, field magnitude `b` in T. At b = 0 all requested sites form a
/// single class with zero shift.
std::vector<ShiftCurvePoint> shift_curve(std::span<const int> sites, std::span<const double> thetas,
                                         double b, const MaterialConstants& c);

/// Field-induced inhomogeneous broadening gamma_CF Gamma_CF / delta_CF * B^2 (Hz).
double broadening(double b, double gamma_CF, double Gamma_CF, double delta_CF);

/// delta_CF0 + gamma_CF B^2 (Hz).
double crystal_field_splitting(double b, const RelaxParams& p);

struct Linestrength {
  double value = 0;  // GHz cm^-1
  bool negative = false;
};

/// k0 + c B^2 in GHz cm^-1; negative values are flagged, not clamped.
Linestrength linestrength(double b, double k0, double c);

}  // namespace tmyag
