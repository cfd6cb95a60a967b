#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace tmyag {

namespace physics {
// CODATA 2018 exact / recommended values, SI.
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K
inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kBohrMagneton = 9.2740100783e-24;  // J/T
}  // namespace physics

/// Diagonal of a tensor expressed in a site's local (x, y, z) frame.
using Diagonal3 = std::array<double, 3>;

/// Physical constants and material parameters of Tm:YAG. Frequencies in Hz,
/// gyromagnetic ratios in Hz/T (frequency units), everything else SI.
struct MaterialConstants {
  double g_J_ground = 0;
  double g_J_excited = 0;
  double A_J_ground = 0;   // Hz, signed
  double A_J_excited = 0;  // Hz, signed
  double gamma_n = 0;      // Hz/T, signed
  Diagonal3 gamma_J_ground{};
  Diagonal3 gamma_J_excited{};
  double delta_CF0 = 0;  // Hz
  double nu0 = 0;        // Hz
  double rho = 0;        // kg/m^3
  double v_l = 0;        // m/s
  double v_t = 0;        // m/s
  double k_B = physics::kBoltzmann;
  double h = physics::kPlanck;
  double mu_B = physics::kBohrMagneton;

  /// Free-text provenance note per field name.
  std::map<std::string, std::string> provenance;

  bool operator==(const MaterialConstants&) const = default;
};

enum class Validation {
  /// Every invariant, including the calibration of the ground-state tensor
  /// against the 400 MHz/T splitting along [111].
  full,
  /// Signs, positivity, Lande factors and ground/excited ordering only. Used
  /// for sensitivity runs with deliberately perturbed tensors.
  structural,
};

/// Lande g factor of an (L, S, J) multiplet.
double lande_g(double L, double S, double J);

/// Compiled-in default set (mirrors data/constants_default.json).
MaterialConstants default_constants();

/// Throws InvariantViolation naming the first failed invariant.
void validate(const MaterialConstants& c, Validation level = Validation::full);

/// `source` is a path to a JSON config or the literal "default".
MaterialConstants load_constants(const std::string& source, Validation level = Validation::full);

MaterialConstants parse_constants(std::string_view json_text, Validation level = Validation::full);

/// Serialises to the config schema; parse_constants(write_constants(c)) == c.
std::string write_constants(const MaterialConstants& c);

/// FNV-1a hash of the canonical serialisation, as 16 hex digits.
std::string constants_hash(const MaterialConstants& c);

}  // namespace tmyag
