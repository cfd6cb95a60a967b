#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

namespace tmyag {

/// Parameters of the spin-lattice rate law
///   R(B, T) = R0 + alpha_D gamma^2 B^4 T + (alpha + beta B^2) / (exp(h Dcf(B) / kT) - 1),
///   Dcf(B)  = delta_CF0 + gamma_CF B^2.
struct RelaxParams {
  double R0 = 0;         // Hz
  double alpha_D = 0;    // (Hz K T^2)^-1
  double alpha = 0;      // Hz
  double beta = 0;       // Hz / T^2
  double delta_CF0 = 0;  // Hz
  double gamma_CF = 0;   // Hz / T^2

  static constexpr std::size_t kCount = 6;
  static constexpr std::array<std::string_view, kCount> kNames = {
      "R0", "alpha_D", "alpha", "beta", "delta_CF0", "gamma_CF"};

  /// Values of the published two-dimensional fit for 0.1% Tm:YAG.
  static constexpr RelaxParams published() {
    return {9.5e-5, 1.2e-24, 3.0e4, 1.3e4, 8.3e11, 8.0e9};
  }

  std::array<double, kCount> to_array() const {
    return {R0, alpha_D, alpha, beta, delta_CF0, gamma_CF};
  }

  static RelaxParams from_array(const std::array<double, kCount>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }

  bool operator==(const RelaxParams&) const = default;
};

/// SI unit label of each parameter, in kNames order.
inline constexpr std::array<std::string_view, RelaxParams::kCount> kRelaxParamUnits = {
    "Hz", "1/(Hz K T^2)", "Hz", "Hz/T^2", "Hz", "Hz/T^2"};

/// Params file: {"schema": "tmyag-relax-params", "version": 1,
/// "<name>": {"value": v, "unit": u}, ...}. A bare number is accepted in
/// place of the {"value", "unit"} object.
RelaxParams parse_relax_params(std::string_view json_text);
RelaxParams load_relax_params(const std::filesystem::path& path);

/// Inverse of parse_relax_params; with `std_errors` each entry also carries
/// a "std_error" field.
std::string write_relax_params(const RelaxParams& p, const RelaxParams* std_errors = nullptr);

}  // namespace tmyag
