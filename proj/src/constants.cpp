#include "tmyag/constants.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tmyag/error.hpp"
#include "tmyag/geometry.hpp"

namespace tmyag {

namespace {

using nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;
constexpr double kLandeTolerance = 1e-12;
constexpr double kSplitting111 = 4.0e8;  // Hz/T, sites 1/3/5 ground state
constexpr double kSplitting111Tolerance = 0.05;

struct ScalarField {
  const char* name;
  const char* unit;
  double MaterialConstants::*member;
};

struct TensorField {
  const char* name;
  const char* unit;
  Diagonal3 MaterialConstants::*member;
};

constexpr ScalarField kScalars[] = {
    {"g_J_ground", "1", &MaterialConstants::g_J_ground},
    {"g_J_excited", "1", &MaterialConstants::g_J_excited},
    {"A_J_ground", "Hz", &MaterialConstants::A_J_ground},
    {"A_J_excited", "Hz", &MaterialConstants::A_J_excited},
    {"gamma_n", "Hz/T", &MaterialConstants::gamma_n},
    {"delta_CF0", "Hz", &MaterialConstants::delta_CF0},
    {"nu0", "Hz", &MaterialConstants::nu0},
    {"rho", "kg/m^3", &MaterialConstants::rho},
    {"v_l", "m/s", &MaterialConstants::v_l},
    {"v_t", "m/s", &MaterialConstants::v_t},
    {"k_B", "J/K", &MaterialConstants::k_B},
    {"h", "J s", &MaterialConstants::h},
    {"mu_B", "J/T", &MaterialConstants::mu_B},
};

constexpr TensorField kTensors[] = {
    {"gamma_J_ground", "Hz/T", &MaterialConstants::gamma_J_ground},
    {"gamma_J_excited", "Hz/T", &MaterialConstants::gamma_J_excited},
};

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void require_positive(const char* name, double v) {
  if (!(v > 0) || !std::isfinite(v)) throw InvariantViolation(name, v, ">0");
}

double ground_splitting_111(const MaterialConstants& c, int site) {
  const Vec3 local = local_field(site_frame(site), lab::dir_111());
  double sum = 0;
  for (int k = 0; k < 3; ++k) {
    const double term = c.gamma_J_ground[static_cast<std::size_t>(k)] * local[k];
    sum += term * term;
  }
  return std::sqrt(sum);
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

const ordered_json& entry(const ordered_json& doc, const char* name) {
  auto it = doc.find(name);
  if (it == doc.end()) throw MissingField(std::string("missing field '") + name + "'");
  if (!it->is_object() || !it->contains("value")) {
    throw MissingField(std::string("field '") + name + "' has no 'value'");
  }
  return *it;
}

double number(const ordered_json& v, const std::string& what) {
  if (!v.is_number()) throw MissingField("field '" + what + "' must be a number");
  return v.get<double>();
}

}  // namespace

double lande_g(double L, double S, double J) {
  const double jj = J * (J + 1);
  return 1.0 + (jj + S * (S + 1) - L * (L + 1)) / (2.0 * jj);
}

MaterialConstants default_constants() {
  MaterialConstants c;
  c.g_J_ground = 7.0 / 6.0;
  c.g_J_excited = 4.0 / 5.0;
  c.A_J_ground = -585e6;
  c.A_J_excited = -500e6;
  c.gamma_n = -3.53e6;
  c.gamma_J_ground = {-10e6, -490e6, -10e6};
  c.gamma_J_excited = {-5e6, -50e6, -5e6};
  c.delta_CF0 = 8.3e11;
  c.nu0 = 3.77868e14;
  c.rho = 4564;
  c.v_l = 8600;
  c.v_t = 5000;

  auto& p = c.provenance;
  p["g_J_ground"] = "Lande formula, 3H6 (L=5, S=1, J=6)";
  p["g_J_excited"] = "Lande formula, 3H4 (L=5, S=1, J=4)";
  p["A_J_ground"] =
      "effective value; free-ion literature value is about -393.5 MHz, rescaled so that the "
      "quadratic shift and the 400 MHz/T splitting along [111] are reproduced together";
  p["A_J_excited"] = "effective value, same calibration as A_J_ground";
  p["gamma_n"] = "169Tm bare nuclear gyromagnetic ratio (mu = -0.2316 mu_N, I = 1/2)";
  p["gamma_J_ground"] =
      "local (x, y, z), y = dipole axis; dominant y component chosen so sites 1/3/5 split at "
      "400 MHz/T for B || [111]. Small x/z components leave a residual sites 2/4/6 shift of "
      "0.074 GHz/T^2 at B || [111] (approximately, not exactly, zero)";
  p["gamma_J_excited"] = "about ten times smaller than the ground-state tensor";
  p["delta_CF0"] = "lowest 3H6 crystal-field splitting, 0.83 THz from the relaxation fit";
  p["nu0"] = "zero-field 3H6(1) -> 3H4(1) line center, 377 868 GHz";
  p["rho"] = "YAG density";
  p["v_l"] = "YAG longitudinal acoustic velocity";
  p["v_t"] = "YAG transverse acoustic velocity";
  p["k_B"] = "CODATA 2018 (exact)";
  p["h"] = "CODATA 2018 (exact)";
  p["mu_B"] = "CODATA 2018";
  return c;
}

void validate(const MaterialConstants& c, Validation level) {
  if (std::abs(c.g_J_ground - lande_g(5, 1, 6)) > kLandeTolerance) {
    throw InvariantViolation("g_J_ground", c.g_J_ground, "7/6 (Lande, L=5 S=1 J=6)");
  }
  if (std::abs(c.g_J_excited - lande_g(5, 1, 4)) > kLandeTolerance) {
    throw InvariantViolation("g_J_excited", c.g_J_excited, "4/5 (Lande, L=5 S=1 J=4)");
  }
  require_positive("rho", c.rho);
  require_positive("v_l", c.v_l);
  require_positive("v_t", c.v_t);
  require_positive("delta_CF0", c.delta_CF0);
  require_positive("nu0", c.nu0);
  require_positive("k_B", c.k_B);
  require_positive("h", c.h);
  require_positive("mu_B", c.mu_B);
  if (c.A_J_ground == 0 || !std::isfinite(c.A_J_ground)) {
    throw InvariantViolation("A_J_ground", c.A_J_ground, "nonzero");
  }
  if (c.A_J_excited == 0 || !std::isfinite(c.A_J_excited)) {
    throw InvariantViolation("A_J_excited", c.A_J_excited, "nonzero");
  }
  static const char* axis[] = {"x", "y", "z"};
  for (std::size_t k = 0; k < 3; ++k) {
    const double g = std::abs(c.gamma_J_ground[k]);
    const double e = std::abs(c.gamma_J_excited[k]);
    if (!(g > e)) {
      throw InvariantViolation(std::string("gamma_J_ground.") + axis[k], c.gamma_J_ground[k],
                               "|value| > |gamma_J_excited." + std::string(axis[k]) +
                                   "| = " + format_g(e));
    }
  }
  if (level == Validation::structural) return;

  for (int site : {1, 3, 5}) {
    const double s = ground_splitting_111(c, site);
    if (std::abs(s - kSplitting111) > kSplitting111Tolerance * kSplitting111) {
      throw InvariantViolation("gamma_J_ground splitting along [111], site " + std::to_string(site),
                               s, "4.0e8 Hz/T within 5%");
    }
  }
}

MaterialConstants parse_constants(std::string_view json_text, Validation level) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), line_of(json_text, e.byte));
  }
  if (!doc.is_object()) throw ParseError("constants document must be a JSON object", 1);

  MaterialConstants c;
  for (const auto& f : kScalars) {
    const auto& e = entry(doc, f.name);
    c.*f.member = number(e["value"], f.name);
    if (e.contains("provenance")) c.provenance[f.name] = e["provenance"].get<std::string>();
  }
  for (const auto& f : kTensors) {
    const auto& e = entry(doc, f.name);
    const auto& v = e["value"];
    if (!v.is_array() || v.size() != 3) {
      throw MissingField(std::string("field '") + f.name + "' must be a 3-element array");
    }
    for (std::size_t k = 0; k < 3; ++k) {
      (c.*f.member)[k] = number(v[k], std::string(f.name) + "[" + std::to_string(k) + "]");
    }
    if (e.contains("provenance")) c.provenance[f.name] = e["provenance"].get<std::string>();
  }
  validate(c, level);
  return c;
}

MaterialConstants load_constants(const std::string& source, Validation level) {
  if (source == "default") {
    auto c = default_constants();
    validate(c, level);
    return c;
  }
  std::ifstream in(source);
  if (!in) throw FileNotFound("cannot open constants file '" + source + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_constants(buf.str(), level);
}

std::string write_constants(const MaterialConstants& c) {
  ordered_json doc;
  doc["schema"] = "tmyag-constants";
  doc["version"] = kSchemaVersion;
  auto put = [&](const char* name, const char* unit, ordered_json value) {
    ordered_json e;
    e["value"] = std::move(value);
    e["unit"] = unit;
    auto it = c.provenance.find(name);
    if (it != c.provenance.end()) e["provenance"] = it->second;
    doc[name] = std::move(e);
  };
  for (const auto& f : kScalars) put(f.name, f.unit, c.*f.member);
  for (const auto& f : kTensors) {
    const auto& t = c.*f.member;
    put(f.name, f.unit, ordered_json::array({t[0], t[1], t[2]}));
  }
  return doc.dump(2) + "\n";
}

std::string constants_hash(const MaterialConstants& c) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char ch : write_constants(c)) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace tmyag
