#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tmyag/constants.hpp"
#include "tmyag/error.hpp"
#include "tmyag/geometry.hpp"
#include "tmyag/zeeman.hpp"

using namespace tmyag;

namespace {

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string with_value(const std::string& key, double value) {
  auto doc = nlohmann::ordered_json::parse(write_constants(default_constants()));
  doc[key]["value"] = value;
  return doc.dump(2);
}

}  // namespace

TEST_CASE("default constants carry the published material values") {
  const auto c = load_constants("default");
  CHECK(c.rho == 4564);
  CHECK(c.v_l == 8600);
  CHECK(c.v_t == 5000);
  CHECK(c.nu0 == doctest::Approx(3.77868e14).epsilon(1e-15));
  CHECK(c.delta_CF0 == 8.3e11);
  CHECK(c.g_J_ground == doctest::Approx(7.0 / 6.0).epsilon(1e-15));
  CHECK(c.g_J_excited == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("Lande factors of the two multiplets") {
  CHECK(std::abs(lande_g(5, 1, 6) - 7.0 / 6.0) < 1e-12);
  CHECK(std::abs(lande_g(5, 1, 4) - 4.0 / 5.0) < 1e-12);
}

TEST_CASE("ground tensor is calibrated to 400 MHz/T along [111]") {
  const auto c = default_constants();
  for (int s : {1, 3, 5}) {
    const double g = effective_gamma(site_frame(s), lab::dir_111(), State::ground, c);
    CHECK(std::abs(g - 4.0e8) < 0.05 * 4.0e8);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(std::abs(c.gamma_J_ground[k]) > std::abs(c.gamma_J_excited[k]));
  }
}

TEST_CASE("shipped config file matches the compiled-in defaults") {
  const auto path = std::filesystem::path(TMYAG_SOURCE_DIR) / "data" / "constants_default.json";
  CHECK(load_constants(path.string()) == default_constants());
}

TEST_CASE("round trip through the config format") {
  const auto c = default_constants();
  CHECK(parse_constants(write_constants(c)) == c);

  auto tweaked = c;
  tweaked.rho = 4564.123456789012;
  tweaked.provenance["rho"] = "with \"quotes\", commas\nand newlines";
  CHECK(parse_constants(write_constants(tweaked)) == tweaked);
  CHECK(constants_hash(tweaked) != constants_hash(c));
}

TEST_CASE("invariant violations are reported by field") {
  try {
    parse_constants(with_value("v_l", 0));
    FAIL("expected InvariantViolation");
  } catch (const InvariantViolation& e) {
    CHECK(e.field() == "v_l");
    CHECK(e.got() == 0);
    CHECK(e.expected() == ">0");
    CHECK(e.name() == "InvariantViolation");
  }
  CHECK_THROWS_AS(parse_constants(with_value("g_J_ground", 1.2)), InvariantViolation);
  CHECK_THROWS_AS(parse_constants(with_value("delta_CF0", -1)), InvariantViolation);
  CHECK_THROWS_AS(parse_constants(with_value("nu0", 0)), InvariantViolation);
}

TEST_CASE("excited tensor larger than ground is rejected") {
  auto doc = nlohmann::ordered_json::parse(write_constants(default_constants()));
  doc["gamma_J_excited"]["value"][1] = -600e6;
  CHECK_THROWS_AS(parse_constants(doc.dump()), InvariantViolation);
}

TEST_CASE("scaled tensors pass structural validation only") {
  auto doc = nlohmann::ordered_json::parse(write_constants(default_constants()));
  for (auto key : {"gamma_J_ground", "gamma_J_excited"}) {
    for (auto& v : doc[key]["value"]) v = v.get<double>() * 2;
  }
  CHECK_THROWS_AS(parse_constants(doc.dump()), InvariantViolation);
  CHECK_NOTHROW(parse_constants(doc.dump(), Validation::structural));
}

TEST_CASE("missing fields and malformed documents") {
  auto doc = nlohmann::ordered_json::parse(write_constants(default_constants()));
  doc.erase("rho");
  CHECK_THROWS_AS(parse_constants(doc.dump()), MissingField);

  try {
    parse_constants("{\n  \"rho\": {\n    \"value\": 12,,\n  }\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(load_constants("/nonexistent/constants.json"), FileNotFound);
}
