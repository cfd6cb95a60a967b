#include "tmyag/relax_params.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tmyag/error.hpp"

namespace tmyag {

using nlohmann::ordered_json;

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

RelaxParams parse_relax_params(std::string_view json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), line_of(json_text, e.byte));
  }
  if (!doc.is_object()) throw ParseError("params document must be a JSON object", 1);

  std::array<double, RelaxParams::kCount> values{};
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::string name(RelaxParams::kNames[k]);
    auto it = doc.find(name);
    if (it == doc.end()) throw MissingField("missing field '" + name + "'");
    const ordered_json& v = it->is_object() ? it->value("value", ordered_json()) : *it;
    if (!v.is_number()) throw ParseError("field '" + name + "' is not a number", 1);
    values[k] = v.get<double>();
  }
  return RelaxParams::from_array(values);
}

RelaxParams load_relax_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open params file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_relax_params(buf.str());
}

std::string write_relax_params(const RelaxParams& p, const RelaxParams* std_errors) {
  ordered_json doc;
  doc["schema"] = "tmyag-relax-params";
  doc["version"] = 1;
  const auto values = p.to_array();
  for (std::size_t k = 0; k < values.size(); ++k) {
    ordered_json e;
    e["value"] = values[k];
    e["unit"] = std::string(kRelaxParamUnits[k]);
    if (std_errors) e["std_error"] = std_errors->to_array()[k];
    doc[std::string(RelaxParams::kNames[k])] = e;
  }
  return doc.dump(2) + "\n";
}

}  // namespace tmyag
