#include "infoq/io.hpp"

#include <fstream>

#include "infoq/errors.hpp"

namespace infoq {

namespace {

std::vector<Variable> variables_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("variables") || !doc["variables"].is_array()) {
    throw InvalidDistribution("distribution document needs a \"variables\" array");
  }
  std::vector<Variable> vars;
  for (const auto& v : doc["variables"]) {
    if (!v.is_object() || !v.contains("name") || !v.contains("support")) {
      throw InvalidDistribution("each variable needs \"name\" and \"support\"");
    }
    Variable var;
    var.name = v["name"].get<std::string>();
    for (const auto& label : v["support"]) {
      var.support.push_back(label.is_string() ? label.get<std::string>() : label.dump());
    }
    vars.push_back(std::move(var));
  }
  return vars;
}

std::vector<double> cells_from_json(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    throw InvalidDistribution(std::string("distribution document needs a \"") + key + "\" array");
  }
  std::vector<double> cells;
  for (const auto& c : doc[key]) {
    if (!c.is_number()) throw InvalidDistribution(std::string("\"") + key + "\" must hold numbers");
    cells.push_back(c.get<double>());
  }
  return cells;
}

nlohmann::json variables_to_json(const std::vector<Variable>& vars) {
  auto out = nlohmann::json::array();
  for (const auto& v : vars) out.push_back({{"name", v.name}, {"support", v.support}});
  return out;
}

}  // namespace

JointDistribution distribution_from_json(const nlohmann::json& doc) {
  try {
    return JointDistribution(variables_from_json(doc), cells_from_json(doc, "probs"));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidDistribution(std::string("malformed distribution document: ") + e.what());
  }
}

UnnormalizedWeight weight_from_json(const nlohmann::json& doc) {
  try {
    return UnnormalizedWeight(variables_from_json(doc), cells_from_json(doc, "weights"));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidDistribution(std::string("malformed weight document: ") + e.what());
  }
}

nlohmann::json to_json(const JointDistribution& d) {
  return {{"variables", variables_to_json(d.variables())},
          {"probs", std::vector<double>(d.probs().begin(), d.probs().end())}};
}

nlohmann::json to_json(const UnnormalizedWeight& w) {
  return {{"variables", variables_to_json(w.variables())},
          {"weights", std::vector<double>(w.cells().begin(), w.cells().end())}};
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

DistributionOrWeight load_distribution_file(const std::string& path) {
  const auto doc = read_json_file(path);
  if (doc.is_object() && doc.contains("weights")) return weight_from_json(doc);
  return distribution_from_json(doc);
}

JointDistribution load_distribution(const std::string& path) { return distribution_from_json(read_json_file(path)); }

}  // namespace infoq
