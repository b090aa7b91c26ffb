#pragma once

#include <string>
#include <variant>

#include "infoq/dist.hpp"
#include "json.hpp"

namespace infoq {

// Distribution documents:
//   { "variables": [ { "name": "X", "support": ["0","1"] }, ... ],
//     "probs": [ ...row-major, last variable fastest... ] }
// An unnormalized weight uses "weights" in place of "probs".
JointDistribution distribution_from_json(const nlohmann::json& doc);
UnnormalizedWeight weight_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const JointDistribution& d);
nlohmann::json to_json(const UnnormalizedWeight& w);

using DistributionOrWeight = std::variant<JointDistribution, UnnormalizedWeight>;

// Reads a file holding either a "probs" or a "weights" document.
DistributionOrWeight load_distribution_file(const std::string& path);
JointDistribution load_distribution(const std::string& path);

nlohmann::json read_json_file(const std::string& path);

}  // namespace infoq
