#pragma once

// Fitted-model JSON:
//   { "gamma": .., "c": .., "d0_m": .., "alpha_db_per_m": .., "sse_db2": ..,
//     "provenance": { "source": .., "fit_options": {..}, "timestamp": .., ... } }

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "tunnelpl/model.hpp"

namespace tunnelpl {

struct ModelFile {
  TemplateModel model;
  std::optional<double> sse_db2;
  nlohmann::json provenance = nlohmann::json::object();
};

nlohmann::json to_json(const ModelFile& file);

/// Throws ParseError for malformed JSON and ValidationError for missing keys
/// or parameters that violate the model invariants.
ModelFile model_file_from_json(const nlohmann::json& j);

ModelFile read_model_file(std::istream& in);
void write_model_file(std::ostream& out, const ModelFile& file);

}  // namespace tunnelpl
