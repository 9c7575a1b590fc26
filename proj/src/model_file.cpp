#include "tunnelpl/model_file.hpp"

#include <istream>
#include <ostream>

#include "tunnelpl/errors.hpp"

namespace tunnelpl {

nlohmann::json to_json(const ModelFile& f) {
  nlohmann::json j;
  j["gamma"] = f.model.gamma();
  j["c"] = f.model.c();
  j["d0_m"] = f.model.d0();
  j["alpha_db_per_m"] = f.model.alpha();
  j["sse_db2"] = f.sse_db2 ? nlohmann::json(*f.sse_db2) : nlohmann::json(nullptr);
  j["provenance"] = f.provenance;
  return j;
}

ModelFile model_file_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("model file must contain a JSON object");
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
      throw ValidationError(std::string("model file: key '") + key + "' is missing or not a number");
    }
    return j.at(key).get<double>();
  };
  const double gamma = number("gamma");
  const double c = number("c");
  const double d0 = number("d0_m");
  const double alpha = number("alpha_db_per_m");
  std::optional<double> sse;
  if (j.contains("sse_db2") && !j.at("sse_db2").is_null()) sse = number("sse_db2");
  try {
    ModelFile f{TemplateModel(gamma, c, d0, alpha), sse, nlohmann::json::object()};
    if (j.contains("provenance")) f.provenance = j.at("provenance");
    return f;
  } catch (const DomainError& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
}

ModelFile read_model_file(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model file: ") + e.what(), 0);
  }
  return model_file_from_json(j);
}

void write_model_file(std::ostream& out, const ModelFile& f) { out << to_json(f).dump(2) << '\n'; }

}  // namespace tunnelpl
