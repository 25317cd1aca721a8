#include "msladder/tolerances.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "msladder/errors.hpp"

namespace msl {

using nlohmann::json;

namespace {

struct Field {
  const char* name;
  double Tolerances::*member;
};

constexpr Field kFields[] = {
    {"herm", &Tolerances::herm},         {"degen", &Tolerances::degen},
    {"unitary", &Tolerances::unitary},   {"eig", &Tolerances::eig},
    {"commute", &Tolerances::commute},   {"offdiag", &Tolerances::offdiag},
    {"null_link", &Tolerances::null_link}, {"abs_floor", &Tolerances::abs_floor},
};

}  // namespace

Tolerances tolerances_from_json(const std::string& text, Tolerances base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object()) throw SchemaError("tolerances: expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const Field& f : kFields) {
      if (key == f.name) {
        if (!value.is_number() || value.get<double>() <= 0.0) {
          throw SchemaError("tolerances." + key + ": expected a positive number");
        }
        base.*(f.member) = value.get<double>();
        known = true;
        break;
      }
    }
    if (!known) throw SchemaError("tolerances." + key + ": unknown field");
  }
  return base;
}

Tolerances tolerances_from_file(const std::string& path, Tolerances base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open tolerance file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return tolerances_from_json(buf.str(), base);
}

std::string tolerances_to_json(const Tolerances& tol) {
  json doc;
  for (const Field& f : kFields) doc[f.name] = tol.*(f.member);
  return doc.dump();
}

}  // namespace msl
