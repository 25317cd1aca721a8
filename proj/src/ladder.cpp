#include "msladder/ladder.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "msladder/angular.hpp"

namespace msl {

using nlohmann::json;

double Envelope::value(double t) const {
  switch (kind) {
    case EnvelopeKind::constant:
      return amplitude;
    case EnvelopeKind::gaussian: {
      const double x = (t - center) / width;
      return amplitude * std::exp(-x * x);
    }
    case EnvelopeKind::sin_squared: {
      if (std::abs(t - center) > 0.5 * width) return 0.0;
      const double c = std::cos(M_PI * (t - center) / width);
      return amplitude * c * c;
    }
  }
  return 0.0;
}

int LadderSystem::total_dimension() const {
  int n = 0;
  for (const auto& lv : levels) n += lv.degeneracy;
  return n;
}

int LadderSystem::level_offset(int level) const {
  int off = 0;
  for (int k = 0; k < level; ++k) off += levels[k].degeneracy;
  return off;
}

double LadderSystem::envelope_value(const std::string& id, double t) const {
  if (id.empty()) return 1.0;
  const auto it = envelopes.find(id);
  if (it == envelopes.end()) throw InvalidSystem("unknown envelope id '" + id + "'");
  return it->second.value(t);
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& issue : issues) os << issue.where << ": " << issue.message << "\n";
  return os.str();
}

ValidationReport validate(const LadderSystem& system) {
  ValidationReport report;
  auto flag = [&](const std::string& where, const std::string& message) {
    report.issues.push_back({where, message});
  };

  if (system.levels.size() < 2) {
    flag("levels", "at least two levels required");
    return report;
  }
  for (std::size_t k = 0; k < system.levels.size(); ++k) {
    if (system.levels[k].degeneracy < 1) {
      flag("levels[" + std::to_string(k) + "].degeneracy", "must be >= 1");
    }
  }
  if (system.levels[0].detuning != 0.0) {
    flag("levels[0].detuning", "first level defines the energy zero and must be 0");
  }
  if (system.transitions.size() != system.levels.size() - 1) {
    flag("transitions", "expected " + std::to_string(system.levels.size() - 1) +
                            " transitions, got " + std::to_string(system.transitions.size()));
    return report;
  }

  for (std::size_t n = 0; n < system.transitions.size(); ++n) {
    const auto& tr = system.transitions[n];
    const std::string where = "transitions[" + std::to_string(n) + "]";
    const int rows = system.levels[n].degeneracy;
    const int cols = system.levels[n + 1].degeneracy;
    if (tr.constant_part.rows() != rows || tr.constant_part.cols() != cols) {
      std::ostringstream os;
      os << "shape " << tr.constant_part.rows() << "x" << tr.constant_part.cols()
         << " does not match degeneracies " << rows << "x" << cols;
      flag(where + ".matrix", os.str());
    }
    if (!tr.constant_part.allFinite()) {
      flag(where + ".matrix", "entries must be finite");
    }
    if (!tr.allow_null && tr.constant_part.norm() == 0.0) {
      flag(where + ".matrix", "all-zero block (set allow_null for a deliberate null link)");
    }
    if (system.envelopes.find(tr.envelope_id) == system.envelopes.end()) {
      flag(where + ".envelope", "references unknown envelope '" + tr.envelope_id + "'");
    }
  }
  for (const auto& [id, env] : system.envelopes) {
    if (env.kind != EnvelopeKind::constant && env.width <= 0.0) {
      flag("envelopes." + id + ".width", "must be > 0 for pulsed kinds");
    }
  }
  return report;
}

namespace detail {

ComplexMatrix assemble_unchecked(const LadderSystem& system, double t) {
  const int dim = system.total_dimension();
  ComplexMatrix H = ComplexMatrix::Zero(dim, dim);
  int off = 0;
  for (const auto& lv : system.levels) {
    for (int i = 0; i < lv.degeneracy; ++i) H(off + i, off + i) = lv.detuning;
    off += lv.degeneracy;
  }
  off = 0;
  for (std::size_t n = 0; n < system.transitions.size(); ++n) {
    const auto& tr = system.transitions[n];
    const int rows = system.levels[n].degeneracy;
    const int cols = system.levels[n + 1].degeneracy;
    const double f = system.envelope_value(tr.envelope_id, t);
    H.block(off, off + rows, rows, cols) = f * tr.constant_part;
    H.block(off + rows, off, cols, rows) = (f * tr.constant_part).adjoint();
    off += rows;
  }
  return H;
}

}  // namespace detail

ComplexMatrix assemble_hamiltonian(const LadderSystem& system, double t) {
  const ValidationReport report = validate(system);
  if (!report.ok()) throw InvalidSystem("assemble_hamiltonian: " + report.summary());
  return detail::assemble_unchecked(system, t);
}

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw SchemaError(field + ": " + what);
}

double require_number(const json& j, const std::string& field) {
  if (!j.is_number()) schema_error(field, "expected a number");
  return j.get<double>();
}

Complex parse_complex(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    schema_error(field, "expected a [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

ComplexMatrix parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) schema_error(field, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  ComplexMatrix M;
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.empty()) {
      schema_error(field + "[" + std::to_string(i) + "]", "expected a non-empty row");
    }
    if (i == 0) {
      cols = row.size();
      M.resize(rows, cols);
    } else if (row.size() != cols) {
      schema_error(field + "[" + std::to_string(i) + "]", "ragged row");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      M(i, k) = parse_complex(row[k], field + "[" + std::to_string(i) + "][" +
                                          std::to_string(k) + "]");
    }
  }
  return M;
}

int parse_two_j(const json& j, const std::string& field) {
  const double v = require_number(j, field);
  const double doubled = 2.0 * v;
  const int two_j = static_cast<int>(std::lround(doubled));
  if (std::abs(doubled - two_j) > 1e-9 || two_j < 0) {
    schema_error(field, "expected a non-negative integer or half-integer");
  }
  return two_j;
}

EnvelopeKind parse_kind(const json& j, const std::string& field) {
  if (!j.is_string()) schema_error(field, "expected a string");
  const std::string s = j.get<std::string>();
  if (s == "constant") return EnvelopeKind::constant;
  if (s == "gaussian") return EnvelopeKind::gaussian;
  if (s == "sin_squared") return EnvelopeKind::sin_squared;
  schema_error(field, "unknown kind '" + s + "' (constant|gaussian|sin_squared)");
}

const char* kind_name(EnvelopeKind kind) {
  switch (kind) {
    case EnvelopeKind::constant: return "constant";
    case EnvelopeKind::gaussian: return "gaussian";
    case EnvelopeKind::sin_squared: return "sin_squared";
  }
  return "constant";
}

}  // namespace

LadderSystem build_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object()) throw SchemaError("document: expected a JSON object");
  for (const char* key : {"levels", "transitions", "envelopes"}) {
    if (!doc.contains(key)) schema_error(key, "missing");
  }

  LadderSystem system;

  const json& jlevels = doc["levels"];
  if (!jlevels.is_array() || jlevels.size() < 2) {
    schema_error("levels", "expected an array of at least two levels");
  }
  for (std::size_t k = 0; k < jlevels.size(); ++k) {
    const std::string where = "levels[" + std::to_string(k) + "]";
    const json& jl = jlevels[k];
    if (!jl.is_object()) schema_error(where, "expected an object");
    LevelSet lv;
    if (!jl.contains("label") || !jl["label"].is_string()) {
      schema_error(where + ".label", "expected a string");
    }
    lv.label = jl["label"].get<std::string>();
    if (!jl.contains("degeneracy") || !jl["degeneracy"].is_number_integer() ||
        jl["degeneracy"].get<int>() < 1) {
      schema_error(where + ".degeneracy", "expected a positive integer");
    }
    lv.degeneracy = jl["degeneracy"].get<int>();
    if (!jl.contains("detuning")) schema_error(where + ".detuning", "missing");
    lv.detuning = require_number(jl["detuning"], where + ".detuning");
    system.levels.push_back(lv);
  }

  const json& jenv = doc["envelopes"];
  if (!jenv.is_object()) schema_error("envelopes", "expected an object");
  for (const auto& [id, je] : jenv.items()) {
    const std::string where = "envelopes." + id;
    if (!je.is_object() || !je.contains("kind")) schema_error(where, "expected {kind, ...}");
    Envelope env;
    env.kind = parse_kind(je["kind"], where + ".kind");
    if (je.contains("amplitude")) {
      env.amplitude = require_number(je["amplitude"], where + ".amplitude");
    }
    if (je.contains("center")) env.center = require_number(je["center"], where + ".center");
    if (je.contains("width")) env.width = require_number(je["width"], where + ".width");
    if (env.kind != EnvelopeKind::constant && !je.contains("width")) {
      schema_error(where + ".width", "required for pulsed kinds");
    }
    system.envelopes[id] = env;
  }

  const json& jtrans = doc["transitions"];
  if (!jtrans.is_array()) schema_error("transitions", "expected an array");
  for (std::size_t n = 0; n < jtrans.size(); ++n) {
    const std::string where = "transitions[" + std::to_string(n) + "]";
    const json& jt = jtrans[n];
    if (!jt.is_object()) schema_error(where, "expected an object");
    CouplingBlock tr;
    if (!jt.contains("envelope") || !jt["envelope"].is_string()) {
      schema_error(where + ".envelope", "expected a string");
    }
    tr.envelope_id = jt["envelope"].get<std::string>();
    if (jt.contains("allow_null")) {
      if (!jt["allow_null"].is_boolean()) schema_error(where + ".allow_null", "expected a bool");
      tr.allow_null = jt["allow_null"].get<bool>();
    }

    if (jt.contains("matrix")) {
      tr.constant_part = parse_matrix(jt["matrix"], where + ".matrix");
    } else if (jt.contains("polarization")) {
      const int two_jl = parse_two_j(jt.value("J_lower", json()), where + ".J_lower");
      const int two_ju = parse_two_j(jt.value("J_upper", json()), where + ".J_upper");
      const json& jp = jt["polarization"];
      if (!jp.is_object()) schema_error(where + ".polarization", "expected an object");
      PolarizationTriple pol;
      pol.r = jp.contains("r") ? parse_complex(jp["r"], where + ".polarization.r") : Complex{};
      pol.p = jp.contains("p") ? parse_complex(jp["p"], where + ".polarization.p") : Complex{};
      pol.l = jp.contains("l") ? parse_complex(jp["l"], where + ".polarization.l") : Complex{};
      try {
        tr.constant_part = build_coupling(two_jl, two_ju, pol);
      } catch (const Error& e) {
        schema_error(where, e.what());
      }
    } else {
      schema_error(where, "expected either 'matrix' or 'J_lower'/'J_upper'/'polarization'");
    }
    system.transitions.push_back(std::move(tr));
  }

  const ValidationReport report = validate(system);
  if (!report.ok()) {
    const auto& first = report.issues.front();
    schema_error(first.where, first.message);
  }
  return system;
}

LadderSystem load_system(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return build_from_json(buf.str());
}

std::string system_to_json(const LadderSystem& system) {
  json doc;
  doc["levels"] = json::array();
  for (const auto& lv : system.levels) {
    doc["levels"].push_back(
        {{"label", lv.label}, {"degeneracy", lv.degeneracy}, {"detuning", lv.detuning}});
  }
  doc["transitions"] = json::array();
  for (const auto& tr : system.transitions) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < tr.constant_part.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < tr.constant_part.cols(); ++j) {
        row.push_back({tr.constant_part(i, j).real(), tr.constant_part(i, j).imag()});
      }
      rows.push_back(std::move(row));
    }
    json jt = {{"matrix", std::move(rows)}, {"envelope", tr.envelope_id}};
    if (tr.allow_null) jt["allow_null"] = true;
    doc["transitions"].push_back(std::move(jt));
  }
  doc["envelopes"] = json::object();
  for (const auto& [id, env] : system.envelopes) {
    json je = {{"kind", kind_name(env.kind)}, {"amplitude", env.amplitude}};
    if (env.kind != EnvelopeKind::constant) {
      je["center"] = env.center;
      je["width"] = env.width;
    }
    doc["envelopes"][id] = std::move(je);
  }
  return doc.dump(2);
}

std::uint64_t system_hash(const LadderSystem& system) {
  const std::string text = system_to_json(system);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace msl
