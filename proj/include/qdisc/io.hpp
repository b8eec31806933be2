#pragma once

// JSON interchange ("schema": "v1"), content digests, and atomic file writes.
// Complex numbers are [re, im] pairs; matrices are row-major lists of rows.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include <json.hpp>

#include "qdisc/reductions.hpp"

namespace qdisc::io {

using json = nlohmann::json;

inline constexpr const char* kSchema = "v1";

/// FNV-1a 64-bit digest as 16 hex digits.
inline std::string digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvariantError("cannot open input file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Writes via a temporary sibling and rename, so readers never see partial files.
inline void write_atomic(const std::string& path, const std::string& contents) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << contents;
    if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, target);
}

inline json parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvariantError(what + ": malformed JSON (" + e.what() + ")");
  }
}

// ---------------------------------------------------------------------------
// matrices

inline json to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InvariantError("complex entries must be [re, im] number pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvariantError("matrix must be a non-empty list of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = j[0].is_array() ? static_cast<Index>(j[0].size()) : 0;
  if (cols == 0) throw InvariantError("matrix rows must be non-empty lists");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw InvariantError("matrix rows must have equal length");
    for (Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(row[static_cast<size_t>(c)]);
  }
  return m;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline Vector vector_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvariantError("vector must be a non-empty list of [re, im] pairs");
  Vector v(static_cast<Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i]);
  return v;
}

inline json real_matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline const json& require(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw InvariantError(what + ": missing field '" + key + "'");
  return j.at(key);
}

inline void check_schema(const json& j, const std::string& what) {
  if (j.is_object() && j.contains("schema") && j.at("schema") != kSchema) {
    throw InvariantError(what + ": unsupported schema " + j.at("schema").dump());
  }
}

// ---------------------------------------------------------------------------
// states and channels

inline json to_json(const BipartiteState& s) {
  return {{"schema", kSchema}, {"kind", "state"}, {"dims", {s.dim_a(), s.dim_b()}}, {"matrix", to_json(s.matrix())}};
}

inline json to_json(const PureState& p, Index m, Index n) {
  return {{"schema", kSchema}, {"kind", "pure-state"}, {"dims", {m, n}}, {"vector", vector_to_json(p.amplitudes())}};
}

inline std::vector<Index> dims_from_json(const json& j, const std::string& what) {
  const json& d = require(j, "dims", what);
  if (!d.is_array() || d.empty()) throw InvariantError(what + ": 'dims' must be a non-empty list");
  std::vector<Index> dims;
  for (const auto& x : d) {
    if (!x.is_number_integer() || x.get<long long>() < 1) throw InvariantError(what + ": dims must be positive integers");
    dims.push_back(static_cast<Index>(x.get<long long>()));
  }
  return dims;
}

/// Accepts {"dims":[m,n], "matrix":...} or {"dims":[m,n], "vector":...}; a single dim d
/// is read as the bipartite 1 x d state.
inline BipartiteState state_from_json(const json& j, const std::string& what = "state") {
  check_schema(j, what);
  std::vector<Index> dims = dims_from_json(j, what);
  if (dims.size() == 1) dims.insert(dims.begin(), 1);
  if (dims.size() != 2) throw InvariantError(what + ": bipartite states need two dims");
  Matrix m;
  if (j.contains("matrix")) {
    m = matrix_from_json(j.at("matrix"));
  } else if (j.contains("vector")) {
    const PureState psi(vector_from_json(j.at("vector")));
    m = projector(psi.amplitudes());
  } else {
    throw InvariantError(what + ": needs a 'matrix' or 'vector' field");
  }
  return BipartiteState(DensityMatrix(m), dims[0], dims[1]);
}

inline json to_json(const QuantumChannel& ch) {
  json kraus = json::array();
  for (const auto& k : ch.kraus()) kraus.push_back(to_json(k));
  return {{"schema", kSchema}, {"kind", "channel"}, {"dim_in", ch.dim_in()}, {"dim_out", ch.dim_out()}, {"kraus", kraus}};
}

inline QuantumChannel channel_from_json(const json& j, const std::string& what = "channel") {
  check_schema(j, what);
  const auto di = require(j, "dim_in", what).get<Index>();
  const auto dout = require(j, "dim_out", what).get<Index>();
  std::vector<Matrix> kraus;
  for (const auto& k : require(j, "kraus", what)) kraus.push_back(matrix_from_json(k));
  return QuantumChannel(di, dout, std::move(kraus));
}

inline json density_to_json(const DensityMatrix& d) {
  return {{"schema", kSchema}, {"kind", "density"}, {"dims", {d.dim()}}, {"matrix", to_json(d.matrix())}};
}

inline DensityMatrix density_from_json(const json& j, const std::string& what = "density") {
  check_schema(j, what);
  return DensityMatrix(matrix_from_json(require(j, "matrix", what)));
}

// ---------------------------------------------------------------------------
// certificates and results

inline json to_json(const Measurement& m) {
  json elems = json::array();
  for (const auto& e : elements_of(m)) elems.push_back(to_json(e));
  const char* type = std::holds_alternative<VonNeumannMeasurement>(m) ? "vn" : "povm";
  return {{"dim", dim_of(m)}, {"type", type}, {"elements", elems}};
}

inline json to_json(const Ensemble& e) {
  json members = json::array();
  for (const auto& mem : e.members())
    members.push_back({{"weight", mem.weight}, {"placeholder", mem.placeholder}, {"state", to_json(mem.state)}});
  return {{"members", members}};
}

inline json to_json(const SeparableAnsatz& a) {
  json terms = json::array();
  for (const auto& t : a.terms()) terms.push_back({{"weight", t.weight}, {"a", vector_to_json(t.a)}, {"b", vector_to_json(t.b)}});
  return {{"dims", {a.dim_a(), a.dim_b()}}, {"terms", terms}};
}

inline json certificate_to_json(const Certificate& c) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, Measurement>) {
          return {{"type", "measurement"}, {"measurement", to_json(x)}};
        } else if constexpr (std::is_same_v<T, Ensemble>) {
          return {{"type", "ensemble"}, {"ensemble", to_json(x)}};
        } else if constexpr (std::is_same_v<T, SeparableAnsatz>) {
          return {{"type", "separable-ansatz"}, {"ansatz", to_json(x)}};
        } else if constexpr (std::is_same_v<T, ExtensionState>) {
          return {{"type", "extension"},
                  {"dims", {x.dim_a, x.dim_b, x.dim_c}},
                  {"classical_register", x.classical},
                  {"matrix", to_json(x.rho)}};
        } else if constexpr (std::is_same_v<T, ChannelEnsemble>) {
          return {{"type", "channel-ensemble"}, {"input", to_json(x.input)}, {"ensemble", to_json(x.ensemble)}};
        } else if constexpr (std::is_same_v<T, ProductCertificate>) {
          return {{"type", "product-state"}, {"a", vector_to_json(x.a)}, {"b", vector_to_json(x.b)}};
        } else {
          return {{"type", "cc-extension"},
                  {"dims", {x.dim_a, x.dim_b}},
                  {"extension_dims", {x.ext_a, x.ext_b}},
                  {"basis_a", to_json(x.basis_a)},
                  {"basis_b", to_json(x.basis_b)},
                  {"weights", real_matrix_to_json(x.weights)}};
        }
      },
      c);
}

inline json to_json(const OptimizationResult& r) {
  return {{"best_value", r.best_value},
          {"converged", r.converged},
          {"starts_within_tol", r.starts_within_tol},
          {"evaluations", r.evaluations},
          {"start_values", r.start_values}};
}

inline json to_json(const MeasureResult& r) {
  return {{"schema", kSchema},
          {"kind", "measure-result"},
          {"measure", r.measure},
          {"value", r.value},
          {"bound", to_string(r.bound)},
          {"certificate", certificate_to_json(r.certificate)},
          {"optimizer", to_json(r.optimizer)}};
}

inline json to_json(const ClassicalityReport& r) {
  json j = {{"schema", kSchema},
            {"kind", "classicality-report"},
            {"verdict", r.classical ? "classical" : "not-classical"},
            {"max_commutator_norm", r.max_commutator_norm},
            {"max_normality_defect", r.max_normality_defect},
            {"tolerance", r.tolerance}};
  if (r.witness_a) j["witness_a"] = to_json(*r.witness_a);
  if (r.witness_b) j["witness_b"] = to_json(*r.witness_b);
  if (r.weights) j["weights"] = real_matrix_to_json(*r.weights);
  return j;
}

// ---------------------------------------------------------------------------
// promise instances

inline json provenance_json(const std::string& p) { return p.empty() ? json(nullptr) : json{{"source_digest", p}}; }

inline std::string provenance_from_json(const json& j) {
  if (!j.contains("provenance") || j.at("provenance").is_null()) return {};
  return j.at("provenance").value("source_digest", std::string{});
}

inline json to_json(const SeparabilityInstance& i) {
  return {{"schema", kSchema}, {"kind", "separability"}, {"state", to_json(i.state)}, {"delta", i.delta},
          {"provenance", provenance_json(i.provenance)}};
}

inline json to_json(const EofInstance& i) {
  return {{"schema", kSchema}, {"kind", "eof"}, {"state", to_json(i.state)}, {"threshold", i.threshold},
          {"gap", i.gap}, {"provenance", provenance_json(i.provenance)}};
}

inline json to_json(const DiscordInstance& i) {
  return {{"schema", kSchema},
          {"kind", "discord"},
          {"state", to_json(i.state)},
          {"measured", "second"},
          {"measurement", to_string(i.kind)},
          {"threshold", i.threshold},
          {"gap", i.gap},
          {"provenance", provenance_json(i.provenance)}};
}

inline json to_json(const HolevoInstance& i) {
  return {{"schema", kSchema},
          {"kind", "holevo"},
          {"channel", to_json(i.channel)},
          {"input", density_to_json(i.input)},
          {"threshold", i.threshold},
          {"gap", i.gap},
          {"provenance", provenance_json(i.provenance)}};
}

inline json to_json(const KInstance& i) {
  return {{"schema", kSchema},
          {"kind", "k-membership"},
          {"state", to_json(i.state)},
          {"extension_dims", {i.ext_a, i.ext_b}},
          {"oracle", {{"constraint", "partial-trace"}, {"keep", {"A", "B"}}, {"order", {"A", "A'", "B", "B'"}},
                      {"tolerance", 1e-8}, {"norm", "trace"}}},
          {"delta", i.delta},
          {"provenance", provenance_json(i.provenance)}};
}

inline std::string instance_kind(const json& j) {
  check_schema(j, "instance");
  const json& k = require(j, "kind", "instance");
  if (!k.is_string()) throw InvariantError("instance: 'kind' must be a string");
  return k.get<std::string>();
}

inline double number_field(const json& j, const char* key, const std::string& what) {
  const json& v = require(j, key, what);
  if (!v.is_number()) throw InvariantError(what + ": field '" + key + "' must be a number");
  return v.get<double>();
}

inline SeparabilityInstance separability_from_json(const json& j) {
  return SeparabilityInstance(state_from_json(require(j, "state", "separability instance"), "separability instance state"),
                              number_field(j, "delta", "separability instance"), provenance_from_json(j));
}

inline EofInstance eof_instance_from_json(const json& j) {
  return EofInstance(state_from_json(require(j, "state", "eof instance"), "eof instance state"),
                     number_field(j, "threshold", "eof instance"), number_field(j, "gap", "eof instance"),
                     provenance_from_json(j));
}

inline MeasurementKind measurement_kind_from_string(const std::string& s) {
  if (s == "vn") return MeasurementKind::VonNeumann;
  if (s == "povm") return MeasurementKind::Povm;
  throw InvariantError("measurement kind must be 'vn' or 'povm', got '" + s + "'");
}

inline DiscordInstance discord_instance_from_json(const json& j) {
  return DiscordInstance(state_from_json(require(j, "state", "discord instance"), "discord instance state"),
                         number_field(j, "threshold", "discord instance"), number_field(j, "gap", "discord instance"),
                         measurement_kind_from_string(j.value("measurement", std::string("povm"))),
                         provenance_from_json(j));
}

inline HolevoInstance holevo_instance_from_json(const json& j) {
  return HolevoInstance(channel_from_json(require(j, "channel", "holevo instance")),
                        density_from_json(require(j, "input", "holevo instance")),
                        number_field(j, "threshold", "holevo instance"), number_field(j, "gap", "holevo instance"),
                        provenance_from_json(j));
}

inline KInstance k_instance_from_json(const json& j) {
  const json& e = require(j, "extension_dims", "k instance");
  if (!e.is_array() || e.size() != 2) throw InvariantError("k instance: 'extension_dims' must be [m', n']");
  return KInstance(state_from_json(require(j, "state", "k instance"), "k instance state"), e[0].get<Index>(),
                   e[1].get<Index>(), number_field(j, "delta", "k instance"), provenance_from_json(j));
}

/// Fixed-precision text for CSV cells; round-trips doubles exactly.
inline std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace qdisc::io
