#pragma once

// JSON schemas for the library types, plus the CSV iterate trace.

#include "conelab/cones.hpp"
#include "conelab/oracle.hpp"
#include "conelab/report.hpp"
#include "conelab/retractions.hpp"
#include "conelab/suprema.hpp"

#include <json.hpp>

#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>

namespace conelab::io {

using json = nlohmann::json;

[[noreturn]] inline void config_error(const std::string& what) {
  throw Error(ErrorKind::Config, what);
}

inline void require_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& what) {
  if (!j.is_object()) config_error(what + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) config_error(what + ": unknown key \"" + it.key() + "\"");
  }
}

inline const json& field(const json& j, const char* key, const std::string& what) {
  auto it = j.find(key);
  if (it == j.end()) config_error(what + ": missing key \"" + key + "\"");
  return *it;
}

inline Vec vec_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) config_error(what + " must be a non-empty array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) config_error(what + " must contain numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  if (!v.allFinite()) config_error(what + " must be finite");
  return v;
}

inline json vec_to_json(const Vec& v) { return json(to_std(v)); }

/// List of equal-length vectors, stored as matrix columns.
inline Mat columns_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) config_error(what + " must be a non-empty array");
  const Vec first = vec_from_json(j[0], what);
  Mat m(first.size(), static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    const Vec col = vec_from_json(j[c], what);
    if (col.size() != first.size()) config_error(what + ": ragged vector list");
    m.col(static_cast<Eigen::Index>(c)) = col;
  }
  return m;
}

inline json columns_to_json(const Mat& m) {
  json out = json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(vec_to_json(m.col(c)));
  return out;
}

inline int dim_from_json(const json& j, const std::string& what) {
  const json& d = field(j, "dim", what);
  if (!d.is_number_integer() || d.get<long long>() < 1) {
    config_error(what + ": dim must be a positive integer");
  }
  return static_cast<int>(d.get<long long>());
}

inline bool negated_from_json(const json& j) {
  auto it = j.find("negated");
  if (it == j.end()) return false;
  if (!it->is_boolean()) config_error("cone: negated must be a boolean");
  return it->get<bool>();
}

/// {"type":"orthant","dim":m} | {"type":"simplicial","basis":[cols]} |
/// {"type":"lorentz","dim":m} | {"type":"generators","vectors":[...]} |
/// {"type":"halfspaces","normals":[...]}. Orthant and lorentz accept an
/// optional "negated": true for the cone -K.
inline Cone cone_from_json(const json& j) {
  if (!j.is_object()) config_error("cone must be a JSON object");
  const json& t = field(j, "type", "cone");
  if (!t.is_string()) config_error("cone: type must be a string");
  const std::string type = t.get<std::string>();
  if (type == "orthant" || type == "lorentz") {
    require_keys(j, {"type", "dim", "negated"}, "cone");
    const int dim = dim_from_json(j, "cone");
    Cone c = type == "orthant" ? Cone::orthant(dim) : Cone::lorentz(dim);
    return negated_from_json(j) ? c.negated() : c;
  }
  if (type == "simplicial") {
    require_keys(j, {"type", "basis"}, "cone");
    return Cone::simplicial(columns_from_json(field(j, "basis", "cone"), "basis"));
  }
  if (type == "generators") {
    require_keys(j, {"type", "vectors"}, "cone");
    return Cone::generators(
        columns_from_json(field(j, "vectors", "cone"), "vectors"));
  }
  if (type == "halfspaces") {
    require_keys(j, {"type", "normals"}, "cone");
    return Cone::halfspaces(
        columns_from_json(field(j, "normals", "cone"), "normals"));
  }
  config_error("cone: unknown type \"" + type + "\"");
}

inline json cone_to_json(const Cone& cone) {
  return std::visit(
      [&](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        json j;
        j["type"] = cone.type_name();
        if constexpr (std::is_same_v<T, Orthant> || std::is_same_v<T, Lorentz>) {
          j["dim"] = c.dim;
          if (c.negated) j["negated"] = true;
        } else if constexpr (std::is_same_v<T, Simplicial>) {
          j["basis"] = columns_to_json(c.basis);
        } else if constexpr (std::is_same_v<T, Generators>) {
          j["vectors"] = columns_to_json(c.vectors);
        } else {
          j["normals"] = columns_to_json(c.normals);
        }
        return j;
      },
      cone.variant());
}

inline json tolerances_to_json(const ToleranceConfig& t) {
  return json{{"eps_membership", t.eps_membership},
              {"eps_equal", t.eps_equal},
              {"eps_converge", t.eps_converge}};
}

inline ToleranceConfig tolerances_from_json(const json& j,
                                            ToleranceConfig base = {}) {
  require_keys(j, {"eps_membership", "eps_equal", "eps_converge"}, "tolerances");
  auto get = [&](const char* key, double& dst) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_number()) config_error(std::string("tolerances: ") + key);
    dst = it->get<double>();
  };
  get("eps_membership", base.eps_membership);
  get("eps_equal", base.eps_equal);
  get("eps_converge", base.eps_converge);
  base.validate();
  return base;
}

struct PairDescriptor {
  Family family = Family::Lattice;
  Cone cone = Cone::orthant(1);
  std::optional<Vec> interior_point;
};

inline Family family_from_string(const std::string& s) {
  if (s == "lattice") return Family::Lattice;
  if (s == "moreau") return Family::Moreau;
  if (s == "minkowski") return Family::Minkowski;
  config_error("unknown pair family \"" + s + "\"");
}

/// {"family":"lattice"|"moreau"|"minkowski","cone":<cone>,
///  "interior_point":[...] (minkowski only)}
inline PairDescriptor pair_from_json(const json& j) {
  require_keys(j, {"family", "cone", "interior_point"}, "pair");
  const json& f = field(j, "family", "pair");
  if (!f.is_string()) config_error("pair: family must be a string");
  PairDescriptor d;
  d.family = family_from_string(f.get<std::string>());
  d.cone = cone_from_json(field(j, "cone", "pair"));
  auto it = j.find("interior_point");
  if (d.family == Family::Minkowski) {
    if (it == j.end()) config_error("pair: minkowski needs interior_point");
    d.interior_point = vec_from_json(*it, "interior_point");
  } else if (it != j.end()) {
    config_error("pair: interior_point is only valid for minkowski");
  }
  return d;
}

inline json pair_to_json(const PairDescriptor& d) {
  json j{{"family", family_name(d.family)}, {"cone", cone_to_json(d.cone)}};
  if (d.interior_point) j["interior_point"] = vec_to_json(*d.interior_point);
  return j;
}

inline RetractionPair build_pair(const PairDescriptor& d,
                                 const ToleranceConfig& tol) {
  switch (d.family) {
    case Family::Lattice: return RetractionPair::lattice(d.cone, tol);
    case Family::Moreau: return RetractionPair::moreau(d.cone, tol);
    case Family::Minkowski:
      return RetractionPair::minkowski(d.cone, *d.interior_point, tol);
    case Family::Custom: break;
  }
  config_error("custom pairs have no descriptor");
}

inline json witness_to_json(const Witness& w) {
  json j{{"probe", w.probe.kind},
         {"x", vec_to_json(w.probe.x)},
         {"residual", w.residual}};
  if (w.probe.y) j["y"] = vec_to_json(*w.probe.y);
  return j;
}

inline Witness witness_from_json(const json& j) {
  require_keys(j, {"probe", "x", "y", "residual"}, "witness");
  Witness w;
  w.probe.kind = field(j, "probe", "witness").get<std::string>();
  w.probe.x = vec_from_json(field(j, "x", "witness"), "witness x");
  if (j.contains("y")) {
    const json& y = j["y"];
    // Chain probes of length one carry an empty increment list.
    w.probe.y = y.empty() ? Vec(0) : vec_from_json(y, "witness y");
  }
  w.residual = field(j, "residual", "witness").get<double>();
  return w;
}

inline json report_to_json(const PropertyReport& r) {
  json w = json::array();
  for (const auto& x : r.witnesses) w.push_back(witness_to_json(x));
  return json{{"property", r.property},
              {"verdict", verdict_name(r.verdict)},
              {"samples", r.samples},
              {"seed", r.seed},
              {"witnesses", w},
              {"tolerances", tolerances_to_json(r.tolerances)},
              {"max_residual", r.max_residual},
              {"failures", r.failures},
              {"inconclusive", r.inconclusive}};
}

inline json certificate_to_json(const oracle::ProjectionCertificate& c) {
  return json{{"point", vec_to_json(c.point)},
              {"active_face", c.active_face},
              {"residual_primal", c.residual_primal},
              {"residual_polar", c.residual_polar},
              {"residual_complementarity", c.residual_complementarity}};
}

inline json optional_vec(const std::optional<Vec>& v) {
  return v ? vec_to_json(*v) : json(nullptr);
}

inline json trace_to_json(const SupTrace& t) {
  return json{{"status", status_name(t.status)},
              {"iterations", t.iterations},
              {"result", optional_vec(t.result)},
              {"upper_bound", optional_vec(t.upper_bound_used)},
              {"residuals", t.residuals},
              {"certified", t.certified},
              {"note", t.note},
              {"u", vec_to_json(t.u)},
              {"v", vec_to_json(t.v)}};
}

/// One iterate per row: sequence,index,x0,x1,... with the inputs u, v as
/// index 0 followed by u_1, v_1, u_2, v_2, ...
inline std::string trace_to_csv(const SupTrace& t) {
  std::ostringstream os;
  os.precision(17);
  os << "sequence,index";
  for (Eigen::Index i = 0; i < t.u.size(); ++i) os << ",x" << i;
  os << "\n";
  auto row = [&](const char* seq, std::size_t idx, const Vec& x) {
    os << seq << "," << idx;
    for (Eigen::Index i = 0; i < x.size(); ++i) os << "," << x[i];
    os << "\n";
  };
  row("u", 0, t.u);
  row("v", 0, t.v);
  for (std::size_t n = 0; n < t.u_iterates.size(); ++n) {
    row("u", n + 1, t.u_iterates[n]);
    if (n < t.v_iterates.size()) row("v", n + 1, t.v_iterates[n]);
  }
  return os.str();
}

inline json lex_point_to_json(const LexPoint& p) {
  return json::array({p.first, p.second});
}

inline json lex_report_to_json(const LexDemoReport& r) {
  json cands = json::array();
  for (const auto& c : r.candidates) {
    cands.push_back(json{{"w", lex_point_to_json(c.bound)},
                         {"upper_bound", c.is_upper_bound},
                         {"smaller", lex_point_to_json(c.smaller)},
                         {"smaller_upper_bound", c.smaller_is_upper_bound},
                         {"strictly_smaller", c.strictly_smaller}});
  }
  return json{{"n_terms", r.n_terms},
              {"chain_increasing", r.chain_increasing},
              {"candidates", cands}};
}

}  // namespace conelab::io
