#pragma once

// Command implementations behind the conelab executable. Each command takes
// a RunConfig and returns the exit code together with the rendered report,
// so it can be driven from tests without a process boundary.
//
// Exit codes: 0 all checks pass, 1 property violated or no convergence,
// 2 usage or configuration error.

#include "conelab/cones.hpp"
#include "conelab/io.hpp"
#include "conelab/properties.hpp"
#include "conelab/retractions.hpp"
#include "conelab/suprema.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace conelab::cli {

using json = nlohmann::json;

enum class OutputFormat { Json, Csv, Human };

inline OutputFormat format_from_string(const std::string& s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "human") return OutputFormat::Human;
  throw Error(ErrorKind::Config, "unknown format \"" + s + "\"");
}

struct RunConfig {
  std::string command;
  std::optional<io::PairDescriptor> pair;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  ToleranceConfig tolerances;
  int max_iter = 100;
  std::optional<Vec> u;
  std::optional<Vec> v;
  std::string demo;
  OutputFormat format = OutputFormat::Json;
  unsigned threads = 1;

  SampleConfig sampling() const { return SampleConfig{samples, seed, threads}; }
};

struct CommandResult {
  int exit_code = 0;
  std::string output;
  std::string error;
};

/// Reads run-config keys from a JSON object into `cfg`. Unknown keys are
/// rejected. "command" is accepted only inside batch files.
inline void apply_config_json(const json& j, RunConfig& cfg,
                              bool allow_command = false) {
  if (allow_command) {
    io::require_keys(j, {"command", "pair", "samples", "seed", "tolerances",
                         "max_iter", "u", "v", "demo"},
                     "run config");
  } else {
    io::require_keys(j, {"pair", "samples", "seed", "tolerances", "max_iter",
                         "u", "v", "demo"},
                     "run config");
  }
  auto uint_field = [&](const char* key) -> std::optional<std::uint64_t> {
    auto it = j.find(key);
    if (it == j.end()) return std::nullopt;
    if (!it->is_number_unsigned()) {
      io::config_error(std::string(key) + " must be a non-negative integer");
    }
    return it->get<std::uint64_t>();
  };
  if (auto it = j.find("command"); it != j.end()) {
    if (!it->is_string()) io::config_error("command must be a string");
    cfg.command = it->get<std::string>();
  }
  if (auto it = j.find("pair"); it != j.end()) cfg.pair = io::pair_from_json(*it);
  if (auto n = uint_field("samples")) cfg.samples = *n;
  if (auto s = uint_field("seed")) cfg.seed = *s;
  if (auto k = uint_field("max_iter")) cfg.max_iter = static_cast<int>(*k);
  if (auto it = j.find("tolerances"); it != j.end()) {
    cfg.tolerances = io::tolerances_from_json(*it, cfg.tolerances);
  }
  if (auto it = j.find("u"); it != j.end()) cfg.u = io::vec_from_json(*it, "u");
  if (auto it = j.find("v"); it != j.end()) cfg.v = io::vec_from_json(*it, "v");
  if (auto it = j.find("demo"); it != j.end()) {
    if (!it->is_string()) io::config_error("demo must be a string");
    cfg.demo = it->get<std::string>();
  }
}

inline json header(const RunConfig& cfg, const std::string& command) {
  return json{{"command", command},
              {"seed", cfg.seed},
              {"samples", cfg.samples},
              {"tolerances", io::tolerances_to_json(cfg.tolerances)}};
}

inline std::string fmt_vec(const Vec& v) {
  std::ostringstream os;
  os.precision(6);
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << "]";
  return os.str();
}

inline std::string mark(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "✓";
    case Verdict::Fail: return "✗";
    case Verdict::Inconclusive: return "?";
  }
  return "?";
}

inline std::string human_report_line(const PropertyReport& r) {
  std::ostringstream os;
  os << mark(r.verdict) << " " << r.property << " (" << verdict_name(r.verdict)
     << ", " << r.samples << " samples)";
  if (!r.witnesses.empty()) {
    const Witness& w = r.witnesses.front();
    os << "\n    witness [" << w.probe.kind << "] x=" << fmt_vec(w.probe.x);
    if (w.probe.y && w.probe.y->size() > 0) os << " y=" << fmt_vec(*w.probe.y);
    os << " residual=" << w.residual;
  }
  return os.str();
}

inline std::string render_json(const json& j) { return j.dump(2) + "\n"; }

inline Verdict overall(const std::vector<PropertyReport>& reps) {
  Verdict v = Verdict::Pass;
  for (const auto& r : reps) {
    if (severity(r.verdict) > severity(v)) v = r.verdict;
  }
  return v;
}

namespace detail {

template <class Body>
CommandResult guarded(Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return CommandResult{2, "", e.what()};
  } catch (const nlohmann::json::exception& e) {
    return CommandResult{2, "", std::string("malformed JSON: ") + e.what()};
  } catch (const std::exception& e) {
    return CommandResult{2, "", e.what()};
  }
}

inline const io::PairDescriptor& require_pair(const RunConfig& cfg) {
  if (!cfg.pair) io::config_error("a pair descriptor is required");
  return *cfg.pair;
}

}  // namespace detail

/// Runs every property applicable to the pair's family.
inline CommandResult cmd_verify(const RunConfig& cfg) {
  return detail::guarded([&] {
    if (cfg.format == OutputFormat::Csv) {
      io::config_error("verify reports are JSON or human; CSV is for traces");
    }
    const auto& desc = detail::require_pair(cfg);
    const RetractionPair pair = io::build_pair(desc, cfg.tolerances);
    const auto reps = run_catalogue(pair, cfg.sampling());
    const Verdict v = overall(reps);
    const int code = v == Verdict::Pass ? 0 : 1;
    if (cfg.format == OutputFormat::Human) {
      std::ostringstream os;
      os << "verify " << family_name(desc.family) << " pair on "
         << desc.cone.type_name() << "(" << desc.cone.dim() << "), seed "
         << cfg.seed << ", " << cfg.samples << " samples\n";
      for (const auto& r : reps) os << human_report_line(r) << "\n";
      os << "overall: " << verdict_name(v) << "\n";
      return CommandResult{code, os.str(), ""};
    }
    json j = header(cfg, "verify");
    j["pair"] = io::pair_to_json(desc);
    j["verdict"] = verdict_name(v);
    json arr = json::array();
    for (const auto& r : reps) arr.push_back(io::report_to_json(r));
    j["properties"] = arr;
    return CommandResult{code, render_json(j), ""};
  });
}

/// Iterative supremum of u and v; exit 0 only for a converged, certified run.
inline CommandResult cmd_sup(const RunConfig& cfg) {
  return detail::guarded([&] {
    const auto& desc = detail::require_pair(cfg);
    if (!cfg.u || !cfg.v) io::config_error("sup needs vectors u and v");
    if (cfg.u->size() != desc.cone.dim() || cfg.v->size() != desc.cone.dim()) {
      io::config_error("u and v must match the cone dimension");
    }
    const RetractionPair pair = io::build_pair(desc, cfg.tolerances);
    const SupTrace tr = iterative_sup(pair, *cfg.u, *cfg.v, cfg.max_iter);
    const int code =
        (tr.status == SupStatus::Converged && tr.certified) ? 0 : 1;
    switch (cfg.format) {
      case OutputFormat::Csv:
        return CommandResult{code, io::trace_to_csv(tr), ""};
      case OutputFormat::Human: {
        std::ostringstream os;
        os << "sup of u=" << fmt_vec(tr.u) << " and v=" << fmt_vec(tr.v)
           << "\nstatus: " << status_name(tr.status)
           << ", iterations: " << tr.iterations
           << ", certified: " << (tr.certified ? "yes" : "no") << "\n";
        if (tr.result) os << "result: " << fmt_vec(*tr.result) << "\n";
        if (!tr.note.empty()) os << "note: " << tr.note << "\n";
        return CommandResult{code, os.str(), ""};
      }
      case OutputFormat::Json:
        break;
    }
    json j = header(cfg, "sup");
    j["pair"] = io::pair_to_json(desc);
    j["max_iter"] = cfg.max_iter;
    j["trace"] = io::trace_to_json(tr);
    return CommandResult{code, render_json(j), ""};
  });
}

/// Bounds used by the lexicographic demo: w_k = (k/4, 10k - 50), k = 1..10.
inline std::vector<LexPoint> default_lex_candidates() {
  std::vector<LexPoint> w;
  for (int k = 1; k <= 10; ++k) w.push_back({0.25 * k, 10.0 * k - 50.0});
  return w;
}

namespace detail {

inline CommandResult demo_lex(const RunConfig& cfg) {
  const LexDemoReport rep = lex_demo(100, default_lex_candidates());
  const int code = rep.ok() ? 0 : 1;
  if (cfg.format == OutputFormat::Human) {
    std::ostringstream os;
    os << "a_n = (0, n), n = 1.." << rep.n_terms << ": "
       << (rep.chain_increasing ? "lex-increasing" : "NOT increasing") << "\n";
    for (const auto& c : rep.candidates) {
      os << (c.is_upper_bound && c.smaller_is_upper_bound && c.strictly_smaller
                 ? "✓ "
                 : "✗ ")
         << "w=(" << c.bound.first << ", " << c.bound.second
         << ") bounds the chain; w'=(" << c.smaller.first << ", "
         << c.smaller.second << ") is a strictly smaller bound\n";
    }
    return CommandResult{code, os.str(), ""};
  }
  json j{{"command", "demo"}, {"demo", "lex"}};
  j["report"] = io::lex_report_to_json(rep);
  j["verdict"] = rep.ok() ? "pass" : "fail";
  return CommandResult{code, render_json(j), ""};
}

/// Probes whether range(N) of a Minkowski pair is closed under addition:
/// a = N x1, b = N x2 lie in range(N), and a + b does iff M(a + b) = 0.
inline std::optional<Witness> minkowski_range_nonconvexity(
    const RetractionPair& pair, const SampleConfig& cfg) {
  const ToleranceConfig& tol = pair.tol();
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    auto rng = make_rng(cfg.seed, stream_id("minkowski-range"), i);
    const Vec a = pair.N(gaussian_vec(pair.dim(), rng));
    const Vec b = pair.N(gaussian_vec(pair.dim(), rng));
    const double s = 1.0 + std::sqrt(a.squaredNorm() + b.squaredNorm());
    const double r = pair.M(Vec(a + b)).norm() / s;
    if (r > 10.0 * tol.eps_membership) {
      return Witness{Probe{"sum-leaves-range", a, b}, r};
    }
  }
  return std::nullopt;
}

inline CommandResult demo_minkowski(const RunConfig& cfg) {
  io::PairDescriptor desc;
  desc.family = Family::Minkowski;
  desc.cone = Cone::orthant(3);
  desc.interior_point = Vec::Ones(3);
  if (cfg.pair) {
    if (cfg.pair->family != Family::Minkowski) {
      io::config_error("the minkowski demo needs a minkowski pair descriptor");
    }
    desc = *cfg.pair;
  }
  const RetractionPair pair = io::build_pair(desc, cfg.tolerances);
  const SampleConfig sc = cfg.sampling();
  const PropertyReport polarity = check_mutual_polarity(pair, sc);
  const PropertyReport subadd = check_subadditive(pair, Which::M, sc);
  const bool generating = is_generating(pair.cone_m(), cfg.tolerances);
  const auto nonconvex = minkowski_range_nonconvexity(pair, sc);
  const bool ok = polarity.passed() && subadd.passed() &&
                  (pair.dim() < 2 || !generating);
  const int code = ok ? 0 : 1;
  if (cfg.format == OutputFormat::Human) {
    std::ostringstream os;
    os << "minkowski pair on " << desc.cone.type_name() << "("
       << desc.cone.dim() << "), y=" << fmt_vec(*desc.interior_point) << "\n"
       << human_report_line(polarity) << "\n"
       << human_report_line(subadd) << "\n"
       << "range(M) generating: " << (generating ? "yes" : "no") << "\n"
       << "range(N) closed under addition: "
       << (nonconvex ? "no" : "no counterexample found") << "\n";
    if (nonconvex) {
      os << "    witness a=" << fmt_vec(nonconvex->probe.x)
         << " b=" << fmt_vec(*nonconvex->probe.y) << "\n";
    }
    return CommandResult{code, os.str(), ""};
  }
  json j = header(cfg, "demo");
  j["demo"] = "minkowski";
  j["pair"] = io::pair_to_json(desc);
  j["mutual_polarity"] = io::report_to_json(polarity);
  j["subadditive_M"] = io::report_to_json(subadd);
  j["range_M_generating"] = generating;
  j["range_N_convex"] = nonconvex ? json(false) : json(nullptr);
  j["range_N_witness"] =
      nonconvex ? io::witness_to_json(*nonconvex) : json(nullptr);
  j["verdict"] = ok ? "pass" : "fail";
  return CommandResult{code, render_json(j), ""};
}

/// Cones of the subadditivity table, each flagged by whether it is an orthant.
inline std::vector<std::pair<Cone, bool>> moreau_subadd_cones() {
  Mat basis(2, 2);
  basis << 1.0, 1.0, 0.0, 1.0;
  return {{Cone::orthant(3), true},
          {Cone::lorentz(3), false},
          {Cone::simplicial(basis), false}};
}

inline CommandResult demo_moreau_subadd(const RunConfig& cfg) {
  const SampleConfig sc = cfg.sampling();
  bool ok = true;
  json rows = json::array();
  std::ostringstream os;
  os << "subadditivity of the metric projection onto K (" << sc.samples
     << " samples, seed " << sc.seed << ")\n";
  for (const auto& [cone, is_orthant] : moreau_subadd_cones()) {
    const RetractionPair pair = RetractionPair::moreau(cone, cfg.tolerances);
    const PropertyReport rep = check_subadditive(pair, Which::M, sc);
    const bool matches = rep.passed() == is_orthant;
    ok = ok && matches;
    rows.push_back(json{{"cone", io::cone_to_json(cone)},
                        {"orthant", is_orthant},
                        {"report", io::report_to_json(rep)},
                        {"matches_orthant_criterion", matches}});
    os << "  " << cone.type_name() << "(" << cone.dim() << ")  "
       << human_report_line(rep) << "\n";
  }
  const int code = ok ? 0 : 1;
  if (cfg.format == OutputFormat::Human) {
    os << (ok ? "verdicts match the orthant criterion\n"
              : "verdicts DO NOT match the orthant criterion\n");
    return CommandResult{code, os.str(), ""};
  }
  json j = header(cfg, "demo");
  j["demo"] = "moreau-subadd";
  j["table"] = rows;
  j["verdict"] = ok ? "pass" : "fail";
  return CommandResult{code, render_json(j), ""};
}

}  // namespace detail

inline CommandResult cmd_demo(const RunConfig& cfg) {
  return detail::guarded([&] {
    if (cfg.format == OutputFormat::Csv) {
      io::config_error("demo reports are JSON or human");
    }
    if (cfg.demo == "lex") return detail::demo_lex(cfg);
    if (cfg.demo == "minkowski") return detail::demo_minkowski(cfg);
    if (cfg.demo == "moreau-subadd") return detail::demo_moreau_subadd(cfg);
    io::config_error("unknown demo \"" + cfg.demo +
                     "\" (expected lex, minkowski or moreau-subadd)");
  });
}

inline CommandResult run_command(const RunConfig& cfg);

/// {"runs":[{"command":"verify"|"sup"|"demo", ...run config keys}, ...]}.
/// Every run is rendered as JSON; the exit code is the worst of the runs.
inline CommandResult cmd_batch(const json& batch, const RunConfig& base) {
  return detail::guarded([&] {
    io::require_keys(batch, {"runs"}, "batch");
    const json& runs = io::field(batch, "runs", "batch");
    if (!runs.is_array()) io::config_error("batch: runs must be an array");
    // Validate everything before running anything.
    std::vector<RunConfig> cfgs;
    for (const json& r : runs) {
      RunConfig c = base;
      c.command.clear();
      c.format = OutputFormat::Json;
      apply_config_json(r, c, true);
      if (c.command != "verify" && c.command != "sup" && c.command != "demo") {
        io::config_error("batch: each run needs command verify, sup or demo");
      }
      cfgs.push_back(std::move(c));
    }
    int code = 0;
    json results = json::array();
    for (const auto& c : cfgs) {
      const CommandResult r = run_command(c);
      code = std::max(code, r.exit_code);
      json entry{{"command", c.command}, {"exit_code", r.exit_code}};
      entry["report"] = r.output.empty() ? json(nullptr) : json::parse(r.output);
      if (!r.error.empty()) entry["error"] = r.error;
      results.push_back(entry);
    }
    return CommandResult{code, render_json(json{{"results", results}}), ""};
  });
}

inline CommandResult run_command(const RunConfig& cfg) {
  if (cfg.command == "verify") return cmd_verify(cfg);
  if (cfg.command == "sup") return cmd_sup(cfg);
  if (cfg.command == "demo") return cmd_demo(cfg);
  return CommandResult{2, "", "unknown command \"" + cfg.command + "\""};
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) io::config_error("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    io::config_error("malformed JSON in " + path + ": " + e.what());
  }
}

}  // namespace conelab::cli
