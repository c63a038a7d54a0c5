#include "conelab/cli.hpp"

#include <gtest/gtest.h>

using conelab::Cone;
using conelab::Mat;
using conelab::Vec;
using conelab::cli::CommandResult;
using conelab::cli::RunConfig;
using json = nlohmann::json;
namespace io = conelab::io;

namespace {

std::string config_path(const std::string& name) {
  return std::string(CONELAB_CONFIG_DIR) + "/" + name;
}

RunConfig verify_config(const std::string& pair_json, std::uint64_t seed = 0,
                        std::size_t samples = 200) {
  RunConfig cfg;
  cfg.command = "verify";
  cfg.pair = io::pair_from_json(json::parse(pair_json));
  cfg.seed = seed;
  cfg.samples = samples;
  return cfg;
}

bool vec_eq(const Vec& a, const Vec& b) {
  return a.size() == b.size() && (a.size() == 0 || a == b);
}

}  // namespace

TEST(ConeJson, RoundTripsEveryVariant) {
  auto rng = conelab::make_rng(17);
  std::uniform_int_distribution<int> dim(1, 5);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = dim(rng);
    Mat g(m, m + 1);
    for (int j = 0; j <= m; ++j) g.col(j) = conelab::gaussian_vec(m, rng);
    Mat basis = conelab::simplicial_basis(conelab::sample_simplicial(m, trial));
    std::vector<Cone> cones{Cone::orthant(m), Cone::orthant(m).negated(),
                            Cone::simplicial(basis), Cone::generators(g),
                            Cone::halfspaces(g)};
    if (m >= 2) cones.push_back(Cone::lorentz(m).negated());
    for (const Cone& c : cones) {
      const json j = io::cone_to_json(c);
      const Cone back = io::cone_from_json(json::parse(j.dump()));
      EXPECT_EQ(io::cone_to_json(back), j) << j.dump();
    }
  }
}

TEST(ConeJson, RejectsBadInput) {
  EXPECT_THROW(io::cone_from_json(json::parse(R"({"type":"orthant"})")),
               conelab::Error);
  EXPECT_THROW(io::cone_from_json(json::parse(R"({"type":"orthant","dim":2,"extra":1})")),
               conelab::Error);
  EXPECT_THROW(io::cone_from_json(json::parse(R"({"type":"cube","dim":2})")),
               conelab::Error);
  EXPECT_THROW(io::cone_from_json(json::parse(R"({"type":"simplicial","basis":[[1,0],[2,0]]})")),
               conelab::Error);
  EXPECT_THROW(io::cone_from_json(json::parse(R"({"type":"generators","vectors":[[1,0],[1]]})")),
               conelab::Error);
}

TEST(PairJson, RoundTripAndValidation) {
  const json j = json::parse(
      R"({"family":"minkowski","cone":{"type":"orthant","dim":3},"interior_point":[1,1,1]})");
  const auto d = io::pair_from_json(j);
  EXPECT_EQ(io::pair_to_json(d), j);
  EXPECT_THROW(io::pair_from_json(json::parse(
                   R"({"family":"minkowski","cone":{"type":"orthant","dim":3}})")),
               conelab::Error);
  EXPECT_THROW(io::pair_from_json(json::parse(
                   R"({"family":"lattice","cone":{"type":"orthant","dim":2},"interior_point":[1,1]})")),
               conelab::Error);
  EXPECT_THROW(io::pair_from_json(json::parse(R"({"family":"lattice"})")),
               conelab::Error);
}

TEST(WitnessJson, RoundTrip) {
  auto rng = conelab::make_rng(2);
  for (int i = 0; i < 50; ++i) {
    conelab::Witness w;
    w.probe.kind = i % 2 ? "xy" : "x";
    w.probe.x = conelab::gaussian_vec(1 + i % 4, rng);
    if (i % 2) w.probe.y = conelab::gaussian_vec(1 + i % 4, rng);
    w.residual = std::abs(conelab::gaussian_vec(1, rng)[0]);
    const auto back = io::witness_from_json(json::parse(io::witness_to_json(w).dump()));
    EXPECT_EQ(back.probe.kind, w.probe.kind);
    EXPECT_TRUE(vec_eq(back.probe.x, w.probe.x));
    EXPECT_EQ(back.probe.y.has_value(), w.probe.y.has_value());
    if (w.probe.y) EXPECT_TRUE(vec_eq(*back.probe.y, *w.probe.y));
    EXPECT_EQ(back.residual, w.residual);
  }
}

TEST(TolerancesJson, MergesAndValidates) {
  const auto t = io::tolerances_from_json(json::parse(R"({"eps_equal":1e-6})"));
  EXPECT_EQ(t.eps_equal, 1e-6);
  EXPECT_EQ(t.eps_membership, 1e-8);
  EXPECT_THROW(io::tolerances_from_json(json::parse(R"({"eps_equal":-1})")),
               conelab::Error);
  EXPECT_THROW(io::tolerances_from_json(json::parse(R"({"eps_converge":1e-20})")),
               conelab::Error);
}

TEST(TraceCsv, HeaderAndRows) {
  const auto p = conelab::RetractionPair::lattice(Cone::orthant(2));
  const auto tr = conelab::iterative_sup(p, Vec::Unit(2, 0), Vec::Unit(2, 1));
  const std::string csv = io::trace_to_csv(tr);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "sequence,index,x0,x1");
  EXPECT_NE(csv.find("u,0,1,0\n"), std::string::npos);
  EXPECT_NE(csv.find("v,0,0,1\n"), std::string::npos);
  EXPECT_NE(csv.find("u,1,1,1\n"), std::string::npos);
}

TEST(RunConfigJson, UnknownKeysRejected) {
  RunConfig cfg;
  EXPECT_THROW(conelab::cli::apply_config_json(json::parse(R"({"seeds":1})"), cfg),
               conelab::Error);
  EXPECT_THROW(conelab::cli::apply_config_json(json::parse(R"({"command":"verify"})"), cfg),
               conelab::Error);
  EXPECT_THROW(conelab::cli::apply_config_json(json::parse(R"({"seed":-1})"), cfg),
               conelab::Error);
}

TEST(Verify, LatticeOrthantSeedSevenExitsZero) {
  const auto r = conelab::cli::cmd_verify(
      verify_config(R"({"family":"lattice","cone":{"type":"orthant","dim":4}})", 7, 1000));
  EXPECT_EQ(r.exit_code, 0) << r.error;
  const json j = json::parse(r.output);
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["samples"], 1000);
  EXPECT_TRUE(j["tolerances"].contains("eps_membership"));
  for (const auto& p : j["properties"]) {
    EXPECT_EQ(p["verdict"], "pass") << p["property"];
    EXPECT_EQ(p["witnesses"].size(), 0u);
  }
}

TEST(Verify, MoreauLorentzExitsOneWithWitness) {
  const auto r = conelab::cli::cmd_verify(
      verify_config(R"({"family":"moreau","cone":{"type":"lorentz","dim":3}})", 0, 1000));
  EXPECT_EQ(r.exit_code, 1) << r.error;
  const json j = json::parse(r.output);
  bool found = false;
  for (const auto& p : j["properties"]) {
    if (p["property"] == "subadditive.M") {
      EXPECT_EQ(p["verdict"], "fail");
      EXPECT_FALSE(p["witnesses"].empty());
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Verify, MissingPairIsConfigError) {
  RunConfig cfg;
  cfg.command = "verify";
  const auto r = conelab::cli::cmd_verify(cfg);
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_FALSE(r.error.empty());
}

TEST(Verify, MissingConeKeyInFileIsConfigError) {
  RunConfig cfg;
  cfg.command = "verify";
  EXPECT_THROW(conelab::cli::apply_config_json(
                   conelab::cli::load_json_file(config_path("invalid_missing_cone.json")),
                   cfg),
               conelab::Error);
}

TEST(Verify, ByteIdenticalAcrossRunsAndThreads) {
  auto cfg = verify_config(R"({"family":"moreau","cone":{"type":"lorentz","dim":3}})", 5, 300);
  cfg.threads = 1;
  const auto a = conelab::cli::cmd_verify(cfg);
  const auto b = conelab::cli::cmd_verify(cfg);
  cfg.threads = 3;
  const auto c = conelab::cli::cmd_verify(cfg);
  EXPECT_EQ(a.output, b.output);
  EXPECT_EQ(a.output, c.output);
}

TEST(Verify, CsvFormatRejected) {
  auto cfg = verify_config(R"({"family":"lattice","cone":{"type":"orthant","dim":2}})");
  cfg.format = conelab::cli::OutputFormat::Csv;
  EXPECT_EQ(conelab::cli::cmd_verify(cfg).exit_code, 2);
}

TEST(Sup, OrthantExampleAndZero) {
  RunConfig cfg;
  cfg.command = "sup";
  conelab::cli::apply_config_json(conelab::cli::load_json_file(config_path("sup_orthant.json")),
                                  cfg);
  auto r = conelab::cli::cmd_sup(cfg);
  ASSERT_EQ(r.exit_code, 0) << r.error;
  json j = json::parse(r.output);
  EXPECT_EQ(j["trace"]["status"], "converged");
  EXPECT_EQ(j["trace"]["result"], json::parse("[1.0,1.0]"));

  cfg.u = Vec::Zero(2);
  cfg.v = Vec::Zero(2);
  r = conelab::cli::cmd_sup(cfg);
  ASSERT_EQ(r.exit_code, 0);
  j = json::parse(r.output);
  EXPECT_EQ(j["trace"]["result"], json::parse("[0.0,0.0]"));

  cfg.v = Vec::Zero(3);
  EXPECT_EQ(conelab::cli::cmd_sup(cfg).exit_code, 2);
}

TEST(Sup, MoreauLorentzExitReflectsCertification) {
  RunConfig cfg;
  cfg.command = "sup";
  cfg.pair = io::pair_from_json(
      json::parse(R"({"family":"moreau","cone":{"type":"lorentz","dim":3}})"));
  cfg.u = Vec::Unit(3, 0);
  cfg.v = Vec::Unit(3, 1);
  const auto r = conelab::cli::cmd_sup(cfg);
  const json tr = json::parse(r.output)["trace"];
  const bool good = tr["status"] == "converged" && tr["certified"] == true;
  EXPECT_EQ(r.exit_code, good ? 0 : 1);
}

TEST(Demo, Lex) {
  RunConfig cfg;
  cfg.command = "demo";
  cfg.demo = "lex";
  const auto r = conelab::cli::cmd_demo(cfg);
  EXPECT_EQ(r.exit_code, 0) << r.error;
  const json j = json::parse(r.output);
  EXPECT_NE(r.output.find("candidates"), std::string::npos);
  EXPECT_EQ(j.dump().find("false"), std::string::npos);
}

TEST(Demo, Minkowski) {
  RunConfig cfg;
  cfg.command = "demo";
  cfg.demo = "minkowski";
  cfg.samples = 500;
  const auto r = conelab::cli::cmd_demo(cfg);
  EXPECT_EQ(r.exit_code, 0) << r.error << r.output;
  const json j = json::parse(r.output);
  EXPECT_NE(j.dump().find("generating"), std::string::npos);
}

TEST(Demo, MoreauSubadd) {
  RunConfig cfg;
  cfg.command = "demo";
  cfg.demo = "moreau-subadd";
  cfg.samples = 10000;
  cfg.format = conelab::cli::OutputFormat::Human;
  const auto r = conelab::cli::cmd_demo(cfg);
  EXPECT_EQ(r.exit_code, 0) << r.error << r.output;
  EXPECT_NE(r.output.find("orthant"), std::string::npos);
  EXPECT_NE(r.output.find("lorentz"), std::string::npos);
}

TEST(Demo, UnknownNameIsConfigError) {
  RunConfig cfg;
  cfg.command = "demo";
  cfg.demo = "nope";
  EXPECT_EQ(conelab::cli::cmd_demo(cfg).exit_code, 2);
}

TEST(Batch, RunsEveryEntryAndReportsWorstExit) {
  RunConfig base;
  base.samples = 200;
  const auto r = conelab::cli::cmd_batch(
      conelab::cli::load_json_file(config_path("batch.json")), base);
  EXPECT_EQ(r.exit_code, 1) << r.error;
  const json j = json::parse(r.output);
  ASSERT_EQ(j["results"].size(), 4u);
  EXPECT_EQ(j["results"][0]["exit_code"], 0);
  EXPECT_EQ(j["results"][1]["exit_code"], 1);
  EXPECT_EQ(j["results"][2]["exit_code"], 0);
  EXPECT_EQ(j["results"][3]["exit_code"], 0);
}

TEST(Batch, InvalidEntryAbortsBeforeRunning) {
  const json bad = json::parse(R"({"runs":[{"command":"verify","bogus":1}]})");
  EXPECT_EQ(conelab::cli::cmd_batch(bad, RunConfig{}).exit_code, 2);
  EXPECT_EQ(conelab::cli::cmd_batch(json::parse(R"({"runs":[{}]})"), RunConfig{}).exit_code,
            2);
}

TEST(LoadJson, MissingAndMalformedFiles) {
  EXPECT_THROW(conelab::cli::load_json_file(config_path("does_not_exist.json")),
               conelab::Error);
}
