// conelab command-line entry point. See README.md for usage.

#include "conelab/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using conelab::cli::RunConfig;

struct Flags {
  std::string config;
  std::string pair;
  std::string cone;
  std::vector<double> interior;
  std::vector<double> u;
  std::vector<double> v;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::string out;
  std::string format = "json";
  int max_iter = 100;
  std::string demo;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Run config JSON file");
  sub->add_option("--pair", f.pair, "Pair family: lattice, moreau, minkowski");
  sub->add_option("--cone", f.cone, "Cone JSON file");
  sub->add_option("--interior", f.interior,
                  "Interior point for the minkowski family")
      ->delimiter(',');
  sub->add_option("--samples", f.samples, "Samples per property")
      ->default_val(1000);
  sub->add_option("--seed", f.seed, "Sampling seed")->default_val(0);
  sub->add_option("--tol", f.tol, "Membership and equality tolerance")
      ->default_val(1e-8);
  sub->add_option("--out", f.out, "Write the report here instead of stdout");
  sub->add_option("--format", f.format, "json, csv (sup traces) or human")
      ->default_val("json");
  sub->add_option("--max-iter", f.max_iter, "Iteration cap for sup")
      ->default_val(100);
}

/// Config file first, then explicitly given flags on top.
RunConfig assemble(const std::string& command, const Flags& f,
                   const CLI::App& sub) {
  RunConfig cfg;
  cfg.command = command;
  cfg.threads = conelab::threads_from_env();
  if (!f.config.empty()) {
    conelab::cli::apply_config_json(conelab::cli::load_json_file(f.config),
                                    cfg);
  }
  auto given = [&](const char* name) {
    const CLI::Option* opt = sub.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--samples")) cfg.samples = f.samples;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--tol")) {
    cfg.tolerances.eps_membership = f.tol;
    cfg.tolerances.eps_equal = f.tol;
    cfg.tolerances.validate();
  }
  if (given("--max-iter")) cfg.max_iter = f.max_iter;
  cfg.format = conelab::cli::format_from_string(f.format);
  if (given("--pair") || given("--cone")) {
    if (f.pair.empty() || f.cone.empty()) {
      conelab::io::config_error("--pair and --cone must be given together");
    }
    nlohmann::json desc{{"family", f.pair},
                        {"cone", conelab::cli::load_json_file(f.cone)}};
    if (!f.interior.empty()) desc["interior_point"] = f.interior;
    cfg.pair = conelab::io::pair_from_json(desc);
  }
  if (given("--u")) cfg.u = conelab::from_std(f.u);
  if (given("--v")) cfg.v = conelab::from_std(f.v);
  if (!f.demo.empty()) cfg.demo = f.demo;
  return cfg;
}

std::string catalogue_help() {
  std::string s = "Property catalogue keys:\n";
  for (const auto& [key, what] : conelab::property_catalogue()) {
    s += "  " + key + std::string(22 - std::min<std::size_t>(21, key.size()), ' ') +
         what + "\n";
  }
  s += "Exit codes: 0 all checks pass, 1 property violated or no convergence,"
       " 2 usage or config error.";
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retraction pairs on convex cones: property checks and "
               "lattice suprema"};
  app.footer(catalogue_help());
  app.require_subcommand(1);

  Flags f;
  auto* verify = app.add_subcommand("verify", "Run the property catalogue");
  auto* sup = app.add_subcommand("sup", "Iterative supremum of u and v");
  auto* demo = app.add_subcommand("demo", "Run a demo: lex, minkowski, moreau-subadd");
  auto* batch = app.add_subcommand("batch", "Run a list of configs from --config");
  for (auto* sub : {verify, sup, demo, batch}) add_common(sub, f);
  sup->add_option("--u", f.u, "First vector, comma separated")->delimiter(',');
  sup->add_option("--v", f.v, "Second vector, comma separated")->delimiter(',');
  demo->add_option("name", f.demo, "lex, minkowski or moreau-subadd");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  conelab::cli::CommandResult result;
  try {
    if (batch->parsed()) {
      if (f.config.empty()) conelab::io::config_error("batch needs --config");
      // Flags given to batch become defaults for every run in the file.
      Flags defaults = f;
      defaults.config.clear();
      RunConfig base = assemble("batch", defaults, *batch);
      result = conelab::cli::cmd_batch(conelab::cli::load_json_file(f.config),
                                       base);
    } else {
      CLI::App* sub = verify->parsed() ? verify : sup->parsed() ? sup : demo;
      result = conelab::cli::run_command(assemble(sub->get_name(), f, *sub));
    }
  } catch (const conelab::Error& e) {
    result = {2, "", e.what()};
  } catch (const std::exception& e) {
    result = {2, "", e.what()};
  }

  if (!result.error.empty()) std::cerr << "error: " << result.error << "\n";
  if (!result.output.empty()) {
    if (f.out.empty()) {
      std::cout << result.output;
    } else {
      std::ofstream os(f.out);
      if (!os) {
        std::cerr << "error: cannot write " << f.out << "\n";
        return 2;
      }
      os << result.output;
    }
  }
  return result.exit_code;
}
