#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "bsim/config.hpp"
#include "bsim/errors.hpp"
#include "bsim/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kNumerical = 3;

struct Args {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string model;
  std::string data;
};

int cmd_fit(const Args& args) {
  auto file = bsim::ConfigFile::load(args.config);
  auto config = bsim::RunConfig::from(file);
  if (args.seed) config.chain.seed = *args.seed;
  if (!args.out.empty()) config.out_dir = args.out;
  // relative data paths resolve against the config file's directory
  std::filesystem::path data(config.data_path);
  if (!config.data_path.empty() && data.is_relative() && !std::filesystem::exists(data)) {
    auto alt = std::filesystem::path(args.config).parent_path() / data;
    if (std::filesystem::exists(alt)) config.data_path = alt.string();
  }
  const auto out = bsim::run_fit(config);
  std::printf("fit: n=%zu draws=%zu acceptance=%.3f out=%s\n", out.data.y.size(),
              out.draws.states.size(), out.draws.acceptance_rate,
              config.out_dir.c_str());
  return kOk;
}

int cmd_score(const Args& args) {
  const auto out = args.out.empty() ? std::string("scores.csv") : args.out;
  const auto scores = bsim::run_score(args.model, args.data, out);
  std::printf("score: rows=%zu out=%s\n", scores.size(), out.c_str());
  return kOk;
}

int cmd_synth(const Args& args) {
  auto file = bsim::ConfigFile::load(args.config);
  auto scenario = bsim::scenario_from(file);
  if (args.seed) scenario.seed = *args.seed;
  std::string out = args.out;
  if (out.empty()) out = file.has("out") ? file.get("out") : "synth.csv";
  const auto data = bsim::run_synth(scenario, out);
  std::printf("synth: n=%zu pi1=%.4f out=%s\n", data.y.size(), data.pi1, out.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian single-index model for treatment-effect heterogeneity"};
  app.require_subcommand(1);
  Args args;

  auto* fit = app.add_subcommand("fit", "fit the model and write posterior artifacts");
  fit->add_option("--config", args.config, "run configuration file")->required()->check(CLI::ExistingFile);
  fit->add_option("--seed", args.seed, "rng seed (overrides config)");
  fit->add_option("--out", args.out, "output directory (overrides config)");

  auto* score = app.add_subcommand("score", "score new rows against a fitted model");
  score->add_option("--model", args.model, "draws.bin from a previous fit")->required();
  score->add_option("--data", args.data, "CSV with the model's covariate columns")->required();
  score->add_option("--out", args.out, "output CSV (default scores.csv)");
  score->add_option("--config", args.config, "ignored; the model carries its config");
  score->add_option("--seed", args.seed, "ignored; scoring is deterministic");

  auto* synth = app.add_subcommand("synth", "simulate a randomized-trial dataset");
  synth->add_option("--config", args.config, "scenario file")->required()->check(CLI::ExistingFile);
  synth->add_option("--seed", args.seed, "rng seed (overrides config)");
  synth->add_option("--out", args.out, "output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*fit) return cmd_fit(args);
    if (*score) return cmd_score(args);
    return cmd_synth(args);
  } catch (const bsim::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const bsim::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const bsim::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const bsim::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
