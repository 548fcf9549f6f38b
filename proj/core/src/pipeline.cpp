#include "bsim/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "bsim/errors.hpp"
#include "bsim/logging.hpp"
#include "bsim/report.hpp"

namespace bsim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector sign_reference_for(double lambda_prior, const Vector& beta_init) {
  return lambda_prior == 0.0 ? beta_init : Vector();
}

}  // namespace

IngestOptions fit_ingest_options(const RunConfig& config) {
  IngestOptions o;
  o.outcome_col = config.outcome_col;
  o.arm_col = config.arm_col;
  o.id_col = config.id_col;
  o.main_cols = config.main_cols;
  o.index_cols = config.index_cols;
  o.pi1_override = config.pi1_override;
  return o;
}

FitOutputs run_fit(const RunConfig& config) {
  const auto t_start = Clock::now();
  if (config.data_path.empty()) throw ConfigError("config key 'data' is required");

  FitOutputs out;
  out.out_dir = config.out_dir;
  auto report = ingest_csv(config.data_path, fit_ingest_options(config));
  out.data = std::move(report.data);
  out.rows_dropped = report.rows_dropped;
  const Dataset& data = out.data;

  const Family family = Family::from_name(config.family);
  family.check_response(data.y);

  InitOptions init_options;
  init_options.spline = config.spline;
  init_options.scoring = config.scoring;
  init_options.rho_grid = log_spaced_grid(config.rho_grid_min, config.rho_grid_max,
                                          config.rho_grid_points);
  if (config.beta0) {
    if (static_cast<Eigen::Index>(config.beta0->size()) != data.x_index.cols()) {
      throw ConfigError("beta0 must have one entry per index covariate");
    }
    Vector b = Eigen::Map<const Vector>(config.beta0->data(),
                                        static_cast<Eigen::Index>(config.beta0->size()));
    if (!(b.norm() > 0.0)) throw ConfigError("beta0 must be nonzero");
    init_options.beta0 = b / b.norm();
  }

  const auto t_init = Clock::now();
  out.init = initialize(data, family, init_options);
  const Initialization& init = *out.init;
  const double init_seconds = seconds_since(t_init);

  HyperParameters& hyper = out.hyper;
  hyper.lambda_prior = config.lambda_prior;
  hyper.lambda_prop = config.lambda_prop;
  hyper.beta0 = init_options.beta0 ? *init_options.beta0 : init.linear_direction;
  hyper.m0 = Vector::Zero(data.x_main.cols());
  hyper.q = config.m_prior_sd * config.m_prior_sd *
            Matrix::Identity(data.x_main.cols(), data.x_main.cols());
  hyper.rho = init.rho;

  const auto t_sample = Clock::now();
  const GibbsSampler sampler(data, init.family, init.system, hyper, config.scoring);
  out.draws = run_chains(sampler, init.state, config.chain, config.threads);
  const double sample_seconds = seconds_since(t_sample);
  if (out.draws.rejected_on_error > 0) {
    log_warning(std::to_string(out.draws.rejected_on_error) +
                " beta proposal(s) failed to score and were rejected");
  }

  const auto t_summary = Clock::now();
  SummaryOptions summary_options;
  summary_options.sign_reference =
      sign_reference_for(config.lambda_prior, init.state.beta);
  out.summary = summarize(out.draws, data, init.system, init.family, summary_options);
  const double summary_seconds = seconds_since(t_summary);

  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path dir(config.out_dir);

  ModelArchive archive;
  archive.config_text = config.canonical_text();
  archive.config_hash = fnv1a64(archive.config_text);
  archive.seed = config.chain.seed;
  archive.family_kind = init.family.kind();
  archive.dispersion = init.family.dispersion();
  archive.degree = init.system.basis().degree();
  archive.knots = init.system.basis().knots();
  archive.pi0 = init.system.pi0();
  archive.pi1 = init.system.pi1();
  archive.rho = init.rho;
  archive.lambda_prior = hyper.lambda_prior;
  archive.main_names = data.main_names;
  archive.index_names = data.index_names;
  archive.beta0 = hyper.beta0;
  archive.beta_init = init.state.beta;
  archive.n_chains = config.chain.n_chains;
  archive.draws = out.draws;
  write_archive((dir / "draws.bin").string(), archive);

  write_coefficients_csv((dir / "coefficients.csv").string(), out.summary);
  write_subject_scores_csv((dir / "subject_scores.csv").string(), out.summary.subjects);
  write_figure_left_csv((dir / "figure_left.csv").string(), out.summary);
  write_figure_right_csv((dir / "figure_right.csv").string(), out.summary);

  int disagreements = 0;
  for (const auto& s : out.summary.subjects) {
    if (s.decision != s.decision_mean_rule) ++disagreements;
  }

  nlohmann::ordered_json run;
  run["config_hash"] = archive.config_hash;
  run["seed"] = config.chain.seed;
  run["config"] = config.canonical_values();
  run["n_subjects"] = data.n();
  run["rows_read"] = report.rows_read;
  run["rows_dropped"] = out.rows_dropped;
  run["pi0"] = data.pi0;
  run["pi1"] = data.pi1;
  run["family"] = std::string(init.family.name());
  run["dispersion"] = init.family.dispersion();
  run["rho"] = init.rho;
  run["knots"] = init.system.basis().knots();
  run["beta0"] = to_std(hyper.beta0);
  run["beta0_source"] = init_options.beta0 ? "config" : "auto";
  run["beta_init"] = to_std(init.state.beta);
  run["init_converged"] = init.converged;
  run["init_outer_iterations"] = init.outer_iterations;
  run["n_draws"] = out.draws.states.size();
  run["acceptance_rate"] = out.draws.acceptance_rate;
  run["chain_acceptance"] = out.draws.chain_acceptance;
  run["rejected_on_error"] = out.draws.rejected_on_error;
  run["unconverged_scoring"] = out.draws.unconverged_scoring;
  run["decision_rule_disagreements"] = disagreements;
  auto& diag = run["diagnostics"];
  diag = nlohmann::ordered_json::array();
  const auto& d = out.draws.diagnostics;
  for (std::size_t k = 0; k < d.names.size(); ++k) {
    diag.push_back({{"parameter", d.names[k]},
                    {"ess", d.ess[k]},
                    {"split_rhat", d.split_rhat[k]}});
  }
  run["timings_seconds"] = {{"initialize", init_seconds},
                            {"sampling", sample_seconds},
                            {"summary", summary_seconds},
                            {"total", seconds_since(t_start)}};
  std::ofstream json((dir / "run.json").string(), std::ios::trunc);
  if (!json) throw DataError("cannot write run.json");
  json << run.dump(2) << '\n';
  return out;
}

Summary summarize_archive(const ModelArchive& archive) {
  Summary s;
  s.beta = summarize_coefficients(
      archive.index_names, archive.draws, true,
      sign_reference_for(archive.lambda_prior, archive.beta_init));
  s.m = summarize_coefficients(archive.main_names, archive.draws, false);
  return s;
}

std::vector<SubjectScore> run_score(const std::string& model_path,
                                    const std::string& data_path,
                                    const std::string& out_path) {
  const ModelArchive archive = read_archive(model_path);
  const RunConfig config = RunConfig::from(ConfigFile::parse(archive.config_text));

  std::vector<SubjectScore> scores;
  if (std::filesystem::exists(data_path) &&
      std::filesystem::file_size(data_path) == 0) {
    write_subject_scores_csv(out_path, scores, true);
    return scores;
  }

  IngestOptions options = fit_ingest_options(config);
  options.outcome_col.clear();
  options.arm_col.clear();
  options.require_both_arms = false;
  options.pi1_override.reset();
  Dataset data;
  try {
    data = ingest_csv(data_path, options).data;
  } catch (const DataError& e) {
    throw DataError(std::string("schema mismatch with fitted model: ") + e.what());
  }
  if (data.main_names != archive.main_names ||
      data.index_names != archive.index_names) {
    throw DataError("schema mismatch: covariate columns differ from the model");
  }
  if (data.n() > 0) {
    scores = score_subjects(data, archive.draws, archive.system(), archive.family());
  }
  write_subject_scores_csv(out_path, scores, true);
  return scores;
}

Dataset run_synth(const Scenario& scenario, const std::string& out_path) {
  Dataset data = generate(scenario);
  const auto parent = std::filesystem::path(out_path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  write_dataset_csv(data, out_path);
  return data;
}

}  // namespace bsim
