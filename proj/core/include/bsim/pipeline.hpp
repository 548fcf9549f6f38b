#ifndef BSIM_PIPELINE_HPP
#define BSIM_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "bsim/archive.hpp"
#include "bsim/config.hpp"
#include "bsim/inference.hpp"
#include "bsim/initialize.hpp"

namespace bsim {

IngestOptions fit_ingest_options(const RunConfig& config);

struct FitOutputs {
  std::string out_dir;
  Dataset data;
  std::optional<Initialization> init;
  HyperParameters hyper;
  PosteriorDraws draws;
  Summary summary;
  std::size_t rows_dropped = 0;
};

/// ingest -> initialise -> run chains -> summarise, writing into
/// config.out_dir: draws.bin, coefficients.csv, subject_scores.csv,
/// figure_left.csv, figure_right.csv and run.json.
FitOutputs run_fit(const RunConfig& config);

/// Scores new rows against a saved archive and writes the subject-score
/// columns plus `extrapolated` to out_path. The new data must carry every
/// covariate column the model was fitted with; outcome and arm are ignored.
std::vector<SubjectScore> run_score(const std::string& model_path,
                                    const std::string& data_path,
                                    const std::string& out_path);

/// Coefficient table rebuilt from an archive alone.
Summary summarize_archive(const ModelArchive& archive);

Dataset run_synth(const Scenario& scenario, const std::string& out_path);

}  // namespace bsim

#endif  // BSIM_PIPELINE_HPP
