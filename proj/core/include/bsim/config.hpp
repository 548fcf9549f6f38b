#ifndef BSIM_CONFIG_HPP
#define BSIM_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsim/initialize.hpp"
#include "bsim/iwls.hpp"
#include "bsim/sampler.hpp"
#include "bsim/spline.hpp"
#include "bsim/synth.hpp"

namespace bsim {

/// Flat `key = value` configuration text. Blank lines and lines starting
/// with '#' are ignored; a later duplicate key overrides an earlier one.
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text);
  static ConfigFile load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& get(const std::string& key) const;
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Everything `bsim fit` needs. Keys and defaults are listed in README.md.
struct RunConfig {
  std::string data_path;
  std::string outcome_col = "y";
  std::string arm_col = "a";
  std::string id_col;
  std::vector<std::string> main_cols;
  std::vector<std::string> index_cols;

  std::string family = "bernoulli";
  SplineSettings spline;
  std::optional<double> pi1_override;

  double rho_grid_min = 1e-4;
  double rho_grid_max = 1e4;
  int rho_grid_points = 25;
  ScoringOptions scoring;

  double lambda_prior = 300.0;
  double lambda_prop = 300.0;
  std::optional<std::vector<double>> beta0;  // nullopt means "auto"
  double m_prior_sd = 10.0;

  ChainConfig chain;
  unsigned threads = 0;
  std::string out_dir = "bsim_out";

  // Unknown keys are rejected.
  static RunConfig from(const ConfigFile& file);

  // Every key with its effective value, one `key = value` per line, sorted.
  std::string canonical_text() const;
  std::map<std::string, std::string> canonical_values() const;
};

// Scenario keys: n, p, pi1, family, intercept, m_star, beta_star, g_shape,
// g_amplitude, noise_sd, seed. beta_star is normalised.
Scenario scenario_from(const ConfigFile& file);

std::uint64_t fnv1a64(const std::string& text);

std::vector<std::string> split_list(const std::string& text);
std::vector<double> parse_number_list(const std::string& text,
                                      const std::string& key);

}  // namespace bsim

#endif  // BSIM_CONFIG_HPP
