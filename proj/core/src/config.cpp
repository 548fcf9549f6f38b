#include "bsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bsim/errors.hpp"
#include "bsim/report.hpp"

namespace bsim {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& key) {
  double v = 0.0;
  const std::string t = trim(text);
  const char* first = t.data();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError("key '" + key + "': '" + text + "' is not a number");
  }
  return v;
}

long long parse_integer(const std::string& text, const std::string& key) {
  long long v = 0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& key) {
  std::uint64_t v = 0;
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("key '" + key + "': '" + text +
                      "' is not a non-negative integer");
  }
  return v;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ",";
    out += items[i];
  }
  return out;
}

std::string join_numbers(const std::vector<double>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ",";
    out += format_number(items[i]);
  }
  return out;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile file;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    file.values_[key] = trim(t.substr(eq + 1));
  }
  return file;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

const std::string& ConfigFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_number_list(const std::string& text,
                                      const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(item, key));
  return out;
}

RunConfig RunConfig::from(const ConfigFile& file) {
  static const std::set<std::string> known = {
      "data", "outcome_col", "arm_col", "id_col", "main_cols", "index_cols",
      "family", "n_basis", "spline_degree", "knot_padding", "pi_override",
      "rho_grid_min", "rho_grid_max", "rho_grid_points", "scoring_tol",
      "scoring_max_iter", "lambda_prior", "lambda_prop", "beta0",
      "m_prior_sd", "n_iter", "burn_in", "thin", "n_chains", "seed",
      "threads", "out"};
  for (const auto& [key, value] : file.values()) {
    if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }

  RunConfig c;
  const auto str = [&](const char* key, std::string& target) {
    if (file.has(key)) target = file.get(key);
  };
  const auto num = [&](const char* key, double& target) {
    if (file.has(key)) target = parse_double(file.get(key), key);
  };
  const auto integer = [&](const char* key, int& target) {
    if (file.has(key)) target = static_cast<int>(parse_integer(file.get(key), key));
  };

  str("data", c.data_path);
  str("outcome_col", c.outcome_col);
  str("arm_col", c.arm_col);
  str("id_col", c.id_col);
  if (file.has("main_cols")) c.main_cols = split_list(file.get("main_cols"));
  if (file.has("index_cols")) c.index_cols = split_list(file.get("index_cols"));
  str("family", c.family);
  (void)Family::from_name(c.family);

  integer("n_basis", c.spline.n_basis);
  integer("spline_degree", c.spline.degree);
  num("knot_padding", c.spline.knot_padding);
  if (file.has("pi_override")) {
    const auto& v = file.get("pi_override");
    if (v != "none" && !v.empty()) {
      const auto pis = parse_number_list(v, "pi_override");
      if (pis.size() == 1) {
        c.pi1_override = pis[0];
      } else if (pis.size() == 2 && std::abs(pis[0] + pis[1] - 1.0) < 1e-9) {
        c.pi1_override = pis[1];
      } else {
        throw ConfigError("pi_override: expected pi1 or 'pi0,pi1' summing to 1");
      }
      if (!(*c.pi1_override > 0.0 && *c.pi1_override < 1.0)) {
        throw ConfigError("pi_override: probabilities must lie in (0,1)");
      }
    }
  }

  num("rho_grid_min", c.rho_grid_min);
  num("rho_grid_max", c.rho_grid_max);
  integer("rho_grid_points", c.rho_grid_points);
  num("scoring_tol", c.scoring.tol);
  integer("scoring_max_iter", c.scoring.max_iter);

  num("lambda_prior", c.lambda_prior);
  num("lambda_prop", c.lambda_prop);
  if (file.has("beta0")) {
    const auto& v = file.get("beta0");
    if (v != "auto") c.beta0 = parse_number_list(v, "beta0");
  }
  num("m_prior_sd", c.m_prior_sd);

  integer("n_iter", c.chain.n_iter);
  integer("burn_in", c.chain.burn_in);
  integer("thin", c.chain.thin);
  integer("n_chains", c.chain.n_chains);
  if (file.has("seed")) c.chain.seed = parse_unsigned(file.get("seed"), "seed");
  if (file.has("threads")) {
    c.threads = static_cast<unsigned>(parse_unsigned(file.get("threads"), "threads"));
  }
  str("out", c.out_dir);

  if (c.spline.n_basis < c.spline.degree + 1) {
    throw ConfigError("n_basis must be at least spline_degree + 1");
  }
  if (c.spline.knot_padding < 0.0) throw ConfigError("knot_padding must be >= 0");
  if (c.rho_grid_points < 1 || !(c.rho_grid_min > 0.0) ||
      c.rho_grid_max < c.rho_grid_min) {
    throw ConfigError("rho grid needs 0 < rho_grid_min <= rho_grid_max and >= 1 point");
  }
  if (!(c.scoring.tol > 0.0) || c.scoring.max_iter < 1) {
    throw ConfigError("scoring_tol must be > 0 and scoring_max_iter >= 1");
  }
  if (c.lambda_prior < 0.0) throw ConfigError("lambda_prior must be >= 0");
  if (!(c.lambda_prop > 0.0)) throw ConfigError("lambda_prop must be > 0");
  if (!(c.m_prior_sd > 0.0)) throw ConfigError("m_prior_sd must be > 0");
  c.chain.validate();
  return c;
}

std::map<std::string, std::string> RunConfig::canonical_values() const {
  std::map<std::string, std::string> v;
  v["data"] = data_path;
  v["outcome_col"] = outcome_col;
  v["arm_col"] = arm_col;
  v["id_col"] = id_col;
  v["main_cols"] = join(main_cols);
  v["index_cols"] = join(index_cols);
  v["family"] = family;
  v["n_basis"] = std::to_string(spline.n_basis);
  v["spline_degree"] = std::to_string(spline.degree);
  v["knot_padding"] = format_number(spline.knot_padding);
  v["pi_override"] = pi1_override ? format_number(*pi1_override) : "none";
  v["rho_grid_min"] = format_number(rho_grid_min);
  v["rho_grid_max"] = format_number(rho_grid_max);
  v["rho_grid_points"] = std::to_string(rho_grid_points);
  v["scoring_tol"] = format_number(scoring.tol);
  v["scoring_max_iter"] = std::to_string(scoring.max_iter);
  v["lambda_prior"] = format_number(lambda_prior);
  v["lambda_prop"] = format_number(lambda_prop);
  v["beta0"] = beta0 ? join_numbers(*beta0) : "auto";
  v["m_prior_sd"] = format_number(m_prior_sd);
  v["n_iter"] = std::to_string(chain.n_iter);
  v["burn_in"] = std::to_string(chain.burn_in);
  v["thin"] = std::to_string(chain.thin);
  v["n_chains"] = std::to_string(chain.n_chains);
  v["seed"] = std::to_string(chain.seed);
  v["threads"] = std::to_string(threads);
  v["out"] = out_dir;
  return v;
}

std::string RunConfig::canonical_text() const {
  std::string out;
  for (const auto& [key, value] : canonical_values()) {
    out += key + " = " + value + "\n";
  }
  return out;
}

Scenario scenario_from(const ConfigFile& file) {
  static const std::set<std::string> known = {
      "n", "p", "pi1", "family", "intercept", "m_star", "beta_star",
      "g_shape", "g_amplitude", "noise_sd", "seed", "out"};
  for (const auto& [key, value] : file.values()) {
    if (!known.count(key)) throw ConfigError("unknown scenario key '" + key + "'");
  }
  Scenario s;
  if (file.has("n")) s.n = static_cast<int>(parse_integer(file.get("n"), "n"));
  if (file.has("p")) s.p = static_cast<int>(parse_integer(file.get("p"), "p"));
  if (file.has("pi1")) s.pi1 = parse_double(file.get("pi1"), "pi1");
  if (file.has("family")) s.family = Family::from_name(file.get("family")).kind();
  if (file.has("intercept")) s.intercept = parse_double(file.get("intercept"), "intercept");
  if (file.has("g_shape")) s.shape = parse_shape(file.get("g_shape"));
  if (file.has("g_amplitude")) s.amplitude = parse_double(file.get("g_amplitude"), "g_amplitude");
  if (file.has("noise_sd")) s.noise_sd = parse_double(file.get("noise_sd"), "noise_sd");
  if (file.has("seed")) s.seed = parse_unsigned(file.get("seed"), "seed");
  if (s.p < 1) throw ConfigError("scenario: p must be positive");

  const auto vec = [&](const char* key, Vector fallback) {
    if (!file.has(key)) return fallback;
    const auto values = parse_number_list(file.get(key), key);
    if (static_cast<int>(values.size()) != s.p) {
      throw ConfigError(std::string("scenario: ") + key + " must have p entries");
    }
    return Vector(Eigen::Map<const Vector>(values.data(), s.p));
  };
  s.m_star = vec("m_star", Vector::Zero(s.p));
  Vector beta = vec("beta_star", Vector::Ones(s.p));
  if (!(beta.norm() > 0.0)) throw ConfigError("scenario: beta_star must be nonzero");
  s.beta_star = beta / beta.norm();
  s.validate();
  return s;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace bsim
