#include "bsim/synth.hpp"

#include <cmath>
#include <fstream>

#include "bsim/errors.hpp"
#include "bsim/report.hpp"

namespace bsim {

GShape parse_shape(std::string_view name) {
  if (name == "zero") return GShape::zero;
  if (name == "linear") return GShape::linear;
  if (name == "quadratic") return GShape::quadratic;
  if (name == "sine") return GShape::sine;
  throw ConfigError("unknown g shape '" + std::string(name) +
                    "' (expected zero, linear, quadratic or sine)");
}

std::string_view shape_name(GShape shape) {
  switch (shape) {
    case GShape::zero:
      return "zero";
    case GShape::linear:
      return "linear";
    case GShape::quadratic:
      return "quadratic";
    case GShape::sine:
      return "sine";
  }
  return "zero";
}

double shape_value(GShape shape, double u) {
  switch (shape) {
    case GShape::zero:
      return 0.0;
    case GShape::linear:
      return u;
    case GShape::quadratic:
      return u * u - 1.0;
    case GShape::sine:
      return std::sin(u);
  }
  return 0.0;
}

void Scenario::validate() const {
  if (n < 1 || p < 1) throw ConfigError("scenario: n and p must be positive");
  if (!(pi1 > 0.0 && pi1 < 1.0)) throw ConfigError("scenario: pi1 must be in (0,1)");
  if (m_star.size() != p || beta_star.size() != p) {
    throw ConfigError("scenario: m_star and beta_star must have length p");
  }
  if (std::abs(beta_star.norm() - 1.0) > 1e-10) {
    throw ConfigError("scenario: beta_star must have unit norm");
  }
  if (!std::isfinite(amplitude)) throw ConfigError("scenario: amplitude must be finite");
  if (!(noise_sd > 0.0)) throw ConfigError("scenario: noise_sd must be positive");
}

double arm_coefficient(const Scenario& scenario, int arm) {
  return arm == 1 ? 2.0 * scenario.pi0() * scenario.amplitude
                  : -2.0 * scenario.pi1 * scenario.amplitude;
}

double true_g(const Scenario& scenario, double u, int arm) {
  return arm_coefficient(scenario, arm) * shape_value(scenario.shape, u);
}

double true_delta(const Scenario& scenario, const Vector& x) {
  const double s = shape_value(scenario.shape, scenario.beta_star.dot(x));
  return (arm_coefficient(scenario, 1) - arm_coefficient(scenario, 0)) * s;
}

Dataset generate(const Scenario& scenario) {
  scenario.validate();
  Rng rng(scenario.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution assign(scenario.pi1);

  const int n = scenario.n;
  const int p = scenario.p;
  Dataset data;
  data.x_index.resize(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) data.x_index(i, j) = normal(rng);
  }
  data.arm.resize(static_cast<std::size_t>(n));
  for (auto& a : data.arm) a = assign(rng) ? 1 : 0;

  const Family family(scenario.family, scenario.noise_sd * scenario.noise_sd);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const Vector x = data.x_index.row(i).transpose();
    const int a = data.arm[static_cast<std::size_t>(i)];
    const double eta = scenario.intercept + scenario.m_star.dot(x) +
                       true_g(scenario, scenario.beta_star.dot(x), a);
    const double mu = family.inverse_link(eta);
    switch (scenario.family) {
      case FamilyKind::gaussian:
        data.y[i] = mu + scenario.noise_sd * normal(rng);
        break;
      case FamilyKind::bernoulli:
        data.y[i] = std::bernoulli_distribution(mu)(rng) ? 1.0 : 0.0;
        break;
      case FamilyKind::poisson:
        data.y[i] = static_cast<double>(std::poisson_distribution<long long>(mu)(rng));
        break;
    }
  }

  data.x_main.resize(n, p + 1);
  data.x_main.col(0).setOnes();
  data.x_main.rightCols(p) = data.x_index;
  data.main_names.emplace_back(kInterceptName);
  for (int j = 0; j < p; ++j) {
    data.index_names.push_back("x" + std::to_string(j + 1));
    data.main_names.push_back("x" + std::to_string(j + 1));
  }
  for (int i = 0; i < n; ++i) data.ids.push_back(std::to_string(i + 1));
  data.pi1 = arm_one_fraction(data.arm);
  data.pi0 = 1.0 - data.pi1;
  return data;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "id,y,a";
  for (const auto& name : data.index_names) out << ',' << name;
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << data.ids[static_cast<std::size_t>(i)] << ','
        << format_number(data.y[i]) << ','
        << data.arm[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < data.x_index.cols(); ++j) {
      out << ',' << format_number(data.x_index(i, j));
    }
    out << '\n';
  }
}

}  // namespace bsim
