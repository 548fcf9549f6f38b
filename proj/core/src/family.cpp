#include "bsim/family.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bsim/errors.hpp"

namespace bsim {

namespace {

constexpr double kMeanFloor = 1e-10;

double log1p_exp(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void require_interior(FamilyKind kind, double mu, const char* what) {
  bool ok = std::isfinite(mu);
  switch (kind) {
    case FamilyKind::gaussian:
      break;
    case FamilyKind::bernoulli:
      ok = ok && mu > 0.0 && mu < 1.0;
      break;
    case FamilyKind::poisson:
      ok = ok && mu > 0.0;
      break;
  }
  if (!ok) {
    throw DomainError(std::string(what) + ": mean " + std::to_string(mu) +
                      " outside the family's open mean domain");
  }
}

}  // namespace

Family::Family(FamilyKind kind, double dispersion)
    : kind_(kind),
      dispersion_(kind == FamilyKind::gaussian ? dispersion : 1.0) {
  if (!(dispersion_ > 0.0) || !std::isfinite(dispersion_)) {
    throw DomainError("dispersion must be positive and finite");
  }
}

Family Family::from_name(std::string_view name) {
  if (name == "gaussian") return Family(FamilyKind::gaussian);
  if (name == "bernoulli" || name == "binomial") {
    return Family(FamilyKind::bernoulli);
  }
  if (name == "poisson") return Family(FamilyKind::poisson);
  throw ConfigError("unknown family '" + std::string(name) +
                    "' (expected gaussian, bernoulli or poisson)");
}

std::string_view Family::name() const {
  switch (kind_) {
    case FamilyKind::gaussian:
      return "gaussian";
    case FamilyKind::bernoulli:
      return "bernoulli";
    case FamilyKind::poisson:
      return "poisson";
  }
  return "unknown";
}

Family Family::with_dispersion(double dispersion) const {
  return Family(kind_, dispersion);
}

double Family::link(double mu) const {
  require_interior(kind_, mu, "link");
  switch (kind_) {
    case FamilyKind::gaussian:
      return mu;
    case FamilyKind::bernoulli:
      return std::log(mu) - std::log1p(-mu);
    case FamilyKind::poisson:
      return std::log(mu);
  }
  return mu;
}

double Family::inverse_link(double eta) const {
  switch (kind_) {
    case FamilyKind::gaussian:
      return eta;
    case FamilyKind::bernoulli:
      if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
      return std::exp(eta) / (1.0 + std::exp(eta));
    case FamilyKind::poisson:
      return std::exp(eta);
  }
  return eta;
}

double Family::link_derivative(double mu) const {
  require_interior(kind_, mu, "link_derivative");
  switch (kind_) {
    case FamilyKind::gaussian:
      return 1.0;
    case FamilyKind::bernoulli:
      return 1.0 / (mu * (1.0 - mu));
    case FamilyKind::poisson:
      return 1.0 / mu;
  }
  return 1.0;
}

double Family::variance(double mu) const {
  require_interior(kind_, mu, "variance");
  switch (kind_) {
    case FamilyKind::gaussian:
      return 1.0;
    case FamilyKind::bernoulli:
      return mu * (1.0 - mu);
    case FamilyKind::poisson:
      return mu;
  }
  return 1.0;
}

double Family::cumulant(double eta) const {
  switch (kind_) {
    case FamilyKind::gaussian:
      return 0.5 * eta * eta;
    case FamilyKind::bernoulli:
      return log1p_exp(eta);
    case FamilyKind::poisson:
      return std::exp(eta);
  }
  return 0.0;
}

double Family::log_base_measure(double y) const {
  switch (kind_) {
    case FamilyKind::gaussian:
      return -0.5 * y * y / dispersion_ -
             0.5 * std::log(2.0 * std::numbers::pi * dispersion_);
    case FamilyKind::bernoulli:
      return 0.0;
    case FamilyKind::poisson:
      return -std::lgamma(y + 1.0);
  }
  return 0.0;
}

double Family::clamp_mean(double mu) const {
  switch (kind_) {
    case FamilyKind::gaussian:
      return mu;
    case FamilyKind::bernoulli:
      return std::clamp(mu, kMeanFloor, 1.0 - kMeanFloor);
    case FamilyKind::poisson:
      return std::max(mu, kMeanFloor);
  }
  return mu;
}

double Family::working_weight(double mu) const {
  mu = clamp_mean(mu);
  const double d = link_derivative(mu);
  return 1.0 / (dispersion_ * d * d * variance(mu));
}

bool Family::in_support(double y) const {
  if (!std::isfinite(y)) return false;
  switch (kind_) {
    case FamilyKind::gaussian:
      return true;
    case FamilyKind::bernoulli:
      return y == 0.0 || y == 1.0;
    case FamilyKind::poisson:
      return y >= 0.0 && y == std::floor(y);
  }
  return false;
}

void Family::check_response(const Vector& y) const {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!in_support(y[i])) {
      throw DataError("response " + std::to_string(y[i]) + " at row " +
                      std::to_string(i) + " is outside the " +
                      std::string(name()) + " support");
    }
  }
}

double Family::log_likelihood(const Vector& y, const Vector& eta) const {
  if (y.size() != eta.size()) {
    throw DataError("log_likelihood: response and predictor lengths differ");
  }
  check_response(y);
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    total += (y[i] * eta[i] - cumulant(eta[i])) / dispersion_ +
             log_base_measure(y[i]);
  }
  return total;
}

LinearPredictor make_predictor(const Family& family, Vector eta) {
  LinearPredictor out{std::move(eta), Vector()};
  out.mu = out.eta.unaryExpr([&](double e) { return family.inverse_link(e); });
  return out;
}

double pearson_dispersion(const Family& family, const Vector& y,
                          const Vector& mu, int n_coefficients) {
  const auto n = y.size();
  const double dof = static_cast<double>(n - n_coefficients);
  if (dof <= 0.0) {
    throw NumericalError("pearson_dispersion: no residual degrees of freedom");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = family.clamp_mean(mu[i]);
    const double r = y[i] - m;
    sum += r * r / family.variance(m);
  }
  return sum / dof;
}

}  // namespace bsim
