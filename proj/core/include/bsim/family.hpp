#ifndef BSIM_FAMILY_HPP
#define BSIM_FAMILY_HPP

#include <string_view>

#include "bsim/types.hpp"

namespace bsim {

enum class FamilyKind { gaussian, bernoulli, poisson };

/// Exponential-family response model with its canonical link.
///
/// Density f(y | eta, phi) = exp{ (y*eta - b(eta)) / phi + c(y, phi) } with
/// link h(mu) = eta:  identity (gaussian), logit (bernoulli), log (poisson).
/// The dispersion phi is fixed at 1 for bernoulli and poisson.
class Family {
 public:
  explicit Family(FamilyKind kind, double dispersion = 1.0);

  static Family from_name(std::string_view name);

  FamilyKind kind() const { return kind_; }
  std::string_view name() const;
  double dispersion() const { return dispersion_; }

  // Returns a copy with a new dispersion; ignored (kept at 1) for
  // bernoulli and poisson.
  Family with_dispersion(double dispersion) const;

  // Link-scale functions. Throw DomainError outside the open mean domain.
  double link(double mu) const;
  double inverse_link(double eta) const;
  double link_derivative(double mu) const;
  double variance(double mu) const;

  // Cumulant b(eta) and log base measure c(y, phi).
  double cumulant(double eta) const;
  double log_base_measure(double y) const;

  // Pulls mu back inside the mean domain so scoring weights stay finite.
  double clamp_mean(double mu) const;

  // IWLS weight 1 / (phi * h'(mu)^2 * V(mu)) at a (clamped) mean.
  double working_weight(double mu) const;

  bool in_support(double y) const;
  void check_response(const Vector& y) const;

  double log_likelihood(const Vector& y, const Vector& eta) const;

 private:
  FamilyKind kind_;
  double dispersion_;
};

/// eta and mu = h^{-1}(eta) for every subject.
struct LinearPredictor {
  Vector eta;
  Vector mu;
};

LinearPredictor make_predictor(const Family& family, Vector eta);

// Pearson moment estimate of phi: sum (y - mu)^2 / V(mu) / (n - k).
double pearson_dispersion(const Family& family, const Vector& y,
                          const Vector& mu, int n_coefficients);

}  // namespace bsim

#endif  // BSIM_FAMILY_HPP
