#ifndef BSIM_PRIORS_HPP
#define BSIM_PRIORS_HPP

#include "bsim/types.hpp"

namespace bsim {

/// Prior and proposal hyperparameters.
///   beta ~ vMF(beta0, lambda_prior)     (lambda_prior = 0: uniform sphere)
///   m    ~ N(m0, Q)
/// rho is the ridge penalty of the empirical-Bayes gamma prior, chosen by GCV
/// at initialisation.
struct HyperParameters {
  double lambda_prior = 300.0;
  Vector beta0;
  double lambda_prop = 300.0;
  Vector m0;
  Matrix q;
  double rho = 1.0;

  // Throws DomainError when beta0 is not unit-norm or Q is not SPD.
  void validate() const;
};

// lambda * beta' direction, the log of the unnormalised vMF density.
double vmf_log_kernel(const Vector& beta, const Vector& direction,
                      double lambda);

// Wood (1994) rejection sampler: draw the cosine t = beta' direction, then a
// uniform direction in the tangent space. p = 1 reduces to a signed coin.
Vector vmf_sample(const Vector& direction, double lambda, Rng& rng);

// -1/2 (m - m0)' Q^{-1} (m - m0)
double m_prior_log_density(const Vector& m, const HyperParameters& hyper);

}  // namespace bsim

#endif  // BSIM_PRIORS_HPP
