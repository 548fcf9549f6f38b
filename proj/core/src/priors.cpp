#include "bsim/priors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bsim/errors.hpp"
#include "bsim/linalg.hpp"

namespace bsim {

namespace {

void require_unit(const Vector& v, const char* what) {
  if (v.size() == 0 || std::abs(v.norm() - 1.0) > 1e-6) {
    throw DomainError(std::string(what) + " must be a unit vector");
  }
}

}  // namespace

void HyperParameters::validate() const {
  if (lambda_prior < 0.0) throw DomainError("lambda_prior must be >= 0");
  if (!(lambda_prop > 0.0)) throw DomainError("lambda_prop must be > 0");
  if (std::abs(beta0.norm() - 1.0) > 1e-10) {
    throw DomainError("beta0 must have unit norm");
  }
  if (q.rows() != q.cols() || q.rows() != m0.size()) {
    throw DomainError("Q must be square and match m0");
  }
  if (!q.isApprox(q.transpose(), 1e-12)) throw DomainError("Q must be symmetric");
  if (Eigen::LLT<Matrix>(q).info() != Eigen::Success) {
    throw DomainError("Q must be positive definite");
  }
  if (!(rho >= 0.0)) throw DomainError("rho must be >= 0");
}

double vmf_log_kernel(const Vector& beta, const Vector& direction,
                      double lambda) {
  require_unit(beta, "vmf_log_kernel: beta");
  require_unit(direction, "vmf_log_kernel: direction");
  return lambda * beta.dot(direction);
}

Vector vmf_sample(const Vector& direction, double lambda, Rng& rng) {
  const auto p = direction.size();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (p == 1) {
    // P(+d) = e^lambda / (e^lambda + e^-lambda)
    const double prob_same = 1.0 / (1.0 + std::exp(-2.0 * lambda));
    return unif(rng) < prob_same ? Vector(direction) : Vector(-direction);
  }
  const double dim = static_cast<double>(p - 1);
  // b = (-2 lambda + sqrt(4 lambda^2 + dim^2)) / dim, rationalised.
  const double b = dim / (2.0 * lambda + std::sqrt(4.0 * lambda * lambda + dim * dim));
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = lambda * x0 + dim * std::log(1.0 - x0 * x0);
  std::gamma_distribution<double> shape(dim / 2.0, 1.0);

  double t = 0.0;
  for (;;) {
    const double g1 = shape(rng);
    const double g2 = shape(rng);
    const double beta_draw = g1 / (g1 + g2);
    t = (1.0 - (1.0 + b) * beta_draw) / (1.0 - (1.0 - b) * beta_draw);
    const double u = unif(rng);
    if (lambda * t + dim * std::log(1.0 - x0 * t) - c >= std::log(u)) break;
  }

  const Vector d = direction / direction.norm();
  Vector v = standard_normal(p, rng);
  v -= v.dot(d) * d;
  const double vn = v.norm();
  if (!(vn > 0.0)) return d;
  v /= vn;
  Vector out = t * d + std::sqrt(std::max(0.0, 1.0 - t * t)) * v;
  out /= out.norm();
  return out;
}

double m_prior_log_density(const Vector& m, const HyperParameters& hyper) {
  if (m.size() != hyper.m0.size() || hyper.q.rows() != m.size()) {
    throw DomainError("m_prior_log_density: dimension mismatch");
  }
  const Eigen::LLT<Matrix> chol(hyper.q);
  if (chol.info() != Eigen::Success) {
    throw DomainError("m_prior_log_density: Q is not positive definite");
  }
  const Vector dev = m - hyper.m0;
  return -0.5 * dev.dot(chol.solve(dev));
}

}  // namespace bsim
