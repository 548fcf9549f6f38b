#include "bsim/iwls.hpp"

#include <cmath>
#include <limits>

#include "bsim/errors.hpp"
#include "bsim/linalg.hpp"

namespace bsim {

namespace {

Matrix weighted_gram(const Matrix& x, const Vector& w) {
  return x.transpose() * w.asDiagonal() * x;
}

}  // namespace

WorkingResponse working_response(const Family& family, const Vector& y,
                                 const Vector& eta, const Vector& offset) {
  const auto n = y.size();
  WorkingResponse out{Vector(n), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(eta[i])) {
      throw NumericalError("working_response: non-finite linear predictor");
    }
    const double mu = family.clamp_mean(family.inverse_link(eta[i]));
    const double d = family.link_derivative(mu);
    out.z[i] = d * (y[i] - mu) + (eta[i] - offset[i]);
    out.w[i] = 1.0 / (family.dispersion() * d * d * family.variance(mu));
  }
  return out;
}

IwlsState iwls_step(const Family& family, const Vector& y,
                    const Vector& offset, const Matrix& design,
                    const Vector& coef, const Vector& penalty) {
  IwlsState state;
  state.eta = offset + design * coef;
  auto [z, w] = working_response(family, y, state.eta, offset);
  Matrix gram = weighted_gram(design, w);
  if (penalty.size() > 0) gram.diagonal() += penalty;
  const auto chol = cholesky_with_jitter(gram, "iwls_step");
  state.coef = chol.solve(design.transpose() * (w.asDiagonal() * z));
  state.z = std::move(z);
  state.w = std::move(w);
  state.iterations = 1;
  return state;
}

IwlsState fit_iwls(const Family& family, const Vector& y, const Vector& offset,
                   const Matrix& design, const Vector& start,
                   const Vector& penalty, const ScoringOptions& options) {
  Vector coef = start;
  bool converged = false;
  int iter = 0;
  while (iter < options.max_iter) {
    IwlsState step = iwls_step(family, y, offset, design, coef, penalty);
    ++iter;
    if (!step.coef.allFinite()) {
      throw NumericalError("fit_iwls: scoring produced non-finite coefficients");
    }
    const double change =
        coef.size() == 0 ? 0.0 : (step.coef - coef).lpNorm<Eigen::Infinity>();
    coef = std::move(step.coef);
    // Identity link: z and W do not depend on the coefficients, so a single
    // weighted solve is already the fixed point.
    if (family.kind() == FamilyKind::gaussian || change < options.tol) {
      converged = true;
      break;
    }
  }
  IwlsState out;
  out.eta = offset + design * coef;
  auto [z, w] = working_response(family, y, out.eta, offset);
  out.coef = std::move(coef);
  out.z = std::move(z);
  out.w = std::move(w);
  out.converged = converged;
  out.iterations = iter;
  return out;
}

Vector penalized_gamma_hat(const Matrix& d, const Vector& w, const Vector& z,
                           double rho) {
  if (!(rho >= 0.0)) throw DomainError("penalized_gamma_hat: rho must be >= 0");
  Matrix gram = weighted_gram(d, w);
  gram.diagonal().array() += rho;
  const auto chol = cholesky_with_jitter(gram, "penalized_gamma_hat");
  return chol.solve(d.transpose() * (w.asDiagonal() * z));
}

double gcv_score(const Matrix& d, const Vector& w, const Vector& z,
                 double rho) {
  const auto n = static_cast<double>(d.rows());
  const Matrix gram = weighted_gram(d, w);
  Matrix penalized = gram;
  penalized.diagonal().array() += rho;
  const auto chol = cholesky_with_jitter(penalized, "gcv_score");
  const Vector gamma = chol.solve(d.transpose() * (w.asDiagonal() * z));
  const Vector resid = z - d * gamma;
  const double rss = resid.dot(w.asDiagonal() * resid);
  // tr(D S D' W) = tr(S D'WD)
  const double trace = chol.solve(gram).trace();
  const double dof = n - trace;
  if (!(dof > 0.0)) return std::numeric_limits<double>::infinity();
  return n * rss / (dof * dof);
}

double gcv_select_rho(const Matrix& d, const Vector& w, const Vector& z,
                      std::span<const double> grid) {
  if (grid.empty()) throw DomainError("gcv_select_rho: empty grid");
  double best_rho = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const double rho : grid) {
    const double score = gcv_score(d, w, z, rho);
    if (!std::isfinite(score)) continue;
    if (score < best || (score == best && rho > best_rho)) {
      best = score;
      best_rho = rho;
    }
  }
  if (!std::isfinite(best)) {
    throw NumericalError("gcv_select_rho: smoother saturates the data at "
                         "every grid point");
  }
  return best_rho;
}

std::vector<double> log_spaced_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) {
    throw DomainError("log_spaced_grid: need 0 < lo <= hi and points >= 1");
  }
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  if (points == 1) {
    grid.push_back(lo);
    return grid;
  }
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (points - 1);
  for (int k = 0; k < points; ++k) grid.push_back(std::exp(a + k * step));
  grid.back() = hi;
  return grid;
}

PosteriorGaussianCache marginal_cache(const Matrix& d, const Vector& w,
                                      const Vector& z, double rho) {
  if (rho < 0.0) throw DomainError("marginal_cache: rho must be >= 0");
  PosteriorGaussianCache cache;
  cache.rho = rho;
  const Matrix gram = weighted_gram(d, w);

  double jitter = 0.0;
  const auto chol0 = cholesky_with_jitter(gram, "marginal_cache", &jitter);
  cache.precision_0 = gram;
  cache.precision_0.diagonal().array() += jitter;
  cache.sigma_0 = spd_inverse(chol0);

  Matrix penalized = gram;
  penalized.diagonal().array() += rho;
  cache.sigma_rho = spd_inverse(cholesky_with_jitter(penalized, "marginal_cache"));

  // (I + S_rho S_0^{-1}) S_0 = S_0 + S_rho, so
  // Lambda = (S_0 + S_rho) S_0^{-1} (S_0 + S_rho).
  const Matrix sum = cache.sigma_0 + cache.sigma_rho;
  const Matrix lam = sum * cache.precision_0 * sum;
  cache.lambda = 0.5 * (lam + lam.transpose());

  cache.dtwz = d.transpose() * (w.asDiagonal() * z);
  cache.ztwz = z.dot(w.asDiagonal() * z);
  const Vector shrunk = cache.sigma_rho * cache.dtwz;
  cache.s1 = cache.ztwz + shrunk.dot(cache.precision_0 * shrunk);
  return cache;
}

double log_marginal_kernel(const PosteriorGaussianCache& cache) {
  return 0.25 * cache.dtwz.dot(cache.lambda * cache.dtwz) - 0.5 * cache.s1;
}

}  // namespace bsim
