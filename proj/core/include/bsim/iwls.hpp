#ifndef BSIM_IWLS_HPP
#define BSIM_IWLS_HPP

#include <span>
#include <vector>

#include "bsim/family.hpp"
#include "bsim/types.hpp"

namespace bsim {

struct ScoringOptions {
  double tol = 1e-8;  // coefficient change, infinity norm
  int max_iter = 50;
};

/// Working response and weights of one Fisher-scoring step.
///
/// The part of eta that is not being updated is passed as `offset`, so
///   z_i = h'(mu_i) (y_i - mu_i) + (eta_i - offset_i)
///   w_i = 1 / (phi * h'(mu_i)^2 * V(mu_i))
/// with mu clamped into the mean domain.
struct WorkingResponse {
  Vector z;
  Vector w;
};

WorkingResponse working_response(const Family& family, const Vector& y,
                                 const Vector& eta, const Vector& offset);

struct IwlsState {
  Vector coef;
  Vector z;  // working response at the linearisation point
  Vector w;
  Vector eta;
  bool converged = false;
  int iterations = 0;
};

// One scoring update starting at `coef`. z, w and eta in the result are the
// linearisation at the input coefficients; `coef` is the updated solution of
//   min (z - X c)' W (z - X c) + c' diag(penalty) c.
// An empty penalty means none.
IwlsState iwls_step(const Family& family, const Vector& y,
                    const Vector& offset, const Matrix& design,
                    const Vector& coef, const Vector& penalty = Vector());

// Iterates iwls_step to convergence. The returned z, w, eta are evaluated at
// the final coefficients. Non-convergence leaves converged == false and keeps
// the last iterate; callers decide whether to warn.
IwlsState fit_iwls(const Family& family, const Vector& y, const Vector& offset,
                   const Matrix& design, const Vector& start,
                   const Vector& penalty = Vector(),
                   const ScoringOptions& options = {});

// (D'WD + rho I)^{-1} D'Wz
Vector penalized_gamma_hat(const Matrix& d, const Vector& w, const Vector& z,
                           double rho);

// n * ||W^{1/2}(z - D gamma_rho)||^2 / (n - tr H_rho)^2,
// H_rho = D (D'WD + rho I)^{-1} D' W. +inf when tr H_rho >= n.
double gcv_score(const Matrix& d, const Vector& w, const Vector& z, double rho);

// Grid minimiser of gcv_score; ties go to the larger rho.
double gcv_select_rho(const Matrix& d, const Vector& w, const Vector& z,
                      std::span<const double> grid);

std::vector<double> log_spaced_grid(double lo, double hi, int points);

/// Gaussian pieces of the gamma-marginalised beta posterior at one beta.
struct PosteriorGaussianCache {
  Matrix sigma_rho;     // (D'WD + rho I)^{-1}
  Matrix sigma_0;       // (D'WD)^{-1}
  Matrix precision_0;   // D'WD (plus any jitter actually applied)
  Matrix lambda;        // (I + S_rho S_0^{-1}) S_0 (I + S_rho S_0^{-1})
  Vector dtwz;          // D'Wz
  double ztwz = 0.0;    // z'Wz
  double s1 = 0.0;      // z'Wz + z'WD S_rho S_0^{-1} S_rho D'Wz
  double rho = 0.0;
};

PosteriorGaussianCache marginal_cache(const Matrix& d, const Vector& w,
                                      const Vector& z, double rho);

// (1/4) b' Lambda b - S1 / 2 with b = D'Wz.
double log_marginal_kernel(const PosteriorGaussianCache& cache);

}  // namespace bsim

#endif  // BSIM_IWLS_HPP
