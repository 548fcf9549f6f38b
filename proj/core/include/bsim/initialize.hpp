#ifndef BSIM_INITIALIZE_HPP
#define BSIM_INITIALIZE_HPP

#include <optional>
#include <vector>

#include "bsim/dataset.hpp"
#include "bsim/family.hpp"
#include "bsim/iwls.hpp"
#include "bsim/spline.hpp"
#include "bsim/state.hpp"

namespace bsim {

struct InitOptions {
  SplineSettings spline;
  ScoringOptions scoring;
  std::vector<double> rho_grid = log_spaced_grid(1e-4, 1e4, 25);
  // When set, GCV is skipped and this penalty is used throughout.
  std::optional<double> fixed_rho;
  // Prior direction: used as an extra starting point and for sign alignment.
  std::optional<Vector> beta0;
  int max_outer = 100;
  double beta_tol = 1e-7;
};

/// Penalised maximum-likelihood starting point of the sampler.
struct Initialization {
  ParameterState state;
  double rho = 1.0;
  SplineSystem system;
  Family family;              // with the dispersion estimate for gaussian
  Vector linear_direction;    // normalised arm-by-covariate interaction
  double penalized_loglik = 0.0;
  int outer_iterations = 0;
  bool converged = false;
};

// Direction of the treatment-by-covariate interaction in the linear GLM
//   eta = x_main' m + (a - pi1) x_index' b,
// returned as b / |b| (e_1 when b vanishes).
Vector linear_interaction_direction(const Dataset& data, const Family& family,
                                    const ScoringOptions& scoring = {});

// Alternating profile fit: for fixed beta, (m, gamma) by penalised IWLS with
// ridge rho on gamma; for fixed (m, gamma), one projected Gauss-Newton step on
// beta with step halving. Knots follow the current index range and are frozen
// at the final beta. rho comes from GCV unless fixed. The returned beta is
// sign-aligned with beta0 (or with the linear direction).
Initialization initialize(const Dataset& data, const Family& family,
                          const InitOptions& options);

}  // namespace bsim

#endif  // BSIM_INITIALIZE_HPP
