#ifndef BSIM_INFERENCE_HPP
#define BSIM_INFERENCE_HPP

#include <span>
#include <string>
#include <vector>

#include "bsim/dataset.hpp"
#include "bsim/family.hpp"
#include "bsim/sampler.hpp"
#include "bsim/spline.hpp"

namespace bsim {

// Delta(theta, x) = g(x'beta, 1) - g(x'beta, 0). Negative favours treatment.
double delta_contrast(const Vector& x_index, const ParameterState& state,
                      const SplineSystem& system);

// Fraction of draws with Delta < 0 (a draw at exactly 0 does not count).
double tbi(const Vector& x_index, const PosteriorDraws& draws,
           const SplineSystem& system);

// 1 iff TBI(x) > 0.5.
int decide(const Vector& x_index, const PosteriorDraws& draws,
           const SplineSystem& system);

// Posterior mean of h^{-1}(m'x_main + g(x_index'beta, arm)).
double predict_outcome(const Vector& x_main, const Vector& x_index, int arm,
                       const PosteriorDraws& draws, const SplineSystem& system,
                       const Family& family);

// Equal-tailed quantile with linear interpolation between order statistics
// (R's type 7). `sorted` must be ascending and nonempty.
double sorted_quantile(std::span<const double> sorted, double prob);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// 2.5% and 97.5% quantiles of an unsorted sample.
Interval credible_interval(std::vector<double> values, double level = 0.95);

struct SubjectScore {
  std::string subject_id;
  double index_value = 0.0;        // posterior mean of beta'x
  std::vector<double> delta_draws;
  double delta_mean = 0.0;
  Interval cri_delta;
  double tbi = 0.0;
  int decision = 0;                // I(tbi > 0.5)
  int decision_mean_rule = 0;      // I(E[Delta] < 0)
  long long n_delta_negative = 0;
  long long n_exp_delta_below_one = 0;
  double exp_delta_mean = 0.0;
  Interval cri_exp_delta;
  double pred_mean_arm0 = 0.0;
  double pred_mean_arm1 = 0.0;
  bool extrapolated = false;       // posterior-mean index outside knot range
};

// Scores every row of `data` (outcome and arm are not used).
std::vector<SubjectScore> score_subjects(const Dataset& data,
                                         const PosteriorDraws& draws,
                                         const SplineSystem& system,
                                         const Family& family);

struct CoefficientSummary {
  std::string name;
  double mean = 0.0;
  Interval cri;
};

struct CurvePoint {
  double u = 0.0;
  double exp_delta_mean = 0.0;
  Interval cri;
};

struct Summary {
  std::vector<CoefficientSummary> beta;
  std::vector<CoefficientSummary> m;
  std::vector<CurvePoint> curve;        // benefit curve over the index range
  std::vector<SubjectScore> subjects;
};

struct SummaryOptions {
  int grid_points = 201;
  // When set, beta draws pointing away from this direction are flipped for
  // the coefficient table (used when the beta prior is uniform).
  Vector sign_reference;
};

// Coefficient table only; needs nothing but the draws.
std::vector<CoefficientSummary> summarize_coefficients(
    const std::vector<std::string>& names, const PosteriorDraws& draws,
    bool beta_block, const Vector& sign_reference = Vector());

Summary summarize(const PosteriorDraws& draws, const Dataset& data,
                  const SplineSystem& system, const Family& family,
                  const SummaryOptions& options = {});

}  // namespace bsim

#endif  // BSIM_INFERENCE_HPP
