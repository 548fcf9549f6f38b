#include "bsim/inference.hpp"

#include <algorithm>
#include <cmath>

#include "bsim/errors.hpp"

namespace bsim {

namespace {

void require_draws(const PosteriorDraws& draws, const char* what) {
  if (draws.empty()) {
    throw DomainError(std::string(what) + ": posterior draws are empty");
  }
}

}  // namespace

double delta_contrast(const Vector& x_index, const ParameterState& state,
                      const SplineSystem& system) {
  const Vector gamma_tilde = state.gamma_tilde.size() == 2 * system.l()
                                 ? state.gamma_tilde
                                 : system.constrain(state.gamma);
  return system.contrast(x_index.dot(state.beta), gamma_tilde);
}

double tbi(const Vector& x_index, const PosteriorDraws& draws,
           const SplineSystem& system) {
  require_draws(draws, "tbi");
  long long below = 0;
  for (const auto& s : draws.states) {
    if (delta_contrast(x_index, s, system) < 0.0) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(draws.states.size());
}

int decide(const Vector& x_index, const PosteriorDraws& draws,
           const SplineSystem& system) {
  return tbi(x_index, draws, system) > 0.5 ? 1 : 0;
}

double predict_outcome(const Vector& x_main, const Vector& x_index, int arm,
                       const PosteriorDraws& draws, const SplineSystem& system,
                       const Family& family) {
  require_draws(draws, "predict_outcome");
  double total = 0.0;
  for (const auto& s : draws.states) {
    const double eta =
        x_main.dot(s.m) + system.g(x_index.dot(s.beta), arm, s.gamma_tilde);
    total += family.inverse_link(eta);
  }
  return total / static_cast<double>(draws.states.size());
}

double sorted_quantile(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw DomainError("sorted_quantile: empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Interval credible_interval(std::vector<double> values, double level) {
  std::sort(values.begin(), values.end());
  const double tail = 0.5 * (1.0 - level);
  return {sorted_quantile(values, tail), sorted_quantile(values, 1.0 - tail)};
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<SubjectScore> score_subjects(const Dataset& data,
                                         const PosteriorDraws& draws,
                                         const SplineSystem& system,
                                         const Family& family) {
  require_draws(draws, "score_subjects");
  const auto n = data.n();
  const auto n_draws = draws.states.size();
  std::vector<SubjectScore> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    SubjectScore& s = out[static_cast<std::size_t>(i)];
    s.subject_id = data.ids.empty() ? std::to_string(i + 1)
                                    : data.ids[static_cast<std::size_t>(i)];
    const Vector xi = data.x_index.row(i).transpose();
    const Vector xm = data.x_main.row(i).transpose();
    s.delta_draws.resize(n_draws);
    std::vector<double> exp_delta(n_draws);
    double index_sum = 0.0;
    double pred0 = 0.0;
    double pred1 = 0.0;
    for (std::size_t k = 0; k < n_draws; ++k) {
      const auto& st = draws.states[k];
      const double u = xi.dot(st.beta);
      index_sum += u;
      const double delta = system.contrast(u, st.gamma_tilde);
      s.delta_draws[k] = delta;
      exp_delta[k] = std::exp(delta);
      if (delta < 0.0) ++s.n_delta_negative;
      if (exp_delta[k] < 1.0) ++s.n_exp_delta_below_one;
      const double main = xm.dot(st.m);
      pred0 += family.inverse_link(main + system.g(u, 0, st.gamma_tilde));
      pred1 += family.inverse_link(main + system.g(u, 1, st.gamma_tilde));
    }
    const double nd = static_cast<double>(n_draws);
    s.index_value = index_sum / nd;
    s.delta_mean = mean_of(s.delta_draws);
    s.cri_delta = credible_interval(s.delta_draws);
    s.tbi = static_cast<double>(s.n_delta_negative) / nd;
    s.decision = s.tbi > 0.5 ? 1 : 0;
    s.decision_mean_rule = s.delta_mean < 0.0 ? 1 : 0;
    s.exp_delta_mean = mean_of(exp_delta);
    s.cri_exp_delta = credible_interval(std::move(exp_delta));
    s.pred_mean_arm0 = pred0 / nd;
    s.pred_mean_arm1 = pred1 / nd;
    s.extrapolated = !system.basis().in_range(s.index_value);
  }
  return out;
}

std::vector<CoefficientSummary> summarize_coefficients(
    const std::vector<std::string>& names, const PosteriorDraws& draws,
    bool beta_block, const Vector& sign_reference) {
  require_draws(draws, "summarize_coefficients");
  std::vector<CoefficientSummary> out;
  const auto n_draws = draws.states.size();
  for (std::size_t j = 0; j < names.size(); ++j) {
    std::vector<double> values(n_draws);
    for (std::size_t k = 0; k < n_draws; ++k) {
      const auto& st = draws.states[k];
      if (beta_block) {
        const double sign = sign_reference.size() == st.beta.size() &&
                                    st.beta.dot(sign_reference) < 0.0
                                ? -1.0
                                : 1.0;
        values[k] = sign * st.beta[static_cast<Eigen::Index>(j)];
      } else {
        values[k] = st.m[static_cast<Eigen::Index>(j)];
      }
    }
    CoefficientSummary c;
    c.name = names[j];
    c.mean = mean_of(values);
    c.cri = credible_interval(std::move(values));
    out.push_back(std::move(c));
  }
  return out;
}

Summary summarize(const PosteriorDraws& draws, const Dataset& data,
                  const SplineSystem& system, const Family& family,
                  const SummaryOptions& options) {
  require_draws(draws, "summarize");
  Summary out;
  out.beta = summarize_coefficients(data.index_names, draws, true,
                                    options.sign_reference);
  out.m = summarize_coefficients(data.main_names, draws, false);
  out.subjects = score_subjects(data, draws, system, family);

  if (!out.subjects.empty() && options.grid_points > 0) {
    double lo = out.subjects.front().index_value;
    double hi = lo;
    for (const auto& s : out.subjects) {
      lo = std::min(lo, s.index_value);
      hi = std::max(hi, s.index_value);
    }
    const int points = options.grid_points;
    std::vector<double> values(draws.states.size());
    for (int k = 0; k < points; ++k) {
      const double u = points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
      for (std::size_t d = 0; d < draws.states.size(); ++d) {
        values[d] = std::exp(system.contrast(u, draws.states[d].gamma_tilde));
      }
      CurvePoint cp;
      cp.u = u;
      cp.exp_delta_mean = mean_of(values);
      cp.cri = credible_interval(values);
      out.curve.push_back(cp);
    }
  }
  return out;
}

}  // namespace bsim
