#include "bsim/initialize.hpp"

#include <cmath>
#include <limits>

#include "bsim/errors.hpp"
#include "bsim/linalg.hpp"
#include "bsim/logging.hpp"

namespace bsim {

namespace {

struct ProfileFit {
  Vector coef;  // [m; gamma]
  IwlsState scoring;
  double rho = 1.0;
  double objective = -std::numeric_limits<double>::infinity();
};

Matrix joint_design(const Matrix& x_main, const Matrix& d) {
  Matrix out(x_main.rows(), x_main.cols() + d.cols());
  out << x_main, d;
  return out;
}

double penalized_loglik(const Family& family, const Vector& y,
                        const Vector& eta, const Vector& gamma, double rho) {
  return family.log_likelihood(y, eta) - 0.5 * rho * gamma.squaredNorm();
}

ProfileFit fit_given_beta(const Dataset& data, const Family& family,
                          const SplineSystem& system, const Vector& beta,
                          double rho, const Vector& start,
                          const ScoringOptions& scoring) {
  const Matrix d = build_reduced_design(data.x_index, data.arm, beta, system);
  const Matrix design = joint_design(data.x_main, d);
  Vector penalty = Vector::Zero(design.cols());
  penalty.tail(system.l()).setConstant(rho);
  ProfileFit fit;
  fit.rho = rho;
  fit.scoring = fit_iwls(family, data.y, Vector::Zero(data.n()), design, start,
                         penalty, scoring);
  fit.coef = fit.scoring.coef;
  fit.objective = penalized_loglik(family, data.y, fit.scoring.eta,
                                   fit.coef.tail(system.l()), rho);
  return fit;
}

double select_rho(const Dataset& data, const SplineSystem& system,
                  const Vector& beta, const ProfileFit& fit,
                  const std::vector<double>& grid) {
  const auto pm = data.x_main.cols();
  const Matrix d = build_reduced_design(data.x_index, data.arm, beta, system);
  // Working response of the gamma block: remove the main-effect part.
  const Vector z = fit.scoring.z - data.x_main * fit.coef.head(pm);
  return gcv_select_rho(d, fit.scoring.w, z, grid);
}

Vector start_coefficients(const Dataset& data, const SplineSystem& system) {
  return Vector::Zero(data.x_main.cols() + system.l());
}

struct Candidate {
  Vector beta;
  ProfileFit fit;
  int outer = 0;
  bool converged = false;
};

Candidate profile_from(const Dataset& data, const Family& family,
                       const Vector& start_beta, const InitOptions& options) {
  const auto pm = data.x_main.cols();
  Candidate c;
  c.beta = start_beta / start_beta.norm();
  double rho = options.fixed_rho.value_or(1.0);
  double damping = 1e-3;
  Vector warm;

  for (c.outer = 1; c.outer <= options.max_outer; ++c.outer) {
    const SplineSystem system = SplineSystem::for_index_range(
        data.x_index * c.beta, data.pi0, data.pi1, options.spline);
    if (warm.size() != pm + system.l()) warm = start_coefficients(data, system);
    ProfileFit fit = fit_given_beta(data, family, system, c.beta, rho, warm,
                                    options.scoring);
    if (!options.fixed_rho) {
      rho = select_rho(data, system, c.beta, fit, options.rho_grid);
      fit = fit_given_beta(data, family, system, c.beta, rho, fit.coef,
                           options.scoring);
    }
    warm = fit.coef;
    c.fit = fit;

    // Gauss-Newton direction for beta with (m, gamma) held fixed.
    const Vector m = fit.coef.head(pm);
    const Vector gamma = fit.coef.tail(system.l());
    const Vector gamma_tilde = system.constrain(gamma);
    const Vector u = data.x_index * c.beta;
    const auto n = data.n();
    Vector slope(n);
    Vector resid(n);
    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector dpsi = system.basis().derivative(u[i]);
      const int off = data.arm[static_cast<std::size_t>(i)] == 1 ? system.l() : 0;
      slope[i] = dpsi.dot(gamma_tilde.segment(off, system.l()));
      const double mu = family.clamp_mean(family.inverse_link(fit.scoring.eta[i]));
      const double dh = family.link_derivative(mu);
      resid[i] = dh * (data.y[i] - mu);
      w[i] = 1.0 / (family.dispersion() * dh * dh * family.variance(mu));
    }
    const Matrix jac = slope.asDiagonal() * data.x_index;
    const Matrix normal = jac.transpose() * w.asDiagonal() * jac;
    const Vector gradient = jac.transpose() * (w.asDiagonal() * resid);
    const double scale = std::max(normal.trace() / static_cast<double>(normal.rows()), 1e-12);

    // Levenberg-Marquardt on the sphere; damping carries over between
    // outer iterations.
    const Vector main_part = data.x_main * m;
    bool moved = false;
    Vector next = c.beta;
    double gain = 0.0;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Matrix a = normal;
      a.diagonal().array() += damping * (normal.diagonal().array() + 1e-8 * scale);
      Vector delta = a.ldlt().solve(gradient);
      delta -= delta.dot(c.beta) * c.beta;
      if (!delta.allFinite()) {
        damping *= 10.0;
        continue;
      }
      if (delta.norm() < 1e-14) break;
      Vector trial = c.beta + delta;
      trial /= trial.norm();
      const Matrix d = build_reduced_design(data.x_index, data.arm, trial, system);
      const Vector eta = main_part + d * gamma;
      const double obj = penalized_loglik(family, data.y, eta, gamma, rho);
      if (std::isfinite(obj) && obj >= fit.objective) {
        next = trial;
        gain = obj - fit.objective;
        moved = true;
        damping = std::max(damping * 0.1, 1e-10);
        break;
      }
      damping *= 10.0;
    }
    if (!moved) {
      c.converged = true;
      break;
    }
    const double change = (next - c.beta).lpNorm<Eigen::Infinity>();
    c.beta = next;
    if (change < options.beta_tol || gain < 1e-10 * (1.0 + std::abs(fit.objective))) {
      c.converged = true;
      break;
    }
  }
  if (c.fit.coef.size() == 0) {
    // max_outer == 0: no beta update, just the profile fit at the start
    const SplineSystem system = SplineSystem::for_index_range(
        data.x_index * c.beta, data.pi0, data.pi1, options.spline);
    c.fit = fit_given_beta(data, family, system, c.beta, rho,
                           start_coefficients(data, system), options.scoring);
    c.converged = true;
  }
  c.outer = std::min(c.outer, options.max_outer);
  return c;
}

}  // namespace

Vector linear_interaction_direction(const Dataset& data, const Family& family,
                                    const ScoringOptions& scoring) {
  const auto pm = data.x_main.cols();
  const auto pi = data.x_index.cols();
  Matrix design(data.n(), pm + pi);
  design.leftCols(pm) = data.x_main;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double a = data.arm[static_cast<std::size_t>(i)] - data.pi1;
    design.row(i).tail(pi) = a * data.x_index.row(i);
  }
  const auto fit = fit_iwls(family, data.y, Vector::Zero(data.n()), design,
                            Vector::Zero(pm + pi), Vector(), scoring);
  Vector b = fit.coef.tail(pi);
  if (!(b.norm() > 0.0) || !b.allFinite()) {
    b = Vector::Zero(pi);
    b[0] = 1.0;
  }
  return b / b.norm();
}

Initialization initialize(const Dataset& data, const Family& family,
                          const InitOptions& options) {
  data.validate(true);
  if (data.y.size() != data.n()) {
    throw DataError("initialize: dataset has no outcome column");
  }
  family.check_response(data.y);
  if (options.fixed_rho && !(*options.fixed_rho > 0.0)) {
    throw DomainError("initialize: fixed rho must be positive");
  }

  const Vector linear = linear_interaction_direction(data, family, options.scoring);
  Candidate best = profile_from(data, family, linear, options);
  if (options.beta0) {
    Candidate alt = profile_from(data, family, *options.beta0, options);
    if (alt.fit.objective > best.fit.objective) best = std::move(alt);
  }
  if (!best.converged) {
    log_warning("initialization: profile fit reached max_outer without "
                "converging; using the last iterate");
  }

  Vector beta = best.beta;
  const Vector& reference = options.beta0 ? *options.beta0 : linear;
  if (beta.dot(reference) < 0.0) beta = -beta;

  const auto pm = data.x_main.cols();
  Family fitted_family = family;
  if (family.kind() == FamilyKind::gaussian) {
    const Vector mu = make_predictor(family, best.fit.scoring.eta).mu;
    const double phi = pearson_dispersion(
        family, data.y, mu, static_cast<int>(pm + options.spline.n_basis));
    fitted_family = family.with_dispersion(std::max(phi, 1e-12));
  }

  SplineSystem system = SplineSystem::for_index_range(
      data.x_index * beta, data.pi0, data.pi1, options.spline);
  double rho = options.fixed_rho.value_or(best.fit.rho);
  ProfileFit fit = fit_given_beta(data, fitted_family, system, beta, rho,
                                  start_coefficients(data, system),
                                  options.scoring);
  if (!options.fixed_rho) {
    rho = select_rho(data, system, beta, fit, options.rho_grid);
    fit = fit_given_beta(data, fitted_family, system, beta, rho, fit.coef,
                         options.scoring);
  }

  Initialization out{ParameterState{}, rho, system, fitted_family, linear,
                     fit.objective, best.outer, best.converged};
  out.state.m = fit.coef.head(pm);
  out.state.beta = beta;
  out.state.gamma = fit.coef.tail(system.l());
  out.state.gamma_tilde = system.constrain(out.state.gamma);
  return out;
}

}  // namespace bsim
