#include "bsim/sampler.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "bsim/diagnostics.hpp"
#include "bsim/errors.hpp"
#include "bsim/linalg.hpp"
#include "bsim/logging.hpp"

namespace bsim {

void ChainConfig::validate() const {
  if (n_iter < 1) throw ConfigError("n_iter must be >= 1");
  if (burn_in < 0 || burn_in >= n_iter) {
    throw ConfigError("burn_in must satisfy 0 <= burn_in < n_iter");
  }
  if (thin < 1) throw ConfigError("thin must be >= 1");
  if (n_chains < 1) throw ConfigError("n_chains must be >= 1");
}

int ChainConfig::kept_per_chain() const {
  return (n_iter - burn_in + thin - 1) / thin;
}

GibbsSampler::GibbsSampler(const Dataset& data, const Family& family,
                           const SplineSystem& system,
                           const HyperParameters& hyper, ScoringOptions scoring)
    : data_(data),
      family_(family),
      system_(system),
      hyper_(hyper),
      scoring_(scoring) {
  hyper_.validate();
  if (hyper_.m0.size() != data_.x_main.cols() ||
      hyper_.beta0.size() != data_.x_index.cols()) {
    throw DomainError("hyperparameter dimensions do not match the data");
  }
  q_inverse_ = spd_inverse(Eigen::LLT<Matrix>(hyper_.q));
  q_inverse_m0_ = q_inverse_ * hyper_.m0;
}

GibbsSampler::MConditional GibbsSampler::m_conditional(
    const ParameterState& state) const {
  const Matrix d =
      build_reduced_design(data_.x_index, data_.arm, state.beta, system_);
  const Vector offset = d * state.gamma;

  MConditional out;
  out.scoring = fit_iwls(family_, data_.y, offset, data_.x_main, state.m,
                         Vector(), scoring_);
  const Vector& w = out.scoring.w;
  Matrix precision = q_inverse_;
  precision.noalias() += data_.x_main.transpose() * w.asDiagonal() * data_.x_main;
  out.precision_chol = cholesky_with_jitter(precision, "m conditional");
  out.mean = out.precision_chol.solve(
      q_inverse_m0_ + data_.x_main.transpose() * (w.asDiagonal() * out.scoring.z));
  out.covariance = spd_inverse(out.precision_chol);
  return out;
}

Vector GibbsSampler::sample_m(const ParameterState& state, Rng& rng) const {
  const auto cond = m_conditional(state);
  return draw_from_precision(cond.mean, cond.precision_chol, rng);
}

GibbsSampler::BetaEvaluation GibbsSampler::evaluate_beta(
    const Vector& beta, const Vector& m) const {
  BetaEvaluation eval;
  eval.beta = beta;
  eval.d = build_reduced_design(data_.x_index, data_.arm, beta, system_);
  const Vector offset = data_.x_main * m;
  const Vector penalty = Vector::Constant(system_.l(), hyper_.rho);
  eval.scoring = fit_iwls(family_, data_.y, offset, eval.d,
                          Vector::Zero(system_.l()), penalty, scoring_);
  eval.cache = marginal_cache(eval.d, eval.scoring.w, eval.scoring.z, hyper_.rho);
  eval.log_prior = hyper_.lambda_prior > 0.0
                       ? vmf_log_kernel(beta, hyper_.beta0, hyper_.lambda_prior)
                       : 0.0;
  eval.log_marginal = log_marginal_kernel(eval.cache) + eval.log_prior;
  if (!std::isfinite(eval.log_marginal)) {
    throw NumericalError("beta log-marginal is not finite");
  }
  return eval;
}

double GibbsSampler::beta_log_marginal(const Vector& beta,
                                       const Vector& m) const {
  return evaluate_beta(beta, m).log_marginal;
}

GibbsSampler::MetropolisResult GibbsSampler::metropolis_beta(
    const ParameterState& state, Rng& rng, const BetaProposal& proposal) const {
  MetropolisResult result;
  double current_log = -std::numeric_limits<double>::infinity();
  try {
    result.evaluation = evaluate_beta(state.beta, state.m);
    current_log = result.evaluation->log_marginal;
  } catch (const std::exception&) {
    result.evaluation.reset();
  }

  const Vector candidate = proposal ? proposal(state.beta, rng)
                                    : vmf_sample(state.beta, hyper_.lambda_prop, rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double log_u = std::log(unif(rng));

  std::optional<BetaEvaluation> proposed;
  try {
    proposed = evaluate_beta(candidate, state.m);
  } catch (const std::exception&) {
    result.proposal_failed = true;
    return result;
  }
  const double log_ratio = proposed->log_marginal - current_log;
  if (log_u < log_ratio) {
    result.evaluation = std::move(proposed);
    result.accepted = true;
  }
  return result;
}

GibbsSampler::GammaConditional GibbsSampler::gamma_conditional(
    const BetaEvaluation& eval) const {
  const auto& c = eval.cache;
  GammaConditional out;
  // (S0/2)(I + S0^{-1} S_rho) b = (S0 + S_rho) b / 2
  out.mean = 0.5 * (c.sigma_0 + c.sigma_rho) * c.dtwz;
  out.covariance = 0.5 * c.sigma_0;
  return out;
}

Vector GibbsSampler::sample_gamma(const BetaEvaluation& eval, Rng& rng) const {
  const auto cond = gamma_conditional(eval);
  // Precision of S0/2 is 2 S0^{-1}.
  const auto chol = cholesky_with_jitter(2.0 * eval.cache.precision_0,
                                         "gamma conditional");
  return draw_from_precision(cond.mean, chol, rng);
}

GibbsSampler::SweepStats GibbsSampler::sweep(ParameterState& state,
                                             Rng& rng) const {
  SweepStats stats;
  try {
    const auto cond = m_conditional(state);
    if (!cond.scoring.converged) ++stats.unconverged;
    state.m = draw_from_precision(cond.mean, cond.precision_chol, rng);
  } catch (const NumericalError& e) {
    log_warning(std::string("m update skipped: ") + e.what());
  }

  auto step = metropolis_beta(state, rng);
  stats.accepted = step.accepted;
  stats.proposal_failed = step.proposal_failed;
  if (step.evaluation) {
    if (!step.evaluation->scoring.converged) ++stats.unconverged;
    state.beta = step.evaluation->beta;
    state.gamma = sample_gamma(*step.evaluation, rng);
    state.gamma_tilde = system_.constrain(state.gamma);
  }
  return stats;
}

Rng chain_rng(std::uint64_t seed, int chain) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chain), 0x6a09e667u};
  return Rng(seq);
}

PosteriorDraws run_chain(const GibbsSampler& sampler,
                         const ParameterState& start, const ChainConfig& config,
                         int chain) {
  config.validate();
  Rng rng = chain_rng(config.seed, chain);
  ParameterState state = start;
  state.gamma_tilde = sampler.system().constrain(state.gamma);

  PosteriorDraws out;
  out.states.reserve(static_cast<std::size_t>(config.kept_per_chain()));
  long long accepted = 0;
  long long proposals = 0;
  for (int it = 0; it < config.n_iter; ++it) {
    const auto stats = sampler.sweep(state, rng);
    out.unconverged_scoring += stats.unconverged;
    if (stats.proposal_failed) ++out.rejected_on_error;
    if (it < config.burn_in) continue;
    ++proposals;
    if (stats.accepted) ++accepted;
    if ((it - config.burn_in) % config.thin == 0) {
      out.states.push_back(state);
      out.chain.push_back(chain);
    }
  }
  out.acceptance_rate =
      proposals > 0 ? static_cast<double>(accepted) / proposals : 0.0;
  out.chain_acceptance = {out.acceptance_rate};
  if (accepted == 0) {
    log_warning("chain " + std::to_string(chain) +
                " accepted no beta proposals after burn-in");
  }
  return out;
}

namespace {

Diagnostics compute_diagnostics(const PosteriorDraws& draws, int n_chains,
                                const Dataset& data) {
  Diagnostics diag;
  if (draws.empty()) return diag;
  const auto trace = [&](auto&& pick) {
    std::vector<std::vector<double>> chains(static_cast<std::size_t>(n_chains));
    for (std::size_t s = 0; s < draws.states.size(); ++s) {
      chains[static_cast<std::size_t>(draws.chain[s])].push_back(pick(draws.states[s]));
    }
    return chains;
  };
  const auto add = [&](std::string name, const std::vector<std::vector<double>>& chains) {
    diag.names.push_back(std::move(name));
    diag.ess.push_back(effective_sample_size(chains));
    diag.split_rhat.push_back(split_rhat(chains));
  };
  for (Eigen::Index j = 0; j < data.x_index.cols(); ++j) {
    add("beta[" + data.index_names[static_cast<std::size_t>(j)] + "]",
        trace([j](const ParameterState& s) { return s.beta[j]; }));
  }
  for (Eigen::Index j = 0; j < data.x_main.cols(); ++j) {
    add("m[" + data.main_names[static_cast<std::size_t>(j)] + "]",
        trace([j](const ParameterState& s) { return s.m[j]; }));
  }
  return diag;
}

}  // namespace

PosteriorDraws run_chains(const GibbsSampler& sampler,
                          const ParameterState& start,
                          const ChainConfig& config, unsigned max_threads) {
  config.validate();
  const auto n_chains = static_cast<std::size_t>(config.n_chains);
  std::vector<PosteriorDraws> per_chain(n_chains);
  std::vector<std::exception_ptr> errors(n_chains);

  unsigned threads = max_threads == 0 ? std::thread::hardware_concurrency()
                                      : max_threads;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_chains)));

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t c = next++; c < n_chains; c = next++) {
      try {
        per_chain[c] = run_chain(sampler, start, config, static_cast<int>(c));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  PosteriorDraws merged;
  double accepted_weighted = 0.0;
  for (auto& chain : per_chain) {
    merged.states.insert(merged.states.end(),
                         std::make_move_iterator(chain.states.begin()),
                         std::make_move_iterator(chain.states.end()));
    merged.chain.insert(merged.chain.end(), chain.chain.begin(), chain.chain.end());
    merged.chain_acceptance.push_back(chain.acceptance_rate);
    accepted_weighted += chain.acceptance_rate;
    merged.rejected_on_error += chain.rejected_on_error;
    merged.unconverged_scoring += chain.unconverged_scoring;
  }
  merged.acceptance_rate = accepted_weighted / static_cast<double>(n_chains);
  merged.diagnostics = compute_diagnostics(merged, config.n_chains, sampler.data());
  return merged;
}

}  // namespace bsim
