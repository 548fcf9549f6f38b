#ifndef BSIM_SAMPLER_HPP
#define BSIM_SAMPLER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bsim/dataset.hpp"
#include "bsim/family.hpp"
#include "bsim/iwls.hpp"
#include "bsim/priors.hpp"
#include "bsim/spline.hpp"
#include "bsim/state.hpp"

namespace bsim {

struct ChainConfig {
  int n_iter = 5000;
  int burn_in = 2000;
  int thin = 2;
  std::uint64_t seed = 20240101;
  int n_chains = 4;

  void validate() const;
  // Stored draws per chain: ceil((n_iter - burn_in) / thin).
  int kept_per_chain() const;
};

struct Diagnostics {
  std::vector<std::string> names;
  std::vector<double> ess;
  std::vector<double> split_rhat;
};

/// Post-burn-in, thinned draws of all chains, chain-major.
struct PosteriorDraws {
  std::vector<ParameterState> states;
  std::vector<int> chain;                  // chain index of each stored state
  double acceptance_rate = 0.0;            // post-burn-in, pooled
  std::vector<double> chain_acceptance;    // post-burn-in, per chain
  long long rejected_on_error = 0;         // proposals that failed to score
  long long unconverged_scoring = 0;       // scoring loops that hit max_iter
  Diagnostics diagnostics;

  bool empty() const { return states.empty(); }
};

using BetaProposal = std::function<Vector(const Vector& current, Rng& rng)>;

/// Metropolis-within-Gibbs kernel for (m, beta, gamma) given fixed data,
/// family, spline system and hyperparameters. All methods are const and the
/// object holds references only, so chains can share one sampler.
class GibbsSampler {
 public:
  GibbsSampler(const Dataset& data, const Family& family,
               const SplineSystem& system, const HyperParameters& hyper,
               ScoringOptions scoring = {});

  /// Gaussian full conditional of m: mean (Q^-1 + X'WX)^-1 (Q^-1 m0 + X'Wz),
  /// covariance (Q^-1 + X'WX)^-1, with (z, W) from scoring m at fixed g.
  struct MConditional {
    Vector mean;
    Matrix covariance;
    Eigen::LLT<Matrix> precision_chol;
    IwlsState scoring;
  };
  MConditional m_conditional(const ParameterState& state) const;
  Vector sample_m(const ParameterState& state, Rng& rng) const;

  /// Everything computed for one beta at fixed m: the reduced design, the
  /// gamma-mode scoring result, the Gaussian cache and the log density.
  struct BetaEvaluation {
    Vector beta;
    Matrix d;
    IwlsState scoring;
    PosteriorGaussianCache cache;
    double log_prior = 0.0;
    double log_marginal = 0.0;  // log_marginal_kernel + log_prior
  };
  BetaEvaluation evaluate_beta(const Vector& beta, const Vector& m) const;
  double beta_log_marginal(const Vector& beta, const Vector& m) const;

  struct MetropolisResult {
    std::optional<BetaEvaluation> evaluation;  // of the retained beta
    bool accepted = false;
    bool proposal_failed = false;
  };
  // Proposes from `proposal` (default vMF(current, lambda_prop)) and accepts
  // with probability min{1, exp(new - current)}. A proposal that fails to
  // score is rejected.
  MetropolisResult metropolis_beta(const ParameterState& state, Rng& rng,
                                   const BetaProposal& proposal = {}) const;

  /// gamma | beta, m, Y ~ N((S0/2)(I + S0^-1 S_rho) D'Wz, S0/2).
  struct GammaConditional {
    Vector mean;
    Matrix covariance;
  };
  GammaConditional gamma_conditional(const BetaEvaluation& eval) const;
  Vector sample_gamma(const BetaEvaluation& eval, Rng& rng) const;

  struct SweepStats {
    bool accepted = false;
    bool proposal_failed = false;
    int unconverged = 0;
  };
  // m, then beta, then gamma. Updates `state` in place.
  SweepStats sweep(ParameterState& state, Rng& rng) const;

  const Dataset& data() const { return data_; }
  const Family& family() const { return family_; }
  const SplineSystem& system() const { return system_; }
  const HyperParameters& hyper() const { return hyper_; }

 private:
  const Dataset& data_;
  const Family& family_;
  const SplineSystem& system_;
  const HyperParameters& hyper_;
  ScoringOptions scoring_;
  Matrix q_inverse_;
  Vector q_inverse_m0_;
};

// Per-chain rng stream derived from (seed, chain index).
Rng chain_rng(std::uint64_t seed, int chain);

/// Runs one chain from `start` and returns its kept states plus counters in
/// a single-chain PosteriorDraws (chain index recorded as `chain`).
PosteriorDraws run_chain(const GibbsSampler& sampler,
                         const ParameterState& start, const ChainConfig& config,
                         int chain);

/// Runs config.n_chains chains on separate threads (at most
/// max_threads; 0 means hardware concurrency), merges them in chain order and
/// computes diagnostics. Identical inputs give bit-identical draws regardless
/// of thread count.
PosteriorDraws run_chains(const GibbsSampler& sampler,
                          const ParameterState& start,
                          const ChainConfig& config, unsigned max_threads = 0);

}  // namespace bsim

#endif  // BSIM_SAMPLER_HPP
