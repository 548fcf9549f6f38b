#ifndef BSIM_DIAGNOSTICS_HPP
#define BSIM_DIAGNOSTICS_HPP

#include <vector>

namespace bsim {

// Each inner vector is one chain's trace of a scalar parameter. Chains may
// differ in length; the shortest length is used.

// Split-R-hat: every chain is halved and the potential scale reduction is
// computed over the 2M half-chains. Returns 1 for constant traces.
double split_rhat(const std::vector<std::vector<double>>& chains);

// Effective sample size across chains using the multi-chain autocorrelation
// estimate truncated at Geyer's initial positive sequence.
double effective_sample_size(const std::vector<std::vector<double>>& chains);

}  // namespace bsim

#endif  // BSIM_DIAGNOSTICS_HPP
