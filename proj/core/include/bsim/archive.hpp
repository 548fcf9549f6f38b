#ifndef BSIM_ARCHIVE_HPP
#define BSIM_ARCHIVE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bsim/family.hpp"
#include "bsim/sampler.hpp"
#include "bsim/spline.hpp"

namespace bsim {

inline constexpr std::uint32_t kArchiveVersion = 1;

/// Contents of draws.bin: the fitted model needed to summarise or score
/// without the training data.
///
/// Layout (all integers and doubles little-endian):
///   "BSIMDRAW" | u32 version | u64 config_hash | u64 seed
///   str config_text
///   u8 family | f64 dispersion
///   u32 degree | u32 n_knots | f64[n_knots] | f64 pi0 | f64 pi1
///   f64 rho | f64 lambda_prior | u32 p_main | u32 p_index | u32 l
///   str[p_main] main_names | str[p_index] index_names
///   f64[p_index] beta0 | f64[p_index] beta_init
///   u32 n_chains | f64[n_chains] chain_acceptance | f64 acceptance_rate
///   i64 rejected_on_error | i64 unconverged_scoring
///   u64 n_states | n_states x { u32 chain | f64[p_main] m |
///                               f64[p_index] beta | f64[l] gamma }
/// where str is u32 length + bytes.
struct ModelArchive {
  std::string config_text;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  FamilyKind family_kind = FamilyKind::bernoulli;
  double dispersion = 1.0;
  int degree = 3;
  std::vector<double> knots;
  double pi0 = 0.5;
  double pi1 = 0.5;
  double rho = 1.0;
  double lambda_prior = 0.0;
  std::vector<std::string> main_names;
  std::vector<std::string> index_names;
  Vector beta0;
  Vector beta_init;
  int n_chains = 1;
  PosteriorDraws draws;

  SplineSystem system() const;
  Family family() const { return Family(family_kind, dispersion); }
};

void write_archive(const std::string& path, const ModelArchive& archive);

// Rebuilds gamma_tilde for every state. Throws DataError on a bad magic,
// unsupported version or truncated file.
ModelArchive read_archive(const std::string& path);

}  // namespace bsim

#endif  // BSIM_ARCHIVE_HPP
