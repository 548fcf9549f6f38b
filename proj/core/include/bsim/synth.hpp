#ifndef BSIM_SYNTH_HPP
#define BSIM_SYNTH_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include "bsim/dataset.hpp"
#include "bsim/family.hpp"

namespace bsim {

enum class GShape { zero, linear, quadratic, sine };

GShape parse_shape(std::string_view name);
std::string_view shape_name(GShape shape);

// s(u): 0, u, u^2 - 1, sin(u).
double shape_value(GShape shape, double u);

/// Randomised-trial generator. X has iid N(0, 1) entries, A ~ Bernoulli(pi1)
/// independently of X, and
///   eta = intercept + m_star' x + c_a s(beta_star' x)
/// with c_1 = 2 pi0 amplitude and c_0 = -2 pi1 amplitude, so that
/// pi0 c_0 + pi1 c_1 = 0.
struct Scenario {
  int n = 1000;
  int p = 5;
  double pi1 = 0.5;
  FamilyKind family = FamilyKind::bernoulli;
  double intercept = 0.0;
  Vector m_star;      // length p
  Vector beta_star;   // unit norm, length p
  GShape shape = GShape::sine;
  double amplitude = 1.0;
  double noise_sd = 1.0;  // gaussian only
  std::uint64_t seed = 1;

  double pi0() const { return 1.0 - pi1; }
  void validate() const;
};

double arm_coefficient(const Scenario& scenario, int arm);
double true_g(const Scenario& scenario, double u, int arm);

// (c_1 - c_0) s(beta_star' x)
double true_delta(const Scenario& scenario, const Vector& x);

// x_main = [1, X], x_index = X, columns x1..xp, ids 1..n. pi0/pi1 are the
// sample arm proportions, matching what ingest_csv would report.
Dataset generate(const Scenario& scenario);

// id,y,a,x1,...,xp with 17 significant digits.
void write_dataset_csv(const Dataset& data, const std::string& path);

}  // namespace bsim

#endif  // BSIM_SYNTH_HPP
