#ifndef BSIM_STATE_HPP
#define BSIM_STATE_HPP

#include "bsim/types.hpp"

namespace bsim {

/// One draw of theta = (m, beta, gamma). gamma_tilde = Z * gamma is kept
/// alongside so downstream code never has to rebuild it.
struct ParameterState {
  Vector m;            // main-effect coefficients (x_main columns)
  Vector beta;         // unit-norm index direction (x_index columns)
  Vector gamma;        // unconstrained spline coefficients, length l
  Vector gamma_tilde;  // constrained coefficients, length 2l: [arm 0; arm 1]
};

}  // namespace bsim

#endif  // BSIM_STATE_HPP
