#ifndef BSIM_LINALG_HPP
#define BSIM_LINALG_HPP

#include <string_view>

#include "bsim/types.hpp"

namespace bsim {

// Cholesky of a symmetric matrix. On failure adds 1e-8, 1e-7, 1e-6 times
// mean(diag) to the diagonal before giving up with NumericalError.
Eigen::LLT<Matrix> cholesky_with_jitter(const Matrix& a, std::string_view what,
                                        double* jitter_added = nullptr);

// Inverse from a Cholesky factor, symmetrised.
Matrix spd_inverse(const Eigen::LLT<Matrix>& chol);

Vector standard_normal(Eigen::Index k, Rng& rng);

// One draw from N(mean, P^{-1}) given the Cholesky factor of P.
Vector draw_from_precision(const Vector& mean, const Eigen::LLT<Matrix>& chol,
                           Rng& rng);

}  // namespace bsim

#endif  // BSIM_LINALG_HPP
