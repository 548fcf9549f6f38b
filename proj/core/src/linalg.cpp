#include "bsim/linalg.hpp"

#include <algorithm>
#include <string>

#include "bsim/errors.hpp"

namespace bsim {

Eigen::LLT<Matrix> cholesky_with_jitter(const Matrix& a, std::string_view what,
                                        double* jitter_added) {
  if (jitter_added != nullptr) *jitter_added = 0.0;
  if (!a.allFinite()) {
    throw NumericalError(std::string(what) + ": matrix has non-finite entries");
  }
  Eigen::LLT<Matrix> chol(a);
  if (chol.info() == Eigen::Success) return chol;

  const double mean_diag = std::max(a.diagonal().mean(), 1e-300);
  double scale = 1e-8;
  for (int attempt = 0; attempt < 3; ++attempt, scale *= 10.0) {
    Matrix jittered = a;
    jittered.diagonal().array() += scale * mean_diag;
    chol.compute(jittered);
    if (chol.info() == Eigen::Success) {
      if (jitter_added != nullptr) *jitter_added = scale * mean_diag;
      return chol;
    }
  }
  throw NumericalError(std::string(what) +
                       ": matrix not positive definite after jitter");
}

Matrix spd_inverse(const Eigen::LLT<Matrix>& chol) {
  const auto k = chol.matrixLLT().rows();
  Matrix inv = chol.solve(Matrix::Identity(k, k));
  return 0.5 * (inv + inv.transpose());
}

Vector standard_normal(Eigen::Index k, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector out(k);
  for (Eigen::Index i = 0; i < k; ++i) out[i] = normal(rng);
  return out;
}

Vector draw_from_precision(const Vector& mean, const Eigen::LLT<Matrix>& chol,
                           Rng& rng) {
  // P = L L'  =>  x = mean + L^{-T} e has covariance P^{-1}.
  const Vector e = standard_normal(mean.size(), rng);
  return mean + chol.matrixU().solve(e);
}

}  // namespace bsim
