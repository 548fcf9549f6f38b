#ifndef BSIM_SPLINE_HPP
#define BSIM_SPLINE_HPP

#include <span>
#include <vector>

#include "bsim/state.hpp"
#include "bsim/types.hpp"

namespace bsim {

/// B-spline basis of arbitrary degree on a full (possibly clamped) knot
/// vector. Basis size is knots.size() - degree - 1. Inputs outside
/// [lower(), upper()] are clamped to the nearest boundary before evaluation.
class BSplineBasis {
 public:
  BSplineBasis(std::vector<double> knots, int degree);

  // Open/clamped knot vector with evenly spaced interior knots.
  static BSplineBasis clamped_uniform(double lower, double upper, int n_basis,
                                      int degree = 3);

  int size() const { return size_; }
  int degree() const { return degree_; }
  double lower() const { return knots_[degree_]; }
  double upper() const { return knots_[size_]; }
  const std::vector<double>& knots() const { return knots_; }

  bool in_range(double u) const { return u >= lower() && u <= upper(); }
  double clamp(double u) const;

  // Writes the degree+1 possibly-nonzero values into `values` and returns
  // the index of the first one.
  int evaluate_local(double u, std::span<double> values) const;

  Vector evaluate(double u) const;
  Vector derivative(double u) const;

 private:
  int find_span(double u) const;

  std::vector<double> knots_;
  int degree_;
  int size_;
};

/// 2l x l matrix with orthonormal columns spanning the null space of
/// [pi0*I_l, pi1*I_l]. Built from a Householder QR of the 2l x l stacked
/// constraint; each column is sign-normalised so that its first nonzero
/// entry is positive.
Matrix constraint_basis(double pi0, double pi1, int l);

struct SplineSettings {
  int n_basis = 8;
  int degree = 3;
  double knot_padding = 0.05;
};

/// Basis + randomisation probabilities + constraint basis. Immutable.
class SplineSystem {
 public:
  SplineSystem(BSplineBasis basis, double pi0, double pi1);

  // Knots evenly spaced over [min - d, max + d] of the given index values,
  // d = padding * (max - min).
  static SplineSystem for_index_range(const Vector& index_values, double pi0,
                                      double pi1, const SplineSettings& settings);

  const BSplineBasis& basis() const { return basis_; }
  int l() const { return basis_.size(); }
  double pi0() const { return pi0_; }
  double pi1() const { return pi1_; }
  const Matrix& constraint() const { return constraint_; }

  Vector constrain(const Vector& gamma) const { return constraint_ * gamma; }

  // g(u, a) = psi(u)' gamma_tilde_a for a constrained coefficient vector.
  double g(double u, int arm, const Vector& gamma_tilde) const;

  // Delta(u) = psi(u)' (gamma_tilde_1 - gamma_tilde_0).
  double contrast(double u, const Vector& gamma_tilde) const;

 private:
  BSplineBasis basis_;
  double pi0_;
  double pi1_;
  Matrix constraint_;
};

/// D_tilde (n x 2l, arm-blocked basis rows) and D = D_tilde * Z (n x l).
struct DesignMatrices {
  Matrix d_tilde;
  Matrix d;
};

DesignMatrices build_design(const Matrix& x_index, std::span<const int> arm,
                            const Vector& beta, const SplineSystem& system);

// Only D; skips materialising the n x 2l block matrix.
Matrix build_reduced_design(const Matrix& x_index, std::span<const int> arm,
                            const Vector& beta, const SplineSystem& system);

double evaluate_g(const Vector& x_index, int arm, const ParameterState& state,
                  const SplineSystem& system);

}  // namespace bsim

#endif  // BSIM_SPLINE_HPP
