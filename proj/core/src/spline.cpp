#include "bsim/spline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "bsim/errors.hpp"

namespace bsim {

namespace {

constexpr int kMaxDegree = 7;

// Cox-de Boor triangle for the deg+1 functions supported on [t_span, t_span+1).
void basis_functions(const std::vector<double>& t, int span, double u, int deg,
                     double* out) {
  std::array<double, kMaxDegree + 2> left{};
  std::array<double, kMaxDegree + 2> right{};
  out[0] = 1.0;
  for (int j = 1; j <= deg; ++j) {
    left[j] = u - t[span + 1 - j];
    right[j] = t[span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
}

void check_probabilities(double pi0, double pi1) {
  if (!(pi0 > 0.0 && pi0 < 1.0 && pi1 > 0.0 && pi1 < 1.0) ||
      std::abs(pi0 + pi1 - 1.0) > 1e-9) {
    throw DomainError("randomisation probabilities must lie in (0,1) and sum "
                      "to 1 (got " + std::to_string(pi0) + ", " +
                      std::to_string(pi1) + ")");
  }
}

}  // namespace

BSplineBasis::BSplineBasis(std::vector<double> knots, int degree)
    : knots_(std::move(knots)), degree_(degree) {
  if (degree_ < 0 || degree_ > kMaxDegree) {
    throw DomainError("spline degree must be in [0, " +
                      std::to_string(kMaxDegree) + "]");
  }
  size_ = static_cast<int>(knots_.size()) - degree_ - 1;
  if (size_ < 1) {
    throw DomainError("knot vector too short for the requested degree");
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] >= knots_[i - 1]) || !std::isfinite(knots_[i])) {
      throw DomainError("knot sequence must be non-decreasing and finite");
    }
  }
  if (!(upper() > lower())) {
    throw DomainError("knot sequence spans an empty interval");
  }
  for (std::size_t i = 0; i + degree_ + 1 < knots_.size(); ++i) {
    if (knots_[i + degree_ + 1] == knots_[i]) {
      throw DomainError("knot multiplicity exceeds degree + 1");
    }
  }
}

BSplineBasis BSplineBasis::clamped_uniform(double lower, double upper,
                                           int n_basis, int degree) {
  if (!(upper > lower)) {
    throw DomainError("clamped_uniform: upper must exceed lower");
  }
  if (n_basis < degree + 1) {
    throw DomainError("clamped_uniform: need at least degree + 1 basis "
                      "functions");
  }
  const int interior = n_basis - degree - 1;
  std::vector<double> knots;
  knots.reserve(static_cast<std::size_t>(n_basis + degree + 1));
  knots.insert(knots.end(), static_cast<std::size_t>(degree + 1), lower);
  const double h = (upper - lower) / (interior + 1);
  for (int k = 1; k <= interior; ++k) knots.push_back(lower + k * h);
  knots.insert(knots.end(), static_cast<std::size_t>(degree + 1), upper);
  return BSplineBasis(std::move(knots), degree);
}

double BSplineBasis::clamp(double u) const {
  return std::clamp(u, lower(), upper());
}

int BSplineBasis::find_span(double u) const {
  const auto first = knots_.begin() + degree_;
  const auto last = knots_.begin() + size_ + 1;
  int span = static_cast<int>(std::upper_bound(first, last, u) - knots_.begin()) - 1;
  span = std::clamp(span, degree_, size_ - 1);
  while (span > degree_ && knots_[span] == knots_[span + 1]) --span;
  return span;
}

int BSplineBasis::evaluate_local(double u, std::span<double> values) const {
  const double x = clamp(u);
  const int span = find_span(x);
  basis_functions(knots_, span, x, degree_, values.data());
  return span - degree_;
}

Vector BSplineBasis::evaluate(double u) const {
  std::array<double, kMaxDegree + 1> local{};
  const int first = evaluate_local(u, local);
  Vector out = Vector::Zero(size_);
  for (int k = 0; k <= degree_; ++k) out[first + k] = local[k];
  return out;
}

Vector BSplineBasis::derivative(double u) const {
  Vector out = Vector::Zero(size_);
  if (degree_ == 0) return out;
  const double x = clamp(u);
  const int span = find_span(x);
  std::array<double, kMaxDegree + 1> lower_deg{};
  basis_functions(knots_, span, x, degree_ - 1, lower_deg.data());
  const int p = degree_;
  for (int k = 0; k <= p; ++k) {
    const int i = span - p + k;
    double value = 0.0;
    if (k >= 1) {
      const double denom = knots_[i + p] - knots_[i];
      if (denom > 0.0) value += lower_deg[k - 1] / denom;
    }
    if (k <= p - 1) {
      const double denom = knots_[i + p + 1] - knots_[i + 1];
      if (denom > 0.0) value -= lower_deg[k] / denom;
    }
    out[i] = p * value;
  }
  return out;
}

Matrix constraint_basis(double pi0, double pi1, int l) {
  check_probabilities(pi0, pi1);
  if (l < 1) throw DomainError("constraint_basis: l must be positive");
  Matrix stacked(2 * l, l);
  stacked << pi0 * Matrix::Identity(l, l), pi1 * Matrix::Identity(l, l);
  const Eigen::HouseholderQR<Matrix> qr(stacked);
  const Matrix q = qr.householderQ() * Matrix::Identity(2 * l, 2 * l);
  Matrix z = q.rightCols(l);
  for (int j = 0; j < l; ++j) {
    for (int i = 0; i < 2 * l; ++i) {
      if (std::abs(z(i, j)) > 1e-12) {
        if (z(i, j) < 0.0) z.col(j) *= -1.0;
        break;
      }
    }
  }
  return z;
}

SplineSystem::SplineSystem(BSplineBasis basis, double pi0, double pi1)
    : basis_(std::move(basis)), pi0_(pi0), pi1_(pi1) {
  constraint_ = constraint_basis(pi0_, pi1_, basis_.size());
}

SplineSystem SplineSystem::for_index_range(const Vector& index_values,
                                           double pi0, double pi1,
                                           const SplineSettings& settings) {
  if (index_values.size() == 0) {
    throw DataError("cannot place knots without index values");
  }
  double lo = index_values.minCoeff();
  double hi = index_values.maxCoeff();
  double range = hi - lo;
  if (!(range > 0.0)) range = 1.0;
  const double pad = settings.knot_padding * range;
  lo -= pad;
  hi += pad;
  return SplineSystem(BSplineBasis::clamped_uniform(lo, hi, settings.n_basis,
                                                    settings.degree),
                      pi0, pi1);
}

double SplineSystem::g(double u, int arm, const Vector& gamma_tilde) const {
  std::array<double, kMaxDegree + 1> local{};
  const int first = basis_.evaluate_local(u, local);
  const int offset = arm == 1 ? l() : 0;
  double value = 0.0;
  for (int k = 0; k <= basis_.degree(); ++k) {
    value += local[k] * gamma_tilde[offset + first + k];
  }
  return value;
}

double SplineSystem::contrast(double u, const Vector& gamma_tilde) const {
  std::array<double, kMaxDegree + 1> local{};
  const int first = basis_.evaluate_local(u, local);
  double value = 0.0;
  for (int k = 0; k <= basis_.degree(); ++k) {
    const int j = first + k;
    value += local[k] * (gamma_tilde[l() + j] - gamma_tilde[j]);
  }
  return value;
}

DesignMatrices build_design(const Matrix& x_index, std::span<const int> arm,
                            const Vector& beta, const SplineSystem& system) {
  const int l = system.l();
  const auto n = x_index.rows();
  const Vector u = x_index * beta;
  DesignMatrices out{Matrix::Zero(n, 2 * l), Matrix()};
  std::array<double, kMaxDegree + 1> local{};
  for (Eigen::Index i = 0; i < n; ++i) {
    const int first = system.basis().evaluate_local(u[i], local);
    const int offset = arm[static_cast<std::size_t>(i)] == 1 ? l : 0;
    for (int k = 0; k <= system.basis().degree(); ++k) {
      out.d_tilde(i, offset + first + k) = local[k];
    }
  }
  out.d = out.d_tilde * system.constraint();
  return out;
}

Matrix build_reduced_design(const Matrix& x_index, std::span<const int> arm,
                            const Vector& beta, const SplineSystem& system) {
  const int l = system.l();
  const int width = system.basis().degree() + 1;
  const auto n = x_index.rows();
  const Vector u = x_index * beta;
  const Matrix& z = system.constraint();
  Matrix d(n, l);
  std::array<double, kMaxDegree + 1> local{};
  for (Eigen::Index i = 0; i < n; ++i) {
    const int first = system.basis().evaluate_local(u[i], local);
    const int offset = arm[static_cast<std::size_t>(i)] == 1 ? l : 0;
    const Eigen::Map<const Eigen::RowVectorXd> psi(local.data(), width);
    d.row(i).noalias() = psi * z.middleRows(offset + first, width);
  }
  return d;
}

double evaluate_g(const Vector& x_index, int arm, const ParameterState& state,
                  const SplineSystem& system) {
  const Vector gamma_tilde = system.constrain(state.gamma);
  return system.g(x_index.dot(state.beta), arm, gamma_tilde);
}

}  // namespace bsim
