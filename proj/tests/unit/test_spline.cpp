#include <doctest.h>

#include <random>

#include "bsim/errors.hpp"
#include "bsim/spline.hpp"
#include "test_support.hpp"

using namespace bsim;

namespace {

// Cox-de Boor recursion, straight from the definition. Right-closed at the
// last knot so the clamped basis covers the whole range.
double cox_de_boor(const std::vector<double>& t, int i, int k, double u) {
  if (k == 0) {
    const double last = t.back();
    if (u == last) return (t[i] < u && t[i + 1] == last) ? 1.0 : 0.0;
    return (t[i] <= u && u < t[i + 1]) ? 1.0 : 0.0;
  }
  double left = 0, right = 0;
  double d1 = t[i + k] - t[i];
  double d2 = t[i + k + 1] - t[i + 1];
  if (d1 > 0) left = (u - t[i]) / d1 * cox_de_boor(t, i, k - 1, u);
  if (d2 > 0) right = (t[i + k + 1] - u) / d2 * cox_de_boor(t, i + 1, k - 1, u);
  return left + right;
}

}  // namespace

TEST_CASE("basis agrees with the recursive definition") {
  for (int degree : {1, 2, 3, 4}) {
    auto basis = BSplineBasis::clamped_uniform(-1.7, 2.3, degree + 4, degree);
    const auto& t = basis.knots();
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
      if (t[j + 1] <= t[j]) continue;
      for (double frac : {0.0, 0.25, 0.5, 0.9}) {
        double u = t[j] + frac * (t[j + 1] - t[j]);
        Vector v = basis.evaluate(u);
        for (int i = 0; i < basis.size(); ++i)
          CHECK(std::abs(v(i) - cox_de_boor(t, i, degree, u)) < 1e-12);
      }
    }
  }
}

TEST_CASE("non-uniform knots with multiplicity") {
  std::vector<double> t{0, 0, 0, 0, 0.3, 0.3, 1.1, 2, 2, 2, 2};
  BSplineBasis basis(t, 3);
  CHECK(basis.size() == 7);
  for (double u : {0.05, 0.3, 0.31, 0.7, 1.5, 1.99}) {
    Vector v = basis.evaluate(u);
    for (int i = 0; i < basis.size(); ++i)
      CHECK(std::abs(v(i) - cox_de_boor(t, i, 3, u)) < 1e-12);
  }
}

TEST_CASE("partition of unity, clamped ends, nonnegativity") {
  auto basis = BSplineBasis::clamped_uniform(0, 1, 8);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0, 1);
  for (int k = 0; k < 200; ++k) {
    Vector v = basis.evaluate(unif(rng));
    CHECK(v.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(v.minCoeff() >= 0.0);
  }
  Vector left = basis.evaluate(0.0);
  CHECK(left(0) == 1.0);
  CHECK(left.tail(7).cwiseAbs().maxCoeff() == 0.0);
  Vector right = basis.evaluate(1.0);
  CHECK(right(7) == doctest::Approx(1.0));
  // clamped outside the range
  CHECK((basis.evaluate(-5.0) - left).norm() == 0.0);
  CHECK((basis.evaluate(9.0) - right).norm() == 0.0);
  CHECK_FALSE(basis.in_range(1.0001));
}

TEST_CASE("derivative matches finite differences") {
  auto basis = BSplineBasis::clamped_uniform(-2, 2, 9);
  for (double u : {-1.9, -0.77, 0.1, 1.3}) {
    const double h = 1e-6;
    Vector fd = (basis.evaluate(u + h) - basis.evaluate(u - h)) / (2 * h);
    CHECK((basis.derivative(u) - fd).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("invalid knot vectors") {
  CHECK_THROWS_AS(BSplineBasis({0, 1, 0.5, 2}, 1), DomainError);
  CHECK_THROWS_AS(BSplineBasis({0, 0, 0, 0, 0, 1}, 3), DomainError);
  CHECK_THROWS_AS(BSplineBasis({0, 0, 1}, 3), DomainError);
  CHECK_THROWS_AS(BSplineBasis::clamped_uniform(1, 1, 6), DomainError);
}

TEST_CASE("constraint basis") {
  Matrix z = constraint_basis(0.5, 0.5, 1);
  CHECK(z.rows() == 2);
  CHECK(z(0, 0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(z(1, 0) == doctest::Approx(-1 / std::sqrt(2.0)));

  Matrix z3 = constraint_basis(0.3, 0.7, 3);
  for (int j = 0; j < 3; ++j) {
    Vector c = z3.col(j);
    CHECK((0.3 * c.head(3) + 0.7 * c.tail(3)).norm() < 1e-12);
  }
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (int rep = 0; rep < 50; ++rep) {
    double p1 = unif(rng);
    int l = 1 + rep % 9;
    Matrix zz = constraint_basis(1 - p1, p1, l);
    CHECK((zz.transpose() * zz - Matrix::Identity(l, l)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("design matrix block placement") {
  auto system = SplineSystem(BSplineBasis::clamped_uniform(-1, 1, 5), 0.4, 0.6);
  Matrix x(2, 2);
  x << 0.1, 0.2, -0.3, 0.4;
  Vector beta = test::unit(Vector::Ones(2));
  std::vector<int> arm{0, 1};
  auto dm = build_design(x, arm, beta, system);
  CHECK(dm.d_tilde.rows() == 2);
  CHECK(dm.d_tilde.cols() == 10);
  CHECK(dm.d_tilde.row(0).tail(5).cwiseAbs().maxCoeff() == 0.0);
  CHECK(dm.d_tilde.row(0).head(5).cwiseAbs().maxCoeff() > 0.0);
  CHECK(dm.d_tilde.row(1).head(5).cwiseAbs().maxCoeff() == 0.0);

  std::vector<int> ones{1, 1};
  auto d1 = build_design(x, ones, beta, system);
  CHECK(d1.d_tilde.leftCols(5).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reduced design reproduces pointwise g") {
  std::mt19937_64 rng(5);
  auto system = SplineSystem(BSplineBasis::clamped_uniform(-3, 3, 7), 0.35, 0.65);
  Matrix x = test::random_matrix(40, 3, rng);
  Vector beta = test::unit(test::random_vector(3, rng));
  std::vector<int> arm(40);
  for (int i = 0; i < 40; ++i) arm[i] = i % 3 == 0;
  Vector gamma = test::random_vector(system.l(), rng);
  Vector gt = system.constrain(gamma);
  Matrix d = build_reduced_design(x, arm, beta, system);
  auto full = build_design(x, arm, beta, system);
  CHECK((full.d - d).cwiseAbs().maxCoeff() < 1e-14);
  Vector fitted = d * gamma;
  ParameterState st;
  st.beta = beta;
  st.gamma = gamma;
  st.gamma_tilde = gt;
  for (int i = 0; i < 40; ++i) {
    Vector psi = system.basis().evaluate(x.row(i).dot(beta));
    double g = psi.dot(gt.segment(arm[i] * system.l(), system.l()));
    CHECK(std::abs(fitted(i) - g) < 1e-12);
    CHECK(std::abs(evaluate_g(x.row(i).transpose(), arm[i], st, system) - g) < 1e-12);
  }
}

TEST_CASE("g under the randomisation constraint") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  auto basis = BSplineBasis::clamped_uniform(-2, 2, 6);
  {
    SplineSystem sys(basis, 0.5, 0.5);
    Vector gt = sys.constrain(test::random_vector(sys.l(), rng));
    for (double u : {-1.5, 0.0, 0.4, 2.0}) CHECK(sys.g(u, 0, gt) == doctest::Approx(-sys.g(u, 1, gt)));
    Vector zero = sys.constrain(Vector::Zero(sys.l()));
    CHECK(sys.g(0.3, 1, zero) == 0.0);
  }
  for (int rep = 0; rep < 100; ++rep) {
    double p1 = unif(rng);
    SplineSystem sys(basis, 1 - p1, p1);
    Vector gt = sys.constrain(test::random_vector(sys.l(), rng));
    double u = 4 * unif(rng) - 2;
    CHECK(std::abs((1 - p1) * sys.g(u, 0, gt) + p1 * sys.g(u, 1, gt)) < 1e-10);
  }
}

TEST_CASE("knots follow the index range") {
  Vector u(4);
  u << -1, 0, 2, 3;
  auto sys = SplineSystem::for_index_range(u, 0.5, 0.5, SplineSettings{6, 3, 0.1});
  CHECK(sys.basis().lower() == doctest::Approx(-1.4));
  CHECK(sys.basis().upper() == doctest::Approx(3.4));
  CHECK(sys.l() == 6);
  auto linear = SplineSystem::for_index_range(u, 0.5, 0.5, SplineSettings{2, 1, 0.0});
  CHECK(linear.l() == 2);
  CHECK(linear.basis().knots().size() == 4);
}
