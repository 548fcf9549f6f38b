// Acceptance suite: one PASS/FAIL line per criterion.
//   bsim_acceptance            all criteria
//   bsim_acceptance 1 3 6      a subset

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bsim/config.hpp"
#include "bsim/dataset.hpp"
#include "bsim/initialize.hpp"
#include "bsim/iwls.hpp"
#include "bsim/logging.hpp"
#include "bsim/pipeline.hpp"
#include "bsim/report.hpp"
#include "bsim/sampler.hpp"
#include "bsim/spline.hpp"
#include "bsim/synth.hpp"
#include "test_support.hpp"

using namespace bsim;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared oracles

// Logistic mode of  sum[y eta - log(1 + e^eta)] - rho/2 |c|^2,  eta = off + X c.
Vector newton_logistic(const Matrix& x, const Vector& y, const Vector& off, double rho) {
  Vector c = Vector::Zero(x.cols());
  for (int it = 0; it < 200; ++it) {
    Vector eta = off + x * c;
    Vector p = (1.0 + (-eta.array()).exp()).inverse().matrix();
    Vector grad = x.transpose() * (y - p) - rho * c;
    Matrix info = x.transpose() * (p.array() * (1 - p.array())).matrix().asDiagonal() * x;
    info.diagonal().array() += rho;
    Vector step = info.ldlt().solve(grad);
    c += step;
    if (step.cwiseAbs().maxCoeff() < 1e-15) break;
  }
  return c;
}

struct Linearisation {
  Vector z;  // offset removed
  Vector w;
};

Linearisation logistic_linearisation(const Matrix& x, const Vector& y, const Vector& off,
                                     const Vector& coef) {
  Linearisation out;
  const Vector fit = x * coef;
  Vector p = (1.0 + (-(off + fit).array()).exp()).inverse().matrix();
  out.w = (p.array() * (1 - p.array())).matrix();
  out.z = fit + ((y - p).array() / out.w.array()).matrix();
  return out;
}

// Gauss-Hermite nodes and weights for exp(-t^2) by Golub-Welsch.
void gauss_hermite(int n, std::vector<double>& t, std::vector<double>& w) {
  Matrix j = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) j(k, k - 1) = j(k - 1, k) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(j);
  t.resize(n);
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    t[k] = es.eigenvalues()(k);
    const double v = es.eigenvectors()(0, k);
    w[k] = std::sqrt(std::numbers::pi) * v * v;
  }
}

Matrix inverse2(const Matrix& a) {
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  Matrix inv(2, 2);
  inv << a(1, 1) / det, -a(0, 1) / det, -a(1, 0) / det, a(0, 0) / det;
  return inv;
}

// ---------------------------------------------------------------------------
// 1. Marginalisation oracle

Outcome criterion_1() {
  const auto t0 = Clock::now();
  Scenario sc = test::small_scenario(60, 3, 2024, GShape::sine, 1.0);
  Dataset data = generate(sc);
  double radius = 0;
  for (Eigen::Index i = 0; i < data.n(); ++i) radius = std::max(radius, data.x_index.row(i).norm());
  radius *= 1.01;
  SplineSystem system(BSplineBasis::clamped_uniform(-radius, radius, 2, 1), data.pi0, data.pi1);
  if (system.l() != 2) return {false, "spline system does not have l = 2"};

  HyperParameters hyper;
  hyper.lambda_prior = 10.0;
  hyper.beta0 = test::unit(Vector::Ones(3));
  hyper.m0 = Vector::Zero(4);
  hyper.q = 100 * Matrix::Identity(4, 4);
  hyper.rho = 0.5;
  const Family family(FamilyKind::bernoulli);
  ScoringOptions tight;
  tight.tol = 1e-13;
  tight.max_iter = 200;
  GibbsSampler sampler(data, family, system, hyper, tight);
  Vector m(4);
  m << 0.1, 0.3, -0.2, 0.05;
  const Vector offset = data.x_main * m;

  std::vector<double> gt, gw;
  gauss_hermite(40, gt, gw);
  const double pi0 = data.pi0, pi1 = data.pi1;
  const double norm = std::sqrt(pi0 * pi0 + pi1 * pi1);

  // log of the gamma integral of the joint, by tensor Gauss-Hermite
  auto oracle_log_integral = [&](const Vector& beta) {
    const auto n = data.n();
    Matrix d(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = data.x_index.row(i).dot(beta);
      const double psi0 = (radius - u) / (2 * radius);
      const double psi1 = (u + radius) / (2 * radius);
      // D_tilde row times Z with Z = [pi1 I; -pi0 I] / norm
      const double s = data.arm[i] == 1 ? -pi0 / norm : pi1 / norm;
      d(i, 0) = s * psi0;
      d(i, 1) = s * psi1;
    }
    const Vector gamma_hat = newton_logistic(d, data.y, offset, hyper.rho);
    const auto lin = logistic_linearisation(d, data.y, offset, gamma_hat);
    Matrix g = d.transpose() * lin.w.asDiagonal() * d;
    Vector b = d.transpose() * lin.w.asDiagonal() * lin.z;
    Matrix s0 = inverse2(g);
    Matrix sr = inverse2(g + hyper.rho * Matrix::Identity(2, 2));
    const Vector prior_mean = sr * b;
    const double log_det_s0 = std::log(s0(0, 0) * s0(1, 1) - s0(0, 1) * s0(1, 0));
    const double log_prior_beta = hyper.lambda_prior * beta.dot(hyper.beta0);
    auto log_joint = [&](const Vector& gamma) {
      Vector r = lin.z - d * gamma;
      double lik = -0.5 * r.dot(lin.w.asDiagonal() * r);
      Vector e = gamma - prior_mean;
      double prior = -0.5 * log_det_s0 - 0.5 * e.dot(g * e);
      return lik + prior + log_prior_beta;
    };
    const Vector centre = s0 * b;
    Eigen::LLT<Matrix> llt(s0);
    const Matrix a = llt.matrixL();
    const double log_jac = std::log(2.0 * a(0, 0) * a(1, 1));  // |sqrt(2) A|
    std::vector<double> terms;
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 40; ++j) {
        Vector t(2);
        t << gt[i], gt[j];
        const Vector gamma = centre + std::sqrt(2.0) * a * t;
        terms.push_back(std::log(gw[i]) + std::log(gw[j]) + gt[i] * gt[i] + gt[j] * gt[j] +
                        log_joint(gamma));
      }
    const double mx = *std::max_element(terms.begin(), terms.end());
    double s = 0;
    for (double v : terms) s += std::exp(v - mx);
    return log_jac + mx + std::log(s);
  };

  std::mt19937_64 rng(7);
  double worst = 0;
  for (int pair = 0; pair < 5; ++pair) {
    const Vector b1 = test::unit(test::random_vector(3, rng));
    const Vector b2 = test::unit(test::random_vector(3, rng));
    const double impl = std::exp(sampler.beta_log_marginal(b1, m) - sampler.beta_log_marginal(b2, m));
    const double ref = std::exp(oracle_log_integral(b1) - oracle_log_integral(b2));
    worst = std::max(worst, std::abs(impl / ref - 1.0));
  }
  const double secs = elapsed(t0);
  return {worst < 1e-4 && secs < 30,
          "max relative error " + fmt("%.2e", worst) + " over 5 beta pairs, " + fmt("%.2f", secs) + " s"};
}

// ---------------------------------------------------------------------------
// 2. Conditional draws

struct MomentCheck {
  int checks = 0;
  int failures = 0;
  double worst_z = 0;
  void add(double estimate, double target, double se) {
    ++checks;
    const double z = std::abs(estimate - target) / se;
    worst_z = std::max(worst_z, z);
    if (z > 3.0) ++failures;
  }
};

void moment_checks(const std::vector<Vector>& draws, const Vector& mean, const Matrix& cov,
                   MomentCheck& mc) {
  const double n = static_cast<double>(draws.size());
  const auto k = mean.size();
  Vector avg = Vector::Zero(k);
  for (const auto& d : draws) avg += d;
  avg /= n;
  for (Eigen::Index j = 0; j < k; ++j) mc.add(avg(j), mean(j), std::sqrt(cov(j, j) / n));
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index l = j; l < k; ++l) {
      double s = 0, s2 = 0;
      for (const auto& d : draws) {
        const double v = (d(j) - mean(j)) * (d(l) - mean(l));
        s += v;
        s2 += v * v;
      }
      const double est = s / n;
      const double se = std::sqrt((s2 / n - est * est) / n);
      mc.add(est, cov(j, l), se);
    }
}

Outcome criterion_2() {
  const auto t0 = Clock::now();
  Scenario sc = test::small_scenario(300, 3, 99, GShape::sine, 1.5);
  Dataset data = generate(sc);
  const Family family(FamilyKind::bernoulli);
  InitOptions io;
  io.spline.n_basis = 6;
  auto init = initialize(data, family, io);
  HyperParameters hyper;
  hyper.lambda_prior = 100;
  hyper.beta0 = init.state.beta;
  hyper.m0 = Vector::Constant(data.x_main.cols(), 0.1);
  hyper.q = 4.0 * Matrix::Identity(data.x_main.cols(), data.x_main.cols());
  hyper.rho = init.rho;
  ScoringOptions tight;
  tight.tol = 1e-13;
  tight.max_iter = 200;
  GibbsSampler sampler(data, init.family, init.system, hyper, tight);
  const ParameterState& state = init.state;
  const int n_draws = 20000;

  // analytic m conditional from an independent scoring of m at fixed g
  Vector g(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i)
    g(i) = evaluate_g(data.x_index.row(i).transpose(), data.arm[i], state, init.system);
  const Matrix& x = data.x_main;
  const Vector m_mode = newton_logistic(x, data.y, g, 0.0);
  const auto lin_m = logistic_linearisation(x, data.y, g, m_mode);
  const Matrix qinv = hyper.q.inverse();
  const Matrix prec_m = qinv + x.transpose() * lin_m.w.asDiagonal() * x;
  const Matrix cov_m = prec_m.inverse();
  const Vector mean_m = cov_m * (qinv * hyper.m0 + x.transpose() * lin_m.w.asDiagonal() * lin_m.z);

  // analytic gamma conditional from an independent scoring of gamma
  const Matrix d = build_reduced_design(data.x_index, data.arm, state.beta, init.system);
  const Vector off = x * state.m;
  const Vector gamma_mode = newton_logistic(d, data.y, off, hyper.rho);
  const auto lin_g = logistic_linearisation(d, data.y, off, gamma_mode);
  const Matrix gram = d.transpose() * lin_g.w.asDiagonal() * d;
  const Vector b = d.transpose() * lin_g.w.asDiagonal() * lin_g.z;
  const Matrix s0 = gram.inverse();
  const Matrix sr = (gram + hyper.rho * Matrix::Identity(gram.rows(), gram.cols())).inverse();
  const Vector mean_g = 0.5 * (s0 + sr) * b;
  const Matrix cov_g = 0.5 * s0;

  Rng rng(2025);
  std::vector<Vector> m_draws, g_draws;
  for (int i = 0; i < n_draws; ++i) m_draws.push_back(sampler.sample_m(state, rng));
  const auto eval = sampler.evaluate_beta(state.beta, state.m);
  for (int i = 0; i < n_draws; ++i) g_draws.push_back(sampler.sample_gamma(eval, rng));

  MomentCheck mc;
  moment_checks(m_draws, mean_m, cov_m, mc);
  moment_checks(g_draws, mean_g, cov_g, mc);
  const double secs = elapsed(t0);
  return {mc.failures == 0 && secs < 60,
          std::to_string(mc.checks) + " moments (m: p=" + std::to_string(x.cols()) +
              ", gamma: l=" + std::to_string(init.system.l()) + "), " + std::to_string(mc.failures) +
              " beyond 3 SE, worst " + fmt("%.2f", mc.worst_z) + " SE, " + fmt("%.1f", secs) + " s"};
}

// ---------------------------------------------------------------------------
// 3. Constraint suite

Outcome criterion_3() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 12);
  double worst_g = 0, worst_z = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const double p1 = 0.02 + 0.96 * unif(rng);
    const int degree = rep % 4;
    const int l = std::max(size(rng), degree + 1);
    SplineSystem sys(BSplineBasis::clamped_uniform(-2, 3, l, degree), 1 - p1, p1);
    const Vector gt = sys.constrain(test::random_vector(l, rng));
    const double u = -2.5 + 6.0 * unif(rng);
    worst_g = std::max(worst_g, std::abs((1 - p1) * sys.g(u, 0, gt) + p1 * sys.g(u, 1, gt)));
    const Matrix& z = sys.constraint();
    worst_z = std::max(worst_z, (z.transpose() * z - Matrix::Identity(l, l)).cwiseAbs().maxCoeff());
  }
  return {worst_g < 1e-10 && worst_z < 1e-12,
          "1000 triples: max |pi0 g0 + pi1 g1| " + fmt("%.2e", worst_g) + ", max |Z'Z - I| " +
              fmt("%.2e", worst_z)};
}

// ---------------------------------------------------------------------------
// 4, 5, 7. Recovery scenario and its null twin, run through the file pipeline

std::vector<fs::path> produced_score_files;

struct RunRecord {
  std::string label;
  fs::path scores;
  double cosine = 0;
  double acceptance = 0;
  double coverage = 0;  // fraction of subjects whose Delta CrI covers 0
  std::size_t subjects = 0;
  std::size_t covered = 0;
};

Vector recovery_beta_star() {
  Vector b(5);
  b << 2, 1, -1, 0, 0;
  return test::unit(b);
}

Scenario recovery_scenario(std::uint64_t seed, double amplitude) {
  Scenario s;
  s.n = 1000;
  s.p = 5;
  s.pi1 = 0.5;
  s.family = FamilyKind::bernoulli;
  s.m_star = Vector::Zero(5);
  s.m_star << 0.5, -0.5, 0.3, 0, 0;
  s.beta_star = recovery_beta_star();
  s.shape = GShape::sine;
  s.amplitude = amplitude;
  s.seed = 1000 + seed;
  return s;
}

// beta0 at cosine 0.8 with beta_star, perpendicular part drawn per seed
Vector perturbed_beta0(const Vector& star, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector v = test::random_vector(static_cast<int>(star.size()), rng);
  v -= v.dot(star) * star;
  v.normalize();
  return 0.8 * star + 0.6 * v;
}

std::vector<std::string> csv_rows(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(line);
  return rows;
}

RunRecord run_scenario(const fs::path& root, const std::string& label, const Scenario& sc,
                       const Vector& beta0) {
  const fs::path dir = root / label;
  fs::create_directories(dir);
  run_synth(sc, (dir / "data.csv").string());
  RunConfig cfg;
  cfg.data_path = (dir / "data.csv").string();
  cfg.id_col = "id";
  cfg.main_cols = {"x1", "x2", "x3", "x4", "x5"};
  cfg.index_cols = cfg.main_cols;
  cfg.family = "bernoulli";
  cfg.lambda_prior = 100;
  cfg.lambda_prop = 300;
  cfg.beta0 = std::vector<double>(beta0.data(), beta0.data() + beta0.size());
  cfg.chain.n_iter = 5000;
  cfg.chain.burn_in = 2000;
  cfg.chain.thin = 2;
  cfg.chain.n_chains = 4;
  cfg.chain.seed = sc.seed;
  cfg.out_dir = (dir / "out").string();
  const auto fit = run_fit(cfg);

  RunRecord rec;
  rec.label = label;
  rec.scores = dir / "out" / "subject_scores.csv";
  produced_score_files.push_back(rec.scores);
  Vector mean(5);
  for (int j = 0; j < 5; ++j) mean(j) = fit.summary.beta[j].mean;
  rec.cosine = std::abs(mean.dot(sc.beta_star)) / mean.norm();
  rec.acceptance = fit.draws.acceptance_rate;
  for (const auto& s : fit.summary.subjects) {
    ++rec.subjects;
    if (s.cri_delta.lower <= 0.0 && s.cri_delta.upper >= 0.0) ++rec.covered;
  }
  rec.coverage = double(rec.covered) / rec.subjects;
  return rec;
}

struct ScenarioRuns {
  std::vector<RunRecord> recovery;
  std::vector<RunRecord> null_runs;
  double seconds = 0;
  bool done = false;
};

ScenarioRuns& scenario_runs(const fs::path& root) {
  static ScenarioRuns runs;
  if (runs.done) return runs;
  const auto t0 = Clock::now();
  const Vector star = recovery_beta_star();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rec = run_scenario(root, "recovery_seed" + std::to_string(seed), recovery_scenario(seed, 2.0),
                            perturbed_beta0(star, seed));
    std::fprintf(stderr, "  recovery seed %2llu: |cos| %.4f  acceptance %.3f\n",
                 static_cast<unsigned long long>(seed), rec.cosine, rec.acceptance);
    runs.recovery.push_back(rec);
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto rec = run_scenario(root, "null_seed" + std::to_string(seed), recovery_scenario(seed, 0.0),
                            perturbed_beta0(star, seed));
    std::fprintf(stderr, "  null seed %llu: CrI covers 0 for %zu of %zu subjects\n",
                 static_cast<unsigned long long>(seed), rec.covered, rec.subjects);
    runs.null_runs.push_back(rec);
  }
  runs.seconds = elapsed(t0);
  runs.done = true;
  return runs;
}

Outcome criterion_4(const fs::path& root) {
  auto& runs = scenario_runs(root);
  int good = 0;
  double min_cos = 1;
  for (const auto& r : runs.recovery) {
    good += r.cosine > 0.9;
    min_cos = std::min(min_cos, r.cosine);
  }
  std::size_t covered = 0, total = 0;
  for (const auto& r : runs.null_runs) {
    covered += r.covered;
    total += r.subjects;
  }
  const double coverage = double(covered) / total;
  const bool pass = good >= 16 && coverage >= 0.9 && runs.seconds < 20 * 60;
  return {pass, "recovery: |cos| > 0.9 in " + std::to_string(good) + "/20 seeds (min " + fmt("%.3f", min_cos) +
                    "); null: CrI covers 0 for " + fmt("%.1f", 100 * coverage) + "% of " +
                    std::to_string(total) + " subjects over 5 seeds; " + fmt("%.0f", runs.seconds) + " s"};
}

Outcome criterion_5(const fs::path& root) {
  auto& runs = scenario_runs(root);
  int inside = 0;
  double lo = 1, hi = 0;
  for (const auto& r : runs.recovery) {
    inside += r.acceptance >= 0.1 && r.acceptance <= 0.6;
    lo = std::min(lo, r.acceptance);
    hi = std::max(hi, r.acceptance);
  }
  return {inside >= 18, "acceptance in [0.1, 0.6] for " + std::to_string(inside) + "/20 seeds (range " +
                            fmt("%.3f", lo) + " to " + fmt("%.3f", hi) + ")"};
}

// ---------------------------------------------------------------------------
// 6. GLM cross-checks

Outcome criterion_6() {
  double worst_ls = 0, worst_newton = 0;
  bool one_step = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    Matrix x = test::random_matrix(200, 5, rng);
    x.col(0).setOnes();
    const Vector y = test::random_vector(200, rng) + x * Vector::LinSpaced(5, -1, 1);
    const Vector off = 0.2 * test::random_vector(200, rng);
    const Family g(FamilyKind::gaussian, 2.5);
    auto fit = fit_iwls(g, y, off, x, Vector::Zero(5));
    one_step = one_step && fit.iterations == 1 && fit.converged;
    // closed form: weights are the constant 1/phi, so WLS = least squares via QR
    const Vector ref = x.colPivHouseholderQr().solve(y - off);
    worst_ls = std::max(worst_ls, (fit.coef - ref).cwiseAbs().maxCoeff());

    Vector truth(5);
    truth << -0.3, 0.8, -0.6, 0.4, 0.1;
    const Vector eta = off + x * truth;
    std::uniform_real_distribution<double> u(0, 1);
    Vector yb(200);
    for (int i = 0; i < 200; ++i) yb(i) = u(rng) < 1 / (1 + std::exp(-eta(i)));
    auto lf = fit_iwls(Family(FamilyKind::bernoulli), yb, off, x, Vector::Zero(5));
    const Vector oracle = newton_logistic(x, yb, off, 0.0);
    worst_newton = std::max(worst_newton, (lf.coef - oracle).cwiseAbs().maxCoeff());
  }
  return {one_step && worst_ls < 1e-10 && worst_newton < 1e-6,
          std::string("gaussian: one iteration ") + (one_step ? "yes" : "no") + ", max |diff| vs WLS " +
              fmt("%.2e", worst_ls) + "; logistic: max |diff| vs Newton " + fmt("%.2e", worst_newton)};
}

// ---------------------------------------------------------------------------
// 7. Decision semantics on every subject_scores.csv produced here

Outcome criterion_7() {
  if (produced_score_files.empty()) return {false, "no subject_scores.csv was produced in this run"};
  long long rows = 0, bad_decision = 0, bad_count = 0, bad_tbi = 0;
  for (const auto& path : produced_score_files) {
    auto lines = csv_rows(path);
    if (lines.empty()) return {false, "empty file " + path.string()};
    auto header = split_csv_line(lines[0]);
    std::map<std::string, std::size_t> col;
    for (std::size_t j = 0; j < header.size(); ++j) col[header[j]] = j;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      auto c = split_csv_line(lines[i]);
      ++rows;
      const double t = std::stod(c[col["tbi"]]);
      const int decision = std::stoi(c[col["decision"]]);
      const long long neg = std::stoll(c[col["n_delta_negative"]]);
      const long long below = std::stoll(c[col["n_exp_delta_below_one"]]);
      const long long draws = std::stoll(c[col["n_draws"]]);
      bad_decision += decision != (t > 0.5 ? 1 : 0);
      bad_count += neg != below;
      bad_tbi += t != static_cast<double>(neg) / static_cast<double>(draws);
    }
  }
  return {bad_decision == 0 && bad_count == 0 && bad_tbi == 0,
          std::to_string(produced_score_files.size()) + " files, " + std::to_string(rows) +
              " rows: decision mismatches " + std::to_string(bad_decision) + ", count mismatches " +
              std::to_string(bad_count) + ", tbi != count/draws " + std::to_string(bad_tbi)};
}

// ---------------------------------------------------------------------------
// 8. Determinism

Outcome criterion_8(const fs::path& root) {
  const fs::path dir = root / "determinism";
  fs::create_directories(dir);
  Scenario sc = test::small_scenario(300, 4, 8, GShape::sine, 2.0);
  run_synth(sc, (dir / "data.csv").string());
  const std::string text =
      "data = " + (dir / "data.csv").string() +
      "\nid_col = id\nmain_cols = x1,x2,x3,x4\nindex_cols = x1,x2,x3,x4\n"
      "family = bernoulli\nn_iter = 800\nburn_in = 300\nn_chains = 4\nseed = 31337\n";
  std::vector<std::string> coef, scores;
  for (int run = 0; run < 2; ++run) {
    RunConfig cfg = RunConfig::from(ConfigFile::parse(text));
    cfg.out_dir = (dir / ("run" + std::to_string(run))).string();
    run_fit(cfg);
    coef.push_back(test::read_file(fs::path(cfg.out_dir) / "coefficients.csv"));
    scores.push_back(test::read_file(fs::path(cfg.out_dir) / "subject_scores.csv"));
    produced_score_files.push_back(fs::path(cfg.out_dir) / "subject_scores.csv");
  }
  const bool same = coef[0] == coef[1] && scores[0] == scores[1] && !coef[0].empty();
  return {same, std::string("coefficients.csv ") + (coef[0] == coef[1] ? "identical" : "DIFFERENT") +
                    " (" + std::to_string(coef[0].size()) + " bytes), subject_scores.csv " +
                    (scores[0] == scores[1] ? "identical" : "DIFFERENT") + " (" +
                    std::to_string(scores[0].size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7, 8};

  // keep per-run warnings out of the PASS/FAIL report
  set_log_sink([](LogLevel level, std::string_view msg) {
    if (level == LogLevel::warning) std::fprintf(stderr, "  (warning) %.*s\n", int(msg.size()), msg.data());
  });

  const fs::path root = test::scratch_dir("acceptance");
  const std::map<int, std::string> names = {
      {1, "marginalisation oracle"}, {2, "conditional draws"},  {3, "constraint suite"},
      {4, "synthetic recovery"},     {5, "acceptance-rate band"}, {6, "GLM cross-checks"},
      {7, "decision semantics"},     {8, "determinism"}};
  std::map<int, std::function<Outcome()>> run = {
      {1, criterion_1},
      {2, criterion_2},
      {3, criterion_3},
      {4, [&] { return criterion_4(root); }},
      {5, [&] { return criterion_5(root); }},
      {6, criterion_6},
      {7, criterion_7},
      {8, [&] { return criterion_8(root); }}};

  // criterion 7 inspects the files written by 4/5 and 8, so run those first
  if (wanted.count(7)) {
    if (!wanted.count(8)) wanted.insert(-8);
    if (!wanted.count(4) && !wanted.count(5)) wanted.insert(-4);
  }
  std::map<int, Outcome> results;
  auto execute = [&](int k) {
    try {
      results[k] = run[k]();
    } catch (const std::exception& e) {
      results[k] = {false, std::string("threw: ") + e.what()};
    }
  };
  for (int k : {1, 2, 3, 6, 8, 4, 5}) {
    if (wanted.count(k) || wanted.count(-k)) execute(k);
  }
  if (wanted.count(7)) execute(7);

  int failed = 0;
  for (int k = 1; k <= 8; ++k) {
    if (!wanted.count(k)) continue;
    const auto& r = results[k];
    failed += !r.pass;
    std::printf("%s criterion %d (%s): %s\n", r.pass ? "PASS" : "FAIL", k, names.at(k).c_str(),
                r.detail.c_str());
  }
  std::fflush(stdout);
  std::error_code ec;
  if (failed == 0) fs::remove_all(root, ec);
  return failed == 0 ? 0 : 1;
}
