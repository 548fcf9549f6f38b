#include "bsim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bsim {

namespace {

std::size_t common_length(const std::vector<std::vector<double>>& chains) {
  std::size_t n = chains.empty() ? 0 : chains.front().size();
  for (const auto& c : chains) n = std::min(n, c.size());
  return n;
}

double mean_of(const double* x, std::size_t n) {
  return std::accumulate(x, x + n, 0.0) / static_cast<double>(n);
}

double variance_of(const double* x, std::size_t n, double mean) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (x[i] - mean) * (x[i] - mean);
  return s / static_cast<double>(n - 1);
}

// Biased autocovariance of one chain at a single lag.
double autocovariance(const std::vector<double>& x, std::size_t n, double mean,
                      std::size_t lag) {
  double s = 0.0;
  for (std::size_t i = 0; i + lag < n; ++i) {
    s += (x[i] - mean) * (x[i + lag] - mean);
  }
  return s / static_cast<double>(n);
}

}  // namespace

double split_rhat(const std::vector<std::vector<double>>& chains) {
  const std::size_t n = common_length(chains);
  const std::size_t half = n / 2;
  if (half < 2) return std::nan("");
  std::vector<double> means;
  std::vector<double> vars;
  for (const auto& c : chains) {
    for (std::size_t part = 0; part < 2; ++part) {
      const double* start = c.data() + part * half;
      const double m = mean_of(start, half);
      means.push_back(m);
      vars.push_back(variance_of(start, half, m));
    }
  }
  const double w = std::accumulate(vars.begin(), vars.end(), 0.0) /
                   static_cast<double>(vars.size());
  const double grand = mean_of(means.data(), means.size());
  const double b = static_cast<double>(half) *
                   variance_of(means.data(), means.size(), grand);
  if (!(w > 0.0)) return 1.0;
  const double nh = static_cast<double>(half);
  const double var_plus = (nh - 1.0) / nh * w + b / nh;
  return std::sqrt(var_plus / w);
}

double effective_sample_size(const std::vector<std::vector<double>>& chains) {
  const std::size_t n = common_length(chains);
  const std::size_t m = chains.size();
  if (m == 0 || n < 4) return std::nan("");
  const std::size_t max_lag = n - 1;
  const double md = static_cast<double>(m);

  std::vector<double> chain_means;
  for (const auto& c : chains) chain_means.push_back(mean_of(c.data(), n));
  const auto mean_acov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      s += autocovariance(chains[j], n, chain_means[j], lag);
    }
    return s / md;
  };

  const double nd = static_cast<double>(n);
  const double w = mean_acov(0) * nd / (nd - 1.0);
  double var_plus = w * (nd - 1.0) / nd;
  if (m > 1) {
    const double grand = mean_of(chain_means.data(), m);
    var_plus += variance_of(chain_means.data(), m, grand);
  }
  if (!(var_plus > 0.0)) return nd * md;

  // rho_t = 1 - (W - mean_acov_t) / var_plus
  const auto rho = [&](std::size_t t) {
    return 1.0 - (w - mean_acov(t)) / var_plus;
  };
  double tau = -1.0;
  for (std::size_t t = 0; t + 1 <= max_lag; t += 2) {
    const double pair = rho(t) + rho(t + 1);
    if (pair < 0.0) break;
    tau += 2.0 * pair;
  }
  tau = std::max(tau, 1.0 / std::log10(static_cast<double>(n * m)));
  return static_cast<double>(n * m) / tau;
}

}  // namespace bsim
