#pragma once
// Reference computations written independently of the library, used as test oracles.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

/// Stationary mean backlog of the single-link ON/OFF queue with Bernoulli(lambda)
/// arrivals, from the transition matrix truncated at q_max, solved by Gaussian
/// elimination on pi (P - I) = 0 with sum(pi) = 1.
inline double single_link_mean(double p, double lambda, std::size_t q_max) {
  const std::size_t n = q_max + 1;
  std::vector<std::vector<long double>> P(n, std::vector<long double>(n, 0.0L));
  for (std::size_t q = 0; q < n; ++q) {
    // Service before arrival: q' = max(q - S, 0) + A.
    for (int s = 0; s <= 1; ++s) {
      const long double ps = s ? p : 1.0 - p;
      for (int a = 0; a <= 1; ++a) {
        const long double pa = a ? lambda : 1.0 - lambda;
        std::size_t next = (q > 0 && s) ? q - 1 : q;
        next += static_cast<std::size_t>(a);
        if (next > q_max) next = q_max;
        P[q][next] += ps * pa;
      }
    }
  }
  // Rows of A: (P^T - I), last row replaced by normalization.
  std::vector<std::vector<long double>> A(n, std::vector<long double>(n + 1, 0.0L));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) A[i][j] = P[j][i] - (i == j ? 1.0L : 0.0L);
  }
  for (std::size_t j = 0; j < n; ++j) A[n - 1][j] = 1.0L;
  A[n - 1][n] = 1.0L;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(A[r][col]) > std::fabs(A[pivot][col])) pivot = r;
    }
    std::swap(A[col], A[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const long double f = A[r][col] / A[col][col];
      if (f == 0.0L) continue;
      for (std::size_t c = col; c <= n; ++c) A[r][c] -= f * A[col][c];
    }
  }
  long double mean = 0.0L;
  for (std::size_t i = 0; i < n; ++i) mean += static_cast<long double>(i) * (A[i][n] / A[i][i]);
  return static_cast<double>(mean);
}

/// Load of lambda over the ON/OFF region by brute force over all subsets (bitmask loop).
inline double onoff_load(const std::vector<double>& lambda, const std::vector<double>& p) {
  const std::size_t n = lambda.size();
  double rho = 0.0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    long double sum = 0.0L, off = 1.0L;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) {
        sum += lambda[i];
        off *= 1.0L - p[i];
      }
    }
    rho = std::max(rho, static_cast<double>(sum / (1.0L - off)));
  }
  return rho;
}

struct GeneralBound {
  long double theta, epsilon, b_theta, backlog_via_c, backlog_via_eps;
};

/// Grouped LCQ bound for symmetric p and independent arrivals, in long double,
/// evaluated two ways: K B C / (1-rho)^2 and B / epsilon.
inline GeneralBound general_bound(std::size_t n, long double p, int k,
                                  const std::vector<long double>& lambda,
                                  const std::vector<long double>& second, long double rho) {
  auto r = [&](long double kk) { return 1.0L - std::pow(1.0L - p, kk); };
  const long double N = static_cast<long double>(n), K = k;
  long double lt = 0, se = 0, sl2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    lt += lambda[i];
    se += second[i];
    sl2 += lambda[i] * lambda[i];
  }
  const long double etot2 = se + (lt * lt - sl2);
  const long double muK = r(K) / K, muN = r(N) / N, rK1 = r(K + 1);
  GeneralBound g{};
  g.theta = (1 - rho) * (muK - muN) / rK1;
  g.epsilon = (1 - rho) * (muN * lt + muK * (rK1 - lt)) / rK1;
  g.b_theta = lt / 2 + se / 2 - sl2 + g.theta / 2 * (etot2 + lt - 2 * lt * lt);
  const long double c = rK1 / (r(N) * K * lt / (N * (1 - rho)) + r(K) * (rK1 - lt) / (1 - rho));
  g.backlog_via_c = K * g.b_theta * c / ((1 - rho) * (1 - rho));
  g.backlog_via_eps = g.b_theta / g.epsilon;
  return g;
}

}  // namespace oracle
