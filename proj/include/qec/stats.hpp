// Copyright 2026 qeclab authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QEC_STATS_HPP
#define QEC_STATS_HPP

// Small statistics helpers shared by the empirical validation paths:
// chi-square survival function, binomial confidence checks and a pairwise
// summation that keeps float reassociation error negligible.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace qec {

namespace detail {

// Regularized lower incomplete gamma P(a, x) by series expansion.
inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 20000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction.
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 20000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// Q(a, x) = 1 - P(a, x), the upper regularized incomplete gamma.
inline double gamma_q(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_cf(a, x);
}

// Survival function of the chi-square distribution with `dof` degrees.
inline double chi_square_pvalue(double statistic, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_square_pvalue: dof must be >= 1");
  if (statistic < 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * statistic);
}

// Chi-square statistic of observed counts against expected counts.
inline double chi_square_statistic(std::span<const double> observed,
                                   std::span<const double> expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square_statistic: size mismatch");
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) throw std::invalid_argument("chi_square_statistic: zero expectation");
    const double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  return stat;
}

// True when an empirical frequency is within k sigma of a binomial mean.
inline bool within_binomial_ci(double empirical, double p, std::size_t n, double k_sigma) {
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return std::abs(empirical - p) <= k_sigma * sigma;
}

// Order-independent pairwise summation.
inline double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean: empty input");
  return pairwise_sum(values) / static_cast<double>(values.size());
}

inline double sample_variance(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("sample_variance: need >= 2 values");
  const double m = mean(values);
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - m;
    sq[i] = d * d;
  }
  return pairwise_sum(sq) / static_cast<double>(values.size() - 1);
}

}  // namespace qec

#endif  // QEC_STATS_HPP
