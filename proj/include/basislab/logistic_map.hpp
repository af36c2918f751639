#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace basislab {

// Scalar recurrence x_{t+1} = (1 + eta*sigma - eta*x_t) * x_t, the reference
// model for one signal coefficient growing toward its attractor sigma.
struct LogisticConfig {
  double sigma;  // attractor, > 0
  double eta;    // step size, eta * sigma < 1
  double alpha;  // initial value, 0 < alpha <= sigma
};

// Sequence x_0 .. x_T (length T + 1).
std::vector<double> logistic_iterate(const LogisticConfig& cfg, std::size_t iterations);

// Smallest t with xs[t] >= threshold.
std::optional<std::size_t> first_passage(const std::vector<double>& xs, double threshold);

// Iterations guaranteed to bring x_t above sigma - eps, given
// alpha <= eps <= 0.1 * sigma. Natural logs, unit constants, ceiling.
std::size_t first_passage_bound(double alpha, double eps, double sigma, double eta);

/// Budget and envelope for two coupled maps with attractors
/// sigma1 > sigma2 started from the same alpha: after `iterations` steps the
/// faster map is within eps of sigma1 while the slower one is still below
/// `y_bound`. Requires eta <= 1/(4*sigma1). The envelope is only informative
/// when y_bound < sigma2.
struct SeparationBound {
  std::size_t iterations;
  double y_bound;
};

SeparationBound separation_bound(double sigma1, double sigma2, double eta, double alpha,
                                 double eps);

// True iff (1+x)^r <= 1 + r*x / (1 - (r-1)*x) + 1e-12, the sharpened
// Bernoulli bound, valid for r > 1 and 0 <= x < 1/(r-1).
bool bernoulli_check(double x, double r);

}  // namespace basislab
