#include "basislab/logistic_map.hpp"

#include <cmath>

#include "basislab/errors.hpp"

namespace basislab {

std::vector<double> logistic_iterate(const LogisticConfig& cfg, std::size_t iterations) {
  if (!(cfg.sigma > 0.0) || !(cfg.eta > 0.0) || !(cfg.alpha > 0.0)) {
    throw InputError("logistic_iterate: sigma, eta, alpha must be > 0");
  }
  if (cfg.alpha > cfg.sigma) {
    throw InputError("logistic_iterate: requires alpha <= sigma");
  }
  if (!(cfg.eta * cfg.sigma < 1.0)) {
    throw InputError("logistic_iterate: requires eta * sigma < 1");
  }
  std::vector<double> xs;
  xs.reserve(iterations + 1);
  double x = cfg.alpha;
  xs.push_back(x);
  for (std::size_t t = 0; t < iterations; ++t) {
    x = (1.0 + cfg.eta * cfg.sigma - cfg.eta * x) * x;
    xs.push_back(x);
  }
  return xs;
}

std::optional<std::size_t> first_passage(const std::vector<double>& xs, double threshold) {
  for (std::size_t t = 0; t < xs.size(); ++t) {
    if (xs[t] >= threshold) {
      return t;
    }
  }
  return std::nullopt;
}

std::size_t first_passage_bound(double alpha, double eps, double sigma, double eta) {
  if (!(alpha > 0.0 && alpha <= eps && eps <= 0.1 * sigma)) {
    throw InputError("first_passage_bound: requires 0 < alpha <= eps <= 0.1 * sigma");
  }
  if (!(eta > 0.0 && eta * sigma < 1.0)) {
    throw InputError("first_passage_bound: requires 0 < eta and eta * sigma < 1");
  }
  const double t =
      (std::log(4.0 * sigma / alpha) + std::log(4.0 * sigma / eps)) / std::log1p(eta * sigma);
  return static_cast<std::size_t>(std::ceil(t));
}

SeparationBound separation_bound(double sigma1, double sigma2, double eta, double alpha,
                                 double eps) {
  if (!(sigma1 > sigma2 && sigma2 > 0.0)) {
    throw InputError("separation_bound: requires sigma1 > sigma2 > 0");
  }
  if (!(eta > 0.0 && eta <= 1.0 / (4.0 * sigma1))) {
    throw InputError("separation_bound: requires 0 < eta <= 1/(4*sigma1)");
  }
  if (!(alpha > 0.0 && alpha <= eps && eps <= 0.1 * sigma1)) {
    throw InputError("separation_bound: requires 0 < alpha <= eps <= 0.1 * sigma1");
  }
  const double t =
      std::log(16.0 * sigma1 * sigma1 / (eps * alpha)) / std::log1p(eta * sigma1);
  SeparationBound out;
  out.iterations = static_cast<std::size_t>(std::ceil(t));
  out.y_bound = (16.0 * sigma1 * sigma1 / eps) *
                std::pow(alpha, (sigma1 - sigma2) / (sigma1 + sigma2));
  return out;
}

bool bernoulli_check(double x, double r) {
  if (!(r > 1.0)) {
    throw InputError("bernoulli_check: requires r > 1");
  }
  if (!(x >= 0.0 && x < 1.0 / (r - 1.0))) {
    throw InputError("bernoulli_check: requires 0 <= x < 1/(r-1)");
  }
  const double lhs = std::exp(r * std::log1p(x));
  const double rhs = 1.0 + r * x / (1.0 - (r - 1.0) * x);
  return lhs <= rhs + 1e-12;
}

}  // namespace basislab
